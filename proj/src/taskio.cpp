// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "anytime/taskio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "anytime/errors.hpp"

namespace fs = std::filesystem;

namespace anytime {
namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Splits on '\n'. A trailing newline does not produce an extra empty line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  Int value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Returns the byte offset of the first invalid UTF-8 sequence, or npos.
std::size_t find_invalid_utf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    if (b < 0x80) {
      len = 1;
    } else if ((b & 0xE0) == 0xC0 && b >= 0xC2) {
      len = 2;
    } else if ((b & 0xF0) == 0xE0) {
      len = 3;
    } else if ((b & 0xF8) == 0xF0 && b <= 0xF4) {
      len = 4;
    } else {
      return i;
    }
    if (i + len > text.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) return i;
    }
    i += len;
  }
  return std::string_view::npos;
}

Location locate_offset(std::string_view text, std::size_t offset,
                       const std::string& source) {
  std::size_t row = 1;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++row;
      line_start = i + 1;
    }
  }
  return Location{source, row, offset - line_start + 1};
}

}  // namespace

std::string_view to_string(Domain domain) {
  switch (domain) {
    case Domain::kImage: return "image";
    case Domain::kVideo: return "video";
    case Domain::kSpeech: return "speech";
    case Domain::kText: return "text";
    case Domain::kTabular: return "tabular";
    case Domain::kOther: return "other";
  }
  return "other";
}

std::optional<Domain> parse_domain(std::string_view text) {
  for (Domain d : {Domain::kImage, Domain::kVideo, Domain::kSpeech,
                   Domain::kText, Domain::kTabular, Domain::kOther}) {
    if (to_string(d) == text) return d;
  }
  return std::nullopt;
}

TaskMetadata parse_metadata(std::string_view text,
                            const std::string& source_name) {
  TaskMetadata meta;
  bool seen_name = false, seen_domain = false, seen_classes = false,
       seen_train = false, seen_test = false, seen_dims = false,
       seen_budget = false;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto fail = [&](const std::string& message) -> MetadataParseError {
      return MetadataParseError(message, Location{source_name, i + 1, 0});
    };
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw fail("expected key=value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto once = [&](bool& seen) {
      if (seen) throw fail("duplicate key '" + std::string(key) + "'");
      seen = true;
    };
    const auto positive = [&]() -> std::size_t {
      const auto v = parse_int<std::size_t>(value);
      if (!v || *v == 0) {
        throw fail("field '" + std::string(key) +
                   "' must be a positive integer, got '" + std::string(value) +
                   "'");
      }
      return *v;
    };
    if (key == "name") {
      once(seen_name);
      if (value.empty()) throw fail("field 'name' is empty");
      meta.name = std::string(value);
    } else if (key == "domain") {
      once(seen_domain);
      const auto d = parse_domain(value);
      if (!d) throw fail("unknown domain '" + std::string(value) + "'");
      meta.domain = *d;
    } else if (key == "n_classes") {
      once(seen_classes);
      meta.n_classes = positive();
    } else if (key == "n_train") {
      once(seen_train);
      meta.n_train = positive();
    } else if (key == "n_test") {
      once(seen_test);
      meta.n_test = positive();
    } else if (key == "dims") {
      once(seen_dims);
      const auto tokens = split_tokens(value);
      if (tokens.size() != 4) {
        throw fail("field 'dims' needs 4 entries (time row col channel), got " +
                   std::to_string(tokens.size()));
      }
      for (std::size_t k = 0; k < 4; ++k) {
        if (tokens[k] == "var") {
          meta.tensor_dims[k] = std::nullopt;
          continue;
        }
        const auto v = parse_int<std::int64_t>(tokens[k]);
        if (!v || *v <= 0) {
          throw fail("field 'dims' entry " + std::to_string(k + 1) +
                     " must be a positive integer or 'var', got '" +
                     std::string(tokens[k]) + "'");
        }
        meta.tensor_dims[k] = *v;
      }
    } else if (key == "budget") {
      once(seen_budget);
      const auto v = parse_double(value);
      if (!v || !(*v > 0.0) || !std::isfinite(*v)) {
        throw fail("field 'budget' must be positive seconds, got '" +
                   std::string(value) + "'");
      }
      meta.budget_override = *v;
    } else {
      throw fail("unknown key '" + std::string(key) + "'");
    }
  }
  const auto require = [&](bool seen, const char* key) {
    if (!seen) {
      throw MetadataParseError(std::string("missing field '") + key + "'",
                               Location{source_name, 0, 0});
    }
  };
  require(seen_name, "name");
  require(seen_domain, "domain");
  require(seen_classes, "n_classes");
  require(seen_train, "n_train");
  require(seen_test, "n_test");
  require(seen_dims, "dims");
  return meta;
}

std::string format_metadata(const TaskMetadata& meta) {
  std::ostringstream out;
  out << "name=" << meta.name << "\n"
      << "domain=" << to_string(meta.domain) << "\n"
      << "n_classes=" << meta.n_classes << "\n"
      << "n_train=" << meta.n_train << "\n"
      << "n_test=" << meta.n_test << "\n"
      << "dims=";
  for (std::size_t k = 0; k < 4; ++k) {
    if (k > 0) out << ' ';
    if (meta.tensor_dims[k]) {
      out << *meta.tensor_dims[k];
    } else {
      out << "var";
    }
  }
  out << "\n";
  if (meta.budget_override) {
    out << "budget=" << format_real(*meta.budget_override) << "\n";
  }
  return out.str();
}

namespace {

LabelMatrix parse_solution(std::string_view text, const TaskMetadata& meta,
                           const std::string& source) {
  const auto lines = split_lines(text);
  if (lines.size() != meta.n_test) {
    throw SolutionShapeError(
        "expected " + std::to_string(meta.n_test) + " rows, found " +
            std::to_string(lines.size()),
        Location{source, 0, 0});
  }
  std::vector<std::uint8_t> values;
  values.reserve(meta.n_test * meta.n_classes);
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto tokens = split_tokens(trim(lines[r]));
    if (tokens.size() != meta.n_classes) {
      throw SolutionShapeError(
          "expected " + std::to_string(meta.n_classes) + " columns, found " +
              std::to_string(tokens.size()),
          Location{source, r + 1, 0});
    }
    for (std::size_t c = 0; c < tokens.size(); ++c) {
      if (tokens[c] != "0" && tokens[c] != "1") {
        throw SolutionShapeError(
            "label must be 0 or 1, got '" + std::string(tokens[c]) + "'",
            Location{source, r + 1, c + 1});
      }
      values.push_back(tokens[c] == "1" ? 1 : 0);
    }
  }
  return LabelMatrix(meta.n_test, meta.n_classes, std::move(values));
}

}  // namespace

TaskBundle load_task(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw MissingFile("task directory not found: " + root.string());
  }
  const fs::path metadata_path = root / kMetadataFile;
  const fs::path solution_path = root / kSolutionFile;
  for (const fs::path& p : {metadata_path, solution_path}) {
    if (!fs::is_regular_file(p)) {
      throw MissingFile("required file not found: " + p.string());
    }
  }
  TaskBundle bundle;
  bundle.root = root;
  bundle.metadata =
      parse_metadata(read_file(metadata_path), metadata_path.string());
  bundle.training_path = root / kTrainDir;
  bundle.solution = parse_solution(read_file(solution_path), bundle.metadata,
                                   solution_path.string());
  return bundle;
}

void write_task(const fs::path& root, const TaskMetadata& meta,
                const LabelMatrix& solution) {
  if (solution.rows() != meta.n_test || solution.cols() != meta.n_classes) {
    throw SolutionShapeError("solution is " + std::to_string(solution.rows()) +
                             "x" + std::to_string(solution.cols()) +
                             " but metadata says " +
                             std::to_string(meta.n_test) + "x" +
                             std::to_string(meta.n_classes));
  }
  std::error_code ec;
  fs::create_directories(root / kTrainDir, ec);
  if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());
  write_file_atomic(root / kMetadataFile, format_metadata(meta));
  std::string text;
  for (std::size_t r = 0; r < solution.rows(); ++r) {
    for (std::size_t c = 0; c < solution.cols(); ++c) {
      if (c > 0) text += ' ';
      text += solution(r, c) ? '1' : '0';
    }
    text += '\n';
  }
  write_file_atomic(root / kSolutionFile, text);
}

std::string prediction_file_name(std::size_t sequence_index) {
  return "iteration_" + std::to_string(sequence_index) + ".predict";
}

std::optional<std::size_t> parse_prediction_file_name(std::string_view name) {
  constexpr std::string_view prefix = "iteration_";
  constexpr std::string_view suffix = ".predict";
  if (name.size() <= prefix.size() + suffix.size()) return std::nullopt;
  if (!name.starts_with(prefix) || !name.ends_with(suffix)) return std::nullopt;
  const std::string_view digits = name.substr(
      prefix.size(), name.size() - prefix.size() - suffix.size());
  if (digits.size() > 1 && digits.front() == '0') return std::nullopt;
  return parse_int<std::size_t>(digits);
}

ScoreMatrix parse_prediction_text(std::string_view text, std::size_t n_rows,
                                  std::size_t n_cols,
                                  const std::string& source) {
  if (const std::size_t bad = find_invalid_utf8(text);
      bad != std::string_view::npos) {
    throw EncodingError("invalid UTF-8 byte", locate_offset(text, bad, source));
  }
  if (const std::size_t cr = text.find('\r'); cr != std::string_view::npos) {
    throw EncodingError("carriage return found; lines must end with LF only",
                        locate_offset(text, cr, source));
  }
  const auto lines = split_lines(text);
  if (lines.size() != n_rows) {
    throw BadPredictionShape(
        "bad prediction shape: expected " + std::to_string(n_rows) +
            " lines, found " + std::to_string(lines.size()),
        Location{source, std::min(lines.size(), n_rows) + 1, 0});
  }
  std::vector<double> values;
  values.reserve(n_rows * n_cols);
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto tokens = split_tokens(lines[r]);
    if (tokens.size() != n_cols) {
      throw BadPredictionShape(
          "bad prediction shape: expected " + std::to_string(n_cols) +
              " values, found " + std::to_string(tokens.size()),
          Location{source, r + 1, std::min(tokens.size(), n_cols) + 1});
    }
    for (std::size_t c = 0; c < tokens.size(); ++c) {
      const auto v = parse_double(tokens[c]);
      if (!v) {
        throw BadPredictionShape(
            "'" + std::string(tokens[c]) + "' is not a decimal real",
            Location{source, r + 1, c + 1});
      }
      if (!std::isfinite(*v)) {
        throw NonFiniteScore(
            "non-finite score '" + std::string(tokens[c]) + "' in row " +
                std::to_string(r + 1),
            Location{source, r + 1, c + 1});
      }
      values.push_back(*v);
    }
  }
  return ScoreMatrix(n_rows, n_cols, std::move(values));
}

PredictionDocument parse_predictions(const fs::path& path,
                                     const TaskMetadata& meta) {
  PredictionDocument doc;
  doc.matrix = parse_prediction_text(read_file(path), meta.n_test,
                                     meta.n_classes, path.string());
  doc.source_path = path;
  doc.sequence_index =
      parse_prediction_file_name(path.filename().string()).value_or(0);
  return doc;
}

std::string format_real(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_predictions(const ScoreMatrix& matrix) {
  std::string out;
  out.reserve(matrix.rows() * matrix.cols() * 20);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      if (c > 0) out += ' ';
      out += format_real(matrix(r, c));
    }
    out += '\n';
  }
  return out;
}

fs::path write_predictions(const ScoreMatrix& matrix, const fs::path& dir,
                           std::size_t sequence_index) {
  const fs::path target = dir / prediction_file_name(sequence_index);
  write_file_atomic(target, format_predictions(matrix));
  return target;
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() +
                  ": " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return buf.str();
}

}  // namespace anytime
