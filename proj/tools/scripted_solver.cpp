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

// Replays a fixed prediction schedule into $PREDICTION_DIR. Used as a test
// double for the orchestrator: each schedule line is "<delay> <file>", and
// the file's bytes are published verbatim as iteration_<k>.predict.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "anytime/taskio.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Scripted solver for orchestrator tests"};
  std::string schedule_path;
  double linger = 0.0;
  int exit_code = 0;
  app.add_option("--schedule", schedule_path, "Schedule file")->required();
  app.add_option("--linger", linger,
                 "Seconds to sleep after the last prediction");
  app.add_option("--exit-code", exit_code, "Exit status to return");
  CLI11_PARSE(app, argc, argv);

  const char* out_dir = std::getenv("PREDICTION_DIR");
  if (out_dir == nullptr) {
    std::cerr << "PREDICTION_DIR is not set\n";
    return 2;
  }
  const auto start = std::chrono::steady_clock::now();
  try {
    const fs::path schedule(schedule_path);
    std::istringstream lines(anytime::read_file(schedule));
    std::string line;
    double at = 0.0;
    std::size_t k = 0;
    while (std::getline(lines, line)) {
      if (line.empty() || line.front() == '#') continue;
      std::istringstream fields(line);
      double delay = 0.0;
      std::string file;
      if (!(fields >> delay >> file)) {
        std::cerr << "bad schedule line: " << line << "\n";
        return 2;
      }
      at += delay;
      const std::string contents =
          anytime::read_file(schedule.parent_path() / file);
      std::this_thread::sleep_until(
          start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(at)));
      anytime::write_file_atomic(
          fs::path(out_dir) / anytime::prediction_file_name(k++), contents);
    }
  } catch (const std::exception& e) {
    std::cerr << "scripted_solver: " << e.what() << "\n";
    return 2;
  }
  if (linger > 0.0) {
    std::this_thread::sleep_for(std::chrono::duration<double>(linger));
  }
  return exit_code;
}
