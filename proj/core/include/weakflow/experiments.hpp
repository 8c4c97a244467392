// Copyright 2026 The weakflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment runner and the result bundle it writes to disk.

#ifndef WEAKFLOW_EXPERIMENTS_HPP_
#define WEAKFLOW_EXPERIMENTS_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "weakflow/config.hpp"

namespace weakflow {

/// One verdict. `comparison` says how measured relates to tolerance for a
/// pass ("<", "<=", ">", ">=").
struct CheckResult {
  std::string id;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string comparison = "<";
  bool pass = false;
  std::string detail;
};

/// A CSV table whose cells are already formatted.
struct Table {
  std::string file;  // e.g. "estimates.csv"
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ResultBundle {
  std::string name;
  ExperimentKind kind = ExperimentKind::weak_velocity;
  std::string config_echo;
  std::string config_hash;
  std::string version;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double wall_seconds = 0.0;
  std::vector<Table> tables;
  std::vector<CheckResult> checks;

  bool pass() const;
  const CheckResult* find(const std::string& id) const;
};

/// Runs the experiment described by `config` and evaluates its checks.
/// Module errors propagate with the experiment name prepended.
ResultBundle run_experiment(const ExperimentConfig& config);

/// Writes summary.json, config_echo.cfg and every table into `dir`
/// (created if needed), replacing earlier files of the same names.
void write_results(const ResultBundle& bundle, const std::filesystem::path& dir);

/// JSON text of summary.json.
std::string summary_json(const ResultBundle& bundle);

/// CSV text of one table.
std::string table_csv(const Table& table);

std::string library_version();

}  // namespace weakflow

#endif  // WEAKFLOW_EXPERIMENTS_HPP_
