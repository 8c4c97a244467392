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

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "weakflow/experiments.hpp"

namespace weakflow {
namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string library_version() {
#ifdef WEAKFLOW_VERSION
  return WEAKFLOW_VERSION;
#else
  return "unknown";
#endif
}

bool ResultBundle::pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

const CheckResult* ResultBundle::find(const std::string& id) const {
  for (const auto& c : checks) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::string table_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out += (i ? "," : "") + table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += '\n';
  }
  return out;
}

std::string summary_json(const ResultBundle& bundle) {
  nlohmann::ordered_json j;
  j["name"] = bundle.name;
  j["kind"] = to_string(bundle.kind);
  j["pass"] = bundle.pass();
  j["metadata"] = {
      {"version", bundle.version},       {"config_hash", bundle.config_hash},
      {"seed", bundle.seed},             {"workers", bundle.workers},
      {"wall_seconds", bundle.wall_seconds},
  };
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : bundle.checks) {
    nlohmann::ordered_json item;
    item["check_id"] = c.id;
    item["measured"] = number_or_null(c.measured);
    item["tolerance"] = number_or_null(c.tolerance);
    item["comparison"] = c.comparison;
    item["pass"] = c.pass;
    item["detail"] = c.detail;
    checks.push_back(std::move(item));
  }
  j["checks"] = std::move(checks);
  std::vector<std::string> files;
  for (const auto& t : bundle.tables) files.push_back(t.file);
  j["tables"] = files;
  return j.dump(2) + "\n";
}

void write_results(const ResultBundle& bundle, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "summary.json", summary_json(bundle));
  write_file(dir / "config_echo.cfg", bundle.config_echo);
  for (const auto& t : bundle.tables) write_file(dir / t.file, table_csv(t));
}

}  // namespace weakflow
