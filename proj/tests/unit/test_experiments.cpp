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

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include "doctest.h"
#include "json.hpp"
#include "weakflow/experiments.hpp"

using namespace weakflow;
namespace fs = std::filesystem;

namespace {

const char* kSmallRun = R"(
[experiment]
name = small_run
kind = weak_velocity
checks = v_bohmian, reliable_bins, censoring, pointer_mean
seed = 77

[state]
kind = gaussian
s0 = 1
prepare_time = 0.5

[protocol]
n_runs = 6000
n_min = 100

[checks]
min_reliable_bins = 1
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("weakflow_test_" + name);
  fs::remove_all(dir);
  return dir;
}

const Table* table(const ResultBundle& b, const std::string& file) {
  for (const auto& t : b.tables) {
    if (t.file == file) return &t;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("weak_velocity bundle") {
  auto config = parse_config_text(kSmallRun);
  config.workers = 1;
  const auto bundle = run_experiment(config);
  CHECK(bundle.name == "small_run");
  CHECK(bundle.config_hash == config_hash(config));
  CHECK(bundle.checks.size() == 4);
  CHECK(bundle.find("pointer_mean") != nullptr);
  CHECK(bundle.find("tau_slope") == nullptr);

  const auto* est = table(bundle, "estimates.csv");
  REQUIRE(est != nullptr);
  const std::vector<std::string> expected_head{
      "bin_center", "n", "mean_Y", "stderr_Y", "v_hat", "stderr_v", "v_bohmian_ref",
      "v_law_ref", "reliable_flag"};
  for (std::size_t i = 0; i < expected_head.size(); ++i) CHECK(est->header[i] == expected_head[i]);
  CHECK(est->header.back() == "config_hash");
  bool has_unreliable = false;
  for (const auto& row : est->rows) {
    CHECK(row.size() == est->header.size());
    CHECK(row.back() == bundle.config_hash);
    if (row[8] == "0") has_unreliable = true;
  }
  // Sparse tail bins stay in the table, flagged.
  CHECK(has_unreliable);

  SUBCASE("identical tables across runs and worker counts") {
    auto other = config;
    other.workers = 3;
    const auto again = run_experiment(other);
    REQUIRE(again.tables.size() == bundle.tables.size());
    for (std::size_t i = 0; i < bundle.tables.size(); ++i) {
      CHECK(table_csv(again.tables[i]) == table_csv(bundle.tables[i]));
    }
    CHECK(again.config_hash == bundle.config_hash);
  }

  SUBCASE("files on disk") {
    const auto dir = scratch("bundle");
    write_results(bundle, dir);
    CHECK(fs::exists(dir / "estimates.csv"));
    CHECK(fs::exists(dir / "config_echo.cfg"));
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["name"] == "small_run");
    CHECK(summary["metadata"]["config_hash"] == bundle.config_hash);
    CHECK(summary["metadata"]["seed"] == 77);
    REQUIRE(summary["checks"].size() == 4);
    for (const auto& c : summary["checks"]) {
      CHECK(c.contains("check_id"));
      CHECK(c.contains("measured"));
      CHECK(c.contains("tolerance"));
      CHECK(c.contains("pass"));
    }
    const auto first = slurp(dir / "estimates.csv");
    CHECK(first == table_csv(*est));
    // The echo reproduces the same configuration.
    CHECK(config_hash(parse_config(dir / "config_echo.cfg")) == bundle.config_hash);
    // Overwriting is idempotent.
    write_results(bundle, dir);
    CHECK(slurp(dir / "estimates.csv") == first);
    fs::remove_all(dir);
  }
}

TEST_CASE("sweep bundle has one row per cell and bin") {
  auto config = parse_config_text(R"(
[experiment]
name = small_sweep
kind = sweep
seed = 3

[state]
prepare_time = 0.5

[protocol]
n_runs = 1500

[sweep]
sigmas = 5, 10
taus = 0.1, 0.05
deltas = 0.15625, 0.3125
)");
  const auto bundle = run_experiment(config);
  const auto* t = table(bundle, "sweep.csv");
  REQUIRE(t != nullptr);
  CHECK(t->header[0] == "sigma");
  CHECK(t->header[1] == "tau");
  CHECK(t->header[2] == "delta");
  std::map<std::tuple<std::string, std::string, std::string>, std::set<std::string>> cells;
  for (const auto& row : t->rows) {
    auto& bins = cells[{row[0], row[1], row[2]}];
    CHECK(bins.insert(row[3]).second);  // no bin twice within a cell
  }
  CHECK(cells.size() == 8);
  REQUIRE(bundle.find("tau_slope") != nullptr);
}

TEST_CASE("analytic bundle") {
  const auto config = parse_config_text(R"(
[experiment]
name = wv
kind = analytic_wv

[state]
kind = superposition
x0 = -2, 2
s0 = 1, 1
k0 = 1, -1
weights = 0.6, 0.8
)");
  const auto bundle = run_experiment(config);
  REQUIRE(bundle.checks.size() == 1);
  CHECK(bundle.checks[0].id == "weak_value_identity");
  CHECK(bundle.pass());
  CHECK(table(bundle, "weak_values.csv")->rows.size() == 1024);
}

TEST_CASE("module errors carry the experiment name") {
  auto config = parse_config_text(kSmallRun);
  config.rho_min = 10.0;
  try {
    run_experiment(config);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("small_run") != std::string::npos);
  }
}

TEST_CASE("check verdict comparisons") {
  ResultBundle b;
  b.checks.push_back({"a", 0.5, 1.0, "<", true, ""});
  CHECK(b.pass());
  b.checks.push_back({"b", 2.0, 1.0, "<", false, ""});
  CHECK_FALSE(b.pass());
  CHECK(b.find("b")->measured == 2.0);
  CHECK(summary_json(b).find("\"check_id\": \"b\"") != std::string::npos);
}
