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

// Acceptance driver: one shipped configuration per criterion, one verdict
// line per criterion.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "weakflow/experiments.hpp"

namespace {

struct Criterion {
  int id;
  const char* config;
  const char* title;
};

constexpr Criterion kCriteria[] = {
    {1, "weak_value_identity", "weak value real part equals the flux over density"},
    {2, "bohmian_gaussian", "Bohmian law: estimator recovers the Bohmian velocity"},
    {3, "variant_shows_bohmian", "variant law: estimator still recovers the Bohmian velocity"},
    {4, "cc_scaling", "multiplication invariance and variant deviation scaling"},
    {5, "pointer_law", "pointer readings follow the convolved density"},
    {6, "equivariance", "transport keeps the ensemble on the evolved density"},
    {7, "uniqueness", "witness separates the variant from the Bohmian current"},
    {8, "pointer_mean", "pointer mean matches the position mean"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weakflow acceptance criteria"};
  std::vector<int> selected;
  std::string out = "acceptance_results";
  app.add_option("--criterion", selected, "criterion number(s), default all")->check(CLI::Range(1, 8));
  app.add_option("--out", out, "directory for result bundles");
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  for (const auto& c : kCriteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const std::filesystem::path cfg = std::filesystem::path(WEAKFLOW_CONFIG_DIR) / (std::string(c.config) + ".cfg");
    try {
      auto config = weakflow::parse_config(cfg);
      const auto bundle = weakflow::run_experiment(config);
      weakflow::write_results(bundle, std::filesystem::path(out) / c.config);
      std::printf("criterion %d: %s  %s [%s, %.1f s]\n", c.id, bundle.pass() ? "PASS" : "FAIL", c.title,
                  c.config, bundle.wall_seconds);
      for (const auto& check : bundle.checks) {
        std::printf("  %s %s: measured %.6g %s %.6g\n", check.pass ? "ok  " : "FAIL", check.id.c_str(),
                    check.measured, check.comparison.c_str(), check.tolerance);
        if (!check.detail.empty()) std::printf("       %s\n", check.detail.c_str());
      }
      all_pass = all_pass && bundle.pass();
    } catch (const std::exception& e) {
      std::printf("criterion %d: FAIL  %s [%s] error: %s\n", c.id, c.title, c.config, e.what());
      all_pass = false;
    }
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
