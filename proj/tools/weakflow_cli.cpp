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

// weakflow command line: run, validate, sweep, oracle.
//
// Exit codes: 0 every check passed, 1 a check failed or a run aborted,
// 2 configuration error.

#include <fmt/format.h>

#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "weakflow/config.hpp"
#include "weakflow/experiments.hpp"
#include "weakflow/oracles.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfigError = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Master seed, replacing [experiment] seed");
  cmd->add_option("--workers", o.workers,
                  "Worker threads (0: WEAKFLOW_WORKERS, else hardware concurrency)");
  cmd->add_option("--out", o.out, "Output directory, replacing [output] dir");
}

void report_config_error(const weakflow::ConfigError& e) {
  std::cerr << "configuration error:\n";
  for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
}

std::string fmt_value(double v) {
  return std::isnan(v) ? "n/a" : fmt::format("{:.6g}", v);
}

int run_config(weakflow::ExperimentConfig config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.workers) config.workers = *o.workers;
  if (o.out) config.output_dir = *o.out;
  weakflow::ResultBundle bundle;
  try {
    bundle = weakflow::run_experiment(config);
    weakflow::write_results(bundle, config.output_dir);
  } catch (const weakflow::ConfigError& e) {
    report_config_error(e);
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  fmt::print("{} ({}), config {}, seed {}, {} workers, {:.1f} s\n", bundle.name,
             weakflow::to_string(bundle.kind), bundle.config_hash, bundle.seed, bundle.workers,
             bundle.wall_seconds);
  for (const auto& c : bundle.checks) {
    fmt::print("  [{}] {}: measured {} {} {}\n", c.pass ? "PASS" : "FAIL", c.id,
               fmt_value(c.measured), c.comparison, fmt_value(c.tolerance));
    if (!c.detail.empty()) fmt::print("         {}\n", c.detail);
  }
  fmt::print("{}: {}\n", bundle.pass() ? "PASS" : "FAIL", config.output_dir);
  return bundle.pass() ? kPass : kFail;
}

std::optional<weakflow::ExperimentConfig> load(const std::string& path) {
  try {
    return weakflow::parse_config(path);
  } catch (const weakflow::ConfigError& e) {
    report_config_error(e);
  }
  return std::nullopt;
}

struct OracleArgs {
  double s0 = 1.0;
  double t = 0.5;
  double x = 1.0;
  double epsilon = 0.2;
  double sigma = 10.0;
  double n = 1e5;
  double alpha = 0.01;
  double omega = 1.0;
};

using OracleFn = std::function<void(const OracleArgs&)>;

const std::map<std::string, std::pair<std::string, OracleFn>>& oracles() {
  namespace o = weakflow::oracle;
  static const std::map<std::string, std::pair<std::string, OracleFn>> table{
      {"free_gaussian",
       {"spread, density and Bohmian velocity of a free packet at (t, x)",
        [](const OracleArgs& a) {
          fmt::print("width = {:.17g}\n", o::free_width(a.s0, a.t));
          fmt::print("density = {:.17g}\n", o::free_density(a.s0, a.t, a.x));
          fmt::print("velocity = {:.17g}\n", o::free_velocity(a.s0, a.t, a.x));
        }}},
      {"free_trajectory",
       {"Bohmian trajectory of a free packet from x at time 0, evaluated at t",
        [](const OracleArgs& a) {
          fmt::print("position = {:.17g}\n", o::free_trajectory(a.s0, a.t, a.x));
        }}},
      {"variant_offset",
       {"epsilon / rho of the constant-offset law for a free packet at (t, x)",
        [](const OracleArgs& a) {
          fmt::print("offset = {:.17g}\n", o::variant_offset(a.epsilon, a.s0, a.t, a.x));
        }}},
      {"conditional_width",
       {"spread of the conditioned packet for pointer spread sigma",
        [](const OracleArgs& a) {
          fmt::print("width = {:.17g}\n", o::conditional_width(a.s0, a.sigma));
        }}},
      {"pointer_variance",
       {"variance of the pointer reading for a packet of spread s0",
        [](const OracleArgs& a) {
          fmt::print("variance = {:.17g}\n", o::pointer_variance(a.s0, a.sigma));
        }}},
      {"ks_critical",
       {"one-sample KS critical value for n samples at level alpha",
        [](const OracleArgs& a) {
          fmt::print("critical = {:.17g}\n", o::ks_critical(a.n, a.alpha));
        }}},
      {"harmonic",
       {"period and ground-state spread of a trap of frequency omega",
        [](const OracleArgs& a) {
          fmt::print("period = {:.17g}\n", o::harmonic_period(a.omega));
          fmt::print("width = {:.17g}\n", o::coherent_width(a.omega));
        }}},
      {"witness_peak",
       {"peak witness for a constant offset epsilon and multiplier spread s0",
        [](const OracleArgs& a) {
          fmt::print("peak = {:.17g}\n", o::witness_peak(a.epsilon, a.s0));
        }}},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weakflow: weak velocity measurement experiments"};
  app.set_version_flag("--version", weakflow::library_version());
  app.require_subcommand(1);

  std::string path;
  Overrides overrides;

  auto* run = app.add_subcommand("run", "Run a configuration and write its results");
  run->add_option("config", path, "Configuration file")->required();
  add_overrides(run, overrides);

  auto* validate = app.add_subcommand("validate", "Parse a configuration and list every violation");
  validate->add_option("config", path, "Configuration file")->required();
  bool echo = false;
  validate->add_flag("--echo", echo, "Print the canonical configuration");

  auto* sweep = app.add_subcommand(
      "sweep", "Run the [sweep] grid of a configuration, whatever its kind");
  sweep->add_option("config", path, "Configuration file")->required();
  add_overrides(sweep, overrides);

  auto* oracle = app.add_subcommand("oracle", "Print closed-form reference values");
  std::string oracle_name;
  OracleArgs args;
  oracle->add_option("name", oracle_name, "Oracle name, or 'list'")->required();
  oracle->add_option("--s0", args.s0, "Packet or multiplier spread");
  oracle->add_option("--t", args.t, "Time");
  oracle->add_option("--x", args.x, "Position");
  oracle->add_option("--epsilon", args.epsilon, "Constant offset");
  oracle->add_option("--sigma", args.sigma, "Pointer spread");
  oracle->add_option("--n", args.n, "Sample count");
  oracle->add_option("--alpha", args.alpha, "Significance level");
  oracle->add_option("--omega", args.omega, "Trap frequency");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  if (*oracle) {
    if (oracle_name == "list") {
      for (const auto& [name, entry] : oracles()) fmt::print("{:<18} {}\n", name, entry.first);
      return kPass;
    }
    const auto it = oracles().find(oracle_name);
    if (it == oracles().end()) {
      std::cerr << "unknown oracle '" << oracle_name << "'; try 'oracle list'\n";
      return kConfigError;
    }
    it->second.second(args);
    return kPass;
  }

  auto config = load(path);
  if (!config) return kConfigError;

  if (*validate) {
    if (echo) {
      std::cout << weakflow::config_echo(*config);
    } else {
      fmt::print("{}: valid {} configuration, hash {}\n", path, weakflow::to_string(config->kind),
                 weakflow::config_hash(*config));
    }
    return kPass;
  }
  if (*sweep && config->kind != weakflow::ExperimentKind::sweep) {
    config->kind = weakflow::ExperimentKind::sweep;
    config->checks = weakflow::default_checks(weakflow::ExperimentKind::sweep);
    if (config->sweep.deltas.empty()) config->sweep.deltas = {config->bin_width()};
    if (!overrides.out) config->output_dir += "_sweep";
  }
  return run_config(std::move(*config), overrides);
}
