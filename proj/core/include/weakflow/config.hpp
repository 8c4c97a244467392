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

// Experiment configuration files: INI-style sections of `key = value`
// lines. The schema is documented in docs/config.md.

#ifndef WEAKFLOW_CONFIG_HPP_
#define WEAKFLOW_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "weakflow/dynamics.hpp"
#include "weakflow/statistics.hpp"

namespace weakflow {

enum class ExperimentKind { weak_velocity, analytic_wv, sweep, characterize, equivariance };

std::string to_string(ExperimentKind kind);

struct GridParams {
  double x_min = -20.0;
  double x_max = 20.0;
  std::size_t n = 1024;
};

struct PotentialParams {
  PotentialKind kind = PotentialKind::free;
  double omega = 1.0;
  double center = 0.0;
  double height = 1.0;
  double width = 1.0;
};

enum class StateKind { gaussian, superposition, coherent };

/// A Gaussian packet, a superposition of packets, or a coherent state of a
/// harmonic potential, optionally evolved for `prepare_time`.
struct StateParams {
  StateKind kind = StateKind::gaussian;
  std::vector<double> x0{0.0};
  std::vector<double> s0{1.0};
  std::vector<double> k0{0.0};
  std::vector<double> weights{1.0};
  double omega = 1.0;  // coherent only; width is the ground-state width
  double prepare_time = 0.0;
  std::string potential;  // name of a [potential.NAME] section; empty: [potential]
};

struct ProtocolParams {
  double sigma = 10.0;
  double tau = 0.05;
  std::size_t n_runs = 20000;
  std::optional<double> bin_width;  // default 4 dx
  std::size_t n_min = kDefaultMinBinCount;
  double censor_bound = 0.01;
  std::size_t trajectory_steps = 50;
  EstimatorLocation location = EstimatorLocation::mean_position;
  bool spectral_fast_path = true;
};

/// Tolerances and switches of the weak_velocity and sweep checks.
struct CheckParams {
  double stat_factor = 4.0;
  double relative_floor = 0.05;
  std::size_t min_reliable_bins = 10;
  double central_fraction = 0.1;
  double separation_threshold = 0.15;
  std::vector<double> sweep_taus;
  std::optional<std::size_t> sweep_runs;
  double ks_alpha = 0.01;
  std::size_t ks_min_count = 1000;
  double mean_factor = 4.0;
  double slope = 1.0;
  double slope_tolerance = 0.3;
};

struct SweepParams {
  std::vector<double> sigmas{10.0};
  std::vector<double> taus{0.1, 0.05, 0.025};
  std::vector<double> deltas;  // empty: the protocol bin width
};

struct CharacterizeParams {
  std::vector<double> sigmas{5.0, 10.0, 20.0};
  std::vector<double> offsets{-1.0, 0.0, 1.0};  // in units of sigma
  double bulk_fraction = 0.1;
  double invariance_tolerance = 1e-10;
  double slope = 1.0;
  double slope_tolerance = 0.3;
  double witness_spread = 1.0;
  std::vector<double> witness_offsets;  // default -12..12 in unit steps
  double witness_fraction = 0.9;
  double constant_tolerance = 1e-12;
  double residual_dt = 1e-4;
};

struct EquivarianceParams {
  std::vector<VelocityLaw> laws;  // default: bohmian and the configured law
  std::size_t n_samples = 100000;
  double duration = 1.0;
  double residual_dt = 1e-4;
  double residual_tolerance = 1e-6;
  double ks_alpha = 0.01;
};

struct AnalyticParams {
  std::vector<std::string> states;  // default: the unnamed state
  double tau = 4e-4;
  double tolerance = 1e-4;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentKind kind = ExperimentKind::weak_velocity;
  std::vector<std::string> checks;  // empty: default_checks(kind)
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::string output_dir;  // default results/<name>

  GridParams grid;
  Units units;
  std::map<std::string, PotentialParams> potentials;  // "" is [potential]
  std::map<std::string, StateParams> states;          // "" is [state]
  VelocityLaw law;
  double dt = 1e-3;
  double rho_min = kDefaultRhoMin;
  ProtocolParams protocol;
  CheckParams check;
  SweepParams sweep;
  CharacterizeParams characterize;
  EquivarianceParams equivariance;
  AnalyticParams analytic;

  GridSpec grid_spec() const;
  Potential potential(const std::string& name = "") const;
  /// Prepared state: the packet, then prepare_time of evolution.
  WaveFunction state(const std::string& name = "") const;
  double bin_width() const;
  bool wants(const std::string& check_id) const;
};

/// All violations found in a configuration, one message each.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source = "<text>");

/// Canonical text of a parsed configuration with every default spelled out.
/// Parsing it yields the same configuration.
std::string config_echo(const ExperimentConfig& config);

/// 64-bit FNV-1a of config_echo, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Check ids available for an experiment kind, in evaluation order.
std::vector<std::string> known_checks(ExperimentKind kind);
/// Checks run when a configuration names none.
std::vector<std::string> default_checks(ExperimentKind kind);

}  // namespace weakflow

#endif  // WEAKFLOW_CONFIG_HPP_
