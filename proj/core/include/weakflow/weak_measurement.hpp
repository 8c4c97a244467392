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

// Weak position measurement with a Gaussian pointer, the two-time protocol
// (weak reading at 0, strong reading at tau), and the weak-value velocity.

#ifndef WEAKFLOW_WEAK_MEASUREMENT_HPP_
#define WEAKFLOW_WEAK_MEASUREMENT_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "weakflow/dynamics.hpp"

namespace weakflow {

/// Real, even Gaussian pointer packet of spread sigma:
/// Phi(y) = (2 pi sigma^2)^(-1/4) exp(-y^2 / (4 sigma^2)).
struct PointerModel {
  double sigma = 1.0;

  double amplitude(double y) const;
  /// |Phi(y)|^2, a normal density with standard deviation sigma.
  double density(double y) const;
};

/// Pointer reading for a particle at x: x + sigma * N(0, 1), seeded.
double sample_pointer(const PointerModel& pointer, double x, std::uint64_t seed);

/// psi(x) Phi(y - x), renormalized. Throws std::domain_error when the product
/// vanishes on the grid.
WaveFunction conditional_wavefunction(const WaveFunction& psi, double y,
                                      const PointerModel& pointer);

/// Density of the pointer reading on a uniform y-grid.
struct PointerMarginal {
  std::vector<double> y;
  std::vector<double> density;
  double dy = 0.0;

  double integral() const;
  double mean() const;
};

/// rho^Y(y) = integral |psi(x)|^2 |Phi(y - x)|^2 dx on a grid of spacing dx
/// that covers the support of psi widened by 8 sigma on each side. A pointer
/// narrower than the grid is averaged over each cell.
PointerMarginal pointer_marginal(const WaveFunction& psi, const PointerModel& pointer);

/// One protocol run. `x_tau` is empty for a censored run.
struct WeakRunRecord {
  double y = 0.0;
  std::optional<double> x_tau;
  double x0 = 0.0;             // Born draw before the weak coupling
  bool rerouted = false;       // a step was completed by quantile transport
  std::uint64_t trajectory_seed = 0;

  bool censored() const { return !x_tau.has_value(); }
  bool operator==(const WeakRunRecord&) const = default;
};

struct ProtocolConfig {
  WaveFunction psi0;
  Potential potential;
  VelocityLaw law;
  PointerModel pointer;
  double tau = 0.05;
  std::size_t n_runs = 1;
  std::uint64_t master_seed = 0;
};

struct ProtocolOptions {
  std::size_t trajectory_steps = 50;  // RK4 steps over [0, tau]
  double rho_min = kDefaultRhoMin;
  double censor_bound = 0.01;         // largest tolerated censored fraction
  unsigned workers = 0;               // 0: resolve_workers()
  /// For a free potential, evaluate the evolved state only at the grid nodes
  /// a trajectory touches instead of propagating the whole grid.
  bool spectral_fast_path = true;
};

/// Thrown by run_protocol when too many runs are censored. Carries the
/// records so callers can still inspect them.
class CensoringError : public std::runtime_error {
 public:
  CensoringError(double fraction, double bound, std::vector<WeakRunRecord> records);
  double fraction() const { return fraction_; }
  const std::vector<WeakRunRecord>& records() const { return records_; }

 private:
  double fraction_;
  std::vector<WeakRunRecord> records_;
};

/// Runs the protocol n_runs times. Run i uses seed derive_seed(master_seed, i):
/// X0 is drawn from |psi0|^2 with sub-seed 0, Y from the pointer with sub-seed
/// 1, then X moves for a time tau under the law's velocity field of the
/// conditional state psi_Y while psi_Y evolves under the potential. Records
/// are ordered by run index and do not depend on the worker count.
std::vector<WeakRunRecord> run_protocol(const ProtocolConfig& config,
                                        const ProtocolOptions& options = {});

double censored_fraction(std::span<const WeakRunRecord> records);

/// tau^-1 [x - Re(<x|U(tau) X|psi> / <x|U(tau)|psi>)] at one position, using
/// band-limited interpolation between grid nodes. Empty when
/// |<x|U(tau)|psi>|^2 < rho_min.
std::optional<double> analytic_weak_value_velocity(const WaveFunction& psi,
                                                   const Potential& potential,
                                                   double tau, double x,
                                                   double rho_min = kDefaultRhoMin);

/// The same quantity at every grid node.
VelocityField weak_value_field(const WaveFunction& psi, const Potential& potential,
                               double tau, double rho_min = kDefaultRhoMin);

/// Three-level Richardson extrapolation to tau -> 0 from tau, tau/2, tau/4:
/// (8 v(tau/4) - 6 v(tau/2) + v(tau)) / 3, removing the O(tau) and O(tau^2)
/// terms. Valid where all three levels are valid.
VelocityField extrapolated_weak_value_field(const WaveFunction& psi,
                                            const Potential& potential, double tau,
                                            double rho_min = kDefaultRhoMin);

}  // namespace weakflow

#endif  // WEAKFLOW_WEAK_MEASUREMENT_HPP_
