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

// Integration of X'(t) = v^psi(X(t), t).
//
// A step is classical RK4 with the velocity field at the three stage times
// t0, t0 + dt/2 and t0 + dt, cubic-interpolated between grid nodes. When the
// step is not resolved (a stage lands where the density is below the floor,
// or moves the particle by more than a grid cell) the step is finished by
// quantile transport if the law's current differs from the Bohmian one by a
// constant, and censored otherwise.
//
// Quantile transport: in 1D the probability to the left of a particle,
// q = F_t(X(t)) with F_t measured from the domain edge, obeys
// dq/dt = j_law(X) - j_B(X) + j_B(x_min). The last term vanishes to
// edge-decay precision, so q advances by epsilon * dt (modulo 1 on the
// periodic domain) and X(t0 + dt) = F_{t0+dt}^{-1}(q).

#ifndef WEAKFLOW_TRAJECTORY_HPP_
#define WEAKFLOW_TRAJECTORY_HPP_

#include <array>
#include <cmath>
#include <concepts>
#include <functional>
#include <optional>

#include "weakflow/dynamics.hpp"

namespace weakflow {

/// Velocity of a law at one grid node; `valid` is false below the floor.
struct NodeVelocity {
  double v = 0.0;
  bool valid = false;
};

/// Supplies the law's velocity at the three stage times of one RK4 step
/// (stage 0: t0, 1: t0 + dt/2, 2: t0 + dt).
template <class S>
concept StageSource = requires(S& s, int stage, std::size_t j) {
  { s.grid() } -> std::convertible_to<const GridSpec&>;
  { s.node(stage, j) } -> std::convertible_to<NodeVelocity>;
  { s.cdf(stage) } -> std::convertible_to<const GridCdf&>;
};

/// Cubic Lagrange interpolation through nodes j-1..j+2 around x.
/// Empty when any of the four nodes is masked.
template <StageSource S>
std::optional<double> interpolate_velocity(S& source, int stage, double x) {
  const GridSpec& grid = source.grid();
  const double s = (grid.wrap_position(x) - grid.x_min()) / grid.dx();
  const auto j = static_cast<std::ptrdiff_t>(std::floor(s));
  const double f = s - static_cast<double>(j);
  const std::array<double, 4> w{
      -f * (f - 1.0) * (f - 2.0) / 6.0,
      (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
      -(f + 1.0) * f * (f - 2.0) / 2.0,
      (f + 1.0) * f * (f - 1.0) / 6.0,
  };
  double v = 0.0;
  for (std::ptrdiff_t o = -1; o <= 2; ++o) {
    const NodeVelocity node = source.node(stage, grid.wrap_index(j + o));
    if (!node.valid) return std::nullopt;
    v += w[static_cast<std::size_t>(o + 1)] * node.v;
  }
  return v;
}

enum class StepStatus { ok, quantile, censored };

struct StepResult {
  double x = 0.0;
  StepStatus status = StepStatus::ok;
};

/// Position after one step of length dt; see the file comment.
template <StageSource S>
StepResult advance_trajectory(double x, const VelocityLaw& law, S& source, double dt) {
  const GridSpec& grid = source.grid();
  const double max_move = grid.dx();
  bool resolved = true;
  auto stage_velocity = [&](int stage, double at) {
    const auto v = interpolate_velocity(source, stage, at);
    if (!v || std::abs(*v) * dt > max_move) {
      resolved = false;
      return 0.0;
    }
    return *v;
  };
  const double k1 = stage_velocity(0, x);
  const double k2 = resolved ? stage_velocity(1, x + 0.5 * dt * k1) : 0.0;
  const double k3 = resolved ? stage_velocity(1, x + 0.5 * dt * k2) : 0.0;
  const double k4 = resolved ? stage_velocity(2, x + dt * k3) : 0.0;
  if (resolved) {
    return {grid.wrap_position(x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)),
            StepStatus::ok};
  }
  if (law.kind != LawKind::variant || law.epsilon == 0.0) {
    return {x, StepStatus::censored};
  }
  double q = source.cdf(0)(x) + law.epsilon * dt;
  q -= std::floor(q);
  return {source.cdf(2).quantile(q), StepStatus::quantile};
}

/// Stage source over three precomputed velocity fields.
class FieldStages {
 public:
  FieldStages(const VelocityField& start, const VelocityField& mid,
              const VelocityField& end);

  const GridSpec& grid() const { return fields_[0]->grid; }
  NodeVelocity node(int stage, std::size_t j) const {
    const auto& f = *fields_[static_cast<std::size_t>(stage)];
    return {f.v[j], f.valid[j]};
  }
  const GridCdf& cdf(int stage);

 private:
  std::array<const VelocityField*, 3> fields_;
  std::array<std::optional<GridCdf>, 3> cdfs_;
};

/// Cubic interpolation of a single velocity field at x; empty where masked.
std::optional<double> interpolate_field(const VelocityField& field, double x);

/// Time-indexed wave function source: returns psi at time t.
using WaveProvider = std::function<WaveFunction(double)>;

/// One step from t0 to t0 + dt with fields built from provider(t0),
/// provider(t0 + dt/2) and provider(t0 + dt).
StepResult advance_trajectory(double x, const VelocityLaw& law,
                              const WaveProvider& provider, double t0, double dt,
                              double rho_min = kDefaultRhoMin);

struct TransportResult {
  std::vector<double> positions;
  std::vector<StepStatus> status;  // censored, else quantile if any step was
  WaveFunction final_state;
  std::size_t censored = 0;
  std::size_t rerouted = 0;  // particles that took at least one quantile step
};

/// Moves an ensemble from t = 0 to `duration` under `law`, with psi
/// propagated alongside by split-operator steps of dt/2. Velocity fields are
/// shared by all particles; particle updates run on `workers` threads and do
/// not depend on the worker count.
TransportResult transport_ensemble(std::span<const double> positions,
                                   const VelocityLaw& law, const WaveFunction& psi0,
                                   const Potential& potential, double duration,
                                   double dt, unsigned workers = 1,
                                   double rho_min = kDefaultRhoMin);

}  // namespace weakflow

#endif  // WEAKFLOW_TRAJECTORY_HPP_
