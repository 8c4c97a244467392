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

#include "weakflow/trajectory.hpp"

#include <stdexcept>

#include "weakflow/parallel.hpp"

namespace weakflow {

FieldStages::FieldStages(const VelocityField& start, const VelocityField& mid,
                         const VelocityField& end)
    : fields_{&start, &mid, &end} {
  if (!(start.grid == mid.grid) || !(start.grid == end.grid)) {
    throw std::invalid_argument("FieldStages: fields live on different grids");
  }
}

const GridCdf& FieldStages::cdf(int stage) {
  auto& slot = cdfs_[static_cast<std::size_t>(stage)];
  if (!slot) {
    const auto& f = *fields_[static_cast<std::size_t>(stage)];
    slot.emplace(f.grid, f.rho);
  }
  return *slot;
}

static_assert(StageSource<FieldStages>);

std::optional<double> interpolate_field(const VelocityField& field, double x) {
  FieldStages stages(field, field, field);
  return interpolate_velocity(stages, 0, x);
}

StepResult advance_trajectory(double x, const VelocityLaw& law,
                              const WaveProvider& provider, double t0, double dt,
                              double rho_min) {
  if (!(dt > 0.0)) throw std::invalid_argument("advance_trajectory: dt <= 0");
  const auto start = velocity_field(law, provider(t0), rho_min);
  const auto mid = velocity_field(law, provider(t0 + 0.5 * dt), rho_min);
  const auto end = velocity_field(law, provider(t0 + dt), rho_min);
  FieldStages stages(start, mid, end);
  return advance_trajectory(x, law, stages, dt);
}

TransportResult transport_ensemble(std::span<const double> positions,
                                   const VelocityLaw& law, const WaveFunction& psi0,
                                   const Potential& potential, double duration,
                                   double dt, unsigned workers, double rho_min) {
  if (!(duration > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("transport_ensemble: duration and dt must be positive");
  }
  const auto steps = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(duration / dt - 1e-9)));
  const double h = duration / static_cast<double>(steps);
  const Propagator half_step(potential, 0.5 * h, psi0.units());

  TransportResult result;
  result.positions.assign(positions.begin(), positions.end());
  result.status.assign(positions.size(), StepStatus::ok);

  WaveFunction psi = psi0;
  VelocityField start = velocity_field(law, psi, rho_min);
  for (std::size_t s = 0; s < steps; ++s) {
    const WaveFunction psi_mid = half_step.step(psi);
    psi = half_step.step(psi_mid);
    const VelocityField mid = velocity_field(law, psi_mid, rho_min);
    VelocityField end = velocity_field(law, psi, rho_min);
    FieldStages stages(start, mid, end);
    // Quantile steps read the CDFs; build them before the workers share `stages`.
    if (law.kind == LawKind::variant) {
      stages.cdf(0);
      stages.cdf(2);
    }
    parallel_for(result.positions.size(), workers, [&](std::size_t i) {
      if (result.status[i] == StepStatus::censored) return;
      const auto r = advance_trajectory(result.positions[i], law, stages, h);
      result.positions[i] = r.x;
      if (r.status != StepStatus::ok) result.status[i] = r.status;
    });
    start = std::move(end);
  }
  for (auto st : result.status) {
    if (st == StepStatus::censored) ++result.censored;
    if (st == StepStatus::quantile) ++result.rerouted;
  }
  result.final_state = std::move(psi);
  return result;
}

}  // namespace weakflow
