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

#include "weakflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace weakflow {

Potential::Potential(GridSpec grid, PotentialKind kind, std::vector<double> v,
                     std::string description)
    : grid_(grid), kind_(kind), v_(std::move(v)), description_(std::move(description)) {
  for (double x : v_) {
    if (!std::isfinite(x)) throw std::invalid_argument("Potential: non-finite value");
  }
}

bool Potential::is_free() const {
  return std::all_of(v_.begin(), v_.end(), [](double x) { return x == 0.0; });
}

std::string Potential::describe() const { return description_; }

Potential free_potential(const GridSpec& grid) {
  return Potential(grid, PotentialKind::free, std::vector<double>(grid.size(), 0.0),
                   "free");
}

Potential harmonic_potential(const GridSpec& grid, double omega, double center,
                             double mass) {
  if (!(omega > 0.0)) throw std::invalid_argument("harmonic_potential: omega <= 0");
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double d = grid.x(j) - center;
    v[j] = 0.5 * mass * omega * omega * d * d;
  }
  std::ostringstream os;
  os << "harmonic(omega=" << omega << ", center=" << center << ")";
  return Potential(grid, PotentialKind::harmonic, std::move(v), os.str());
}

Potential gaussian_barrier(const GridSpec& grid, double height, double width,
                           double center) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_barrier: width <= 0");
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double u = (grid.x(j) - center) / width;
    v[j] = height * std::exp(-0.5 * u * u);
  }
  std::ostringstream os;
  os << "gaussian_barrier(height=" << height << ", width=" << width
     << ", center=" << center << ")";
  return Potential(grid, PotentialKind::gaussian_barrier, std::move(v), os.str());
}

double VelocityLaw::offset_current(double x) const {
  switch (kind) {
    case LawKind::bohmian: return 0.0;
    case LawKind::variant: return epsilon;
    case LawKind::linear_offset: return epsilon * x;
  }
  return 0.0;
}

double VelocityLaw::offset_divergence(double) const {
  return kind == LawKind::linear_offset ? epsilon : 0.0;
}

std::string VelocityLaw::name() const {
  std::ostringstream os;
  switch (kind) {
    case LawKind::bohmian: return "bohmian";
    case LawKind::variant: os << "variant(epsilon=" << epsilon << ")"; break;
    case LawKind::linear_offset: os << "linear_offset(epsilon=" << epsilon << ")"; break;
  }
  return os.str();
}

VelocityField velocity_field(const VelocityLaw& law, const WaveFunction& psi,
                             double rho_min) {
  const auto flux = quantum_flux(psi);
  const auto& grid = psi.grid();
  VelocityField field{grid, std::vector<double>(grid.size(), 0.0), flux.rho,
                      std::vector<bool>(grid.size(), false)};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (flux.rho[j] >= rho_min && flux.rho[j] > 0.0) {
      field.v[j] = (flux.j[j] + law.offset_current(grid.x(j))) / flux.rho[j];
      field.valid[j] = true;
    }
  }
  return field;
}

Propagator::Propagator(const Potential& potential, double dt, Units units)
    : grid_(potential.grid()),
      units_(units),
      dt_(dt),
      free_(potential.is_free()),
      fft_(potential.grid().size()),
      half_kick_(potential.grid().size()),
      drift_(potential.grid().size()) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("Propagator: dt must be positive");
  }
  for (std::size_t j = 0; j < half_kick_.size(); ++j) {
    half_kick_[j] = std::polar(1.0, -0.5 * potential[j] * dt / units.hbar);
  }
  const auto k = wavenumbers(grid_.size(), grid_.length());
  const double c = units.hbar / (2.0 * units.mass);
  for (std::size_t m = 0; m < drift_.size(); ++m) {
    drift_[m] = std::polar(1.0, -c * k[m] * k[m] * dt);
  }
}

void Propagator::step_in_place(std::vector<Complex>& amp) const {
  if (!free_) {
    for (std::size_t j = 0; j < amp.size(); ++j) amp[j] *= half_kick_[j];
  }
  fft_.forward(amp, amp);
  for (std::size_t m = 0; m < amp.size(); ++m) amp[m] *= drift_[m];
  fft_.inverse(amp, amp);
  if (!free_) {
    for (std::size_t j = 0; j < amp.size(); ++j) amp[j] *= half_kick_[j];
  }
}

WaveFunction Propagator::step(const WaveFunction& psi) const { return advance(psi, 1); }

WaveFunction Propagator::advance(const WaveFunction& psi, std::size_t count) const {
  if (!(psi.grid() == grid_)) {
    throw std::invalid_argument("Propagator: wave function lives on another grid");
  }
  std::vector<Complex> amp(psi.amplitudes().begin(), psi.amplitudes().end());
  for (std::size_t s = 0; s < count; ++s) step_in_place(amp);
  return WaveFunction(grid_, std::move(amp), psi.units());
}

WaveFunction evolve(const WaveFunction& psi, const Potential& potential, double dt) {
  return Propagator(potential, dt, psi.units()).step(psi);
}

WaveFunction evolve_for(const WaveFunction& psi, const Potential& potential,
                        double duration, double dt_max) {
  if (duration == 0.0) return psi;
  if (!(duration > 0.0) || !(dt_max > 0.0)) {
    throw std::invalid_argument("evolve_for: duration and dt_max must be positive");
  }
  const auto steps = static_cast<std::size_t>(std::ceil(duration / dt_max - 1e-9));
  const std::size_t count = std::max<std::size_t>(steps, 1);
  return Propagator(potential, duration / static_cast<double>(count), psi.units())
      .advance(psi, count);
}

ContinuityReport continuity_residual(const WaveFunction& psi,
                                     const Potential& potential,
                                     const VelocityLaw& law, double dt,
                                     double rho_min, double tolerance) {
  const Propagator prop(potential, dt, psi.units());
  const auto mid = prop.step(psi);
  const auto late = prop.step(mid);
  const auto rho_early = psi.density();
  const auto rho_late = late.density();
  const auto flux = quantum_flux(mid);
  const auto& grid = psi.grid();
  const auto div_j = spectral_derivative(grid, std::span<const double>(flux.j));

  ContinuityReport report;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!(flux.rho[j] >= rho_min)) continue;
    const double drho_dt = (rho_late[j] - rho_early[j]) / (2.0 * dt);
    const double div = div_j[j] + law.offset_divergence(grid.x(j));
    report.max_abs_residual = std::max(report.max_abs_residual, std::abs(drho_dt + div));
  }
  report.flagged = report.max_abs_residual > tolerance;
  return report;
}

}  // namespace weakflow
