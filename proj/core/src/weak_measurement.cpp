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

#include "weakflow/weak_measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "weakflow/rng.hpp"

namespace weakflow {
namespace {

void check_sigma(const PointerModel& pointer) {
  if (!(pointer.sigma > 0.0) || !std::isfinite(pointer.sigma)) {
    throw std::invalid_argument("PointerModel: sigma must be positive");
  }
}

// P(N(0,1) <= u)
double normal_cdf(double u) { return 0.5 * std::erfc(-u / std::numbers::sqrt2); }

// Band-limited interpolant of grid values at an arbitrary position.
Complex interpolate_spectral(const GridSpec& grid, std::span<const Complex> spectrum,
                             double x) {
  const std::size_t n = grid.size();
  const double s = grid.wrap_position(x) - grid.x_min();
  const double base = 2.0 * std::numbers::pi / grid.length();
  Complex sum = spectrum[0];
  for (std::size_t m = 1; m < n / 2; ++m) {
    const double phase = base * static_cast<double>(m) * s;
    sum += spectrum[m] * std::polar(1.0, phase) + spectrum[n - m] * std::polar(1.0, -phase);
  }
  sum += spectrum[n / 2] * std::cos(base * static_cast<double>(n / 2) * s);
  return sum / static_cast<double>(n);
}

WaveFunction position_times(const WaveFunction& psi) {
  const auto x = psi.grid().points();
  return multiply(psi, std::span<const double>(x));
}

}  // namespace

double PointerModel::amplitude(double y) const {
  check_sigma(*this);
  return std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25) *
         std::exp(-y * y / (4.0 * sigma * sigma));
}

double PointerModel::density(double y) const {
  const double a = amplitude(y);
  return a * a;
}

double sample_pointer(const PointerModel& pointer, double x, std::uint64_t seed) {
  check_sigma(pointer);
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  return x + pointer.sigma * noise(rng);
}

WaveFunction conditional_wavefunction(const WaveFunction& psi, double y,
                                      const PointerModel& pointer) {
  check_sigma(pointer);
  const auto& grid = psi.grid();
  std::vector<double> phi(grid.size());
  for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = pointer.amplitude(y - grid.x(j));
  const auto product = multiply(psi, std::span<const double>(phi));
  const double norm = product.norm_squared();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::domain_error("conditional_wavefunction: pointer reading has no overlap "
                            "with the wave function on the grid");
  }
  return normalize(product);
}

double PointerMarginal::integral() const {
  double s = 0.0;
  for (double d : density) s += d;
  return s * dy;
}

double PointerMarginal::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * density[i];
  return s * dy / integral();
}

PointerMarginal pointer_marginal(const WaveFunction& psi, const PointerModel& pointer) {
  check_sigma(pointer);
  const auto& grid = psi.grid();
  const auto rho = psi.density();
  const double peak = *std::max_element(rho.begin(), rho.end());
  if (!(peak > 0.0)) throw std::invalid_argument("pointer_marginal: zero wave function");
  const double floor = 1e-18 * peak;
  std::size_t lo = 0;
  while (rho[lo] <= floor) ++lo;
  std::size_t hi = rho.size() - 1;
  while (rho[hi] <= floor) --hi;

  const double sigma = pointer.sigma;
  const double dx = grid.dx();
  const double pad = 8.0 * sigma;
  const auto pad_cells = static_cast<std::ptrdiff_t>(std::ceil(pad / dx));
  const std::ptrdiff_t first = static_cast<std::ptrdiff_t>(lo) - pad_cells;
  const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(hi) + pad_cells;

  PointerMarginal out;
  out.dy = dx;
  const auto count = static_cast<std::size_t>(last - first + 1);
  out.y.resize(count);
  out.density.assign(count, 0.0);
  const bool resolved = sigma >= 2.0 * dx;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t i = 0; i < count; ++i) {
    const double y = grid.x_min() + static_cast<double>(first + static_cast<std::ptrdiff_t>(i)) * dx;
    out.y[i] = y;
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) {
      const double u = y - grid.x(j);
      if (resolved) {
        acc += rho[j] * norm * std::exp(-0.5 * u * u / (sigma * sigma)) * dx;
      } else {
        acc += rho[j] * (normal_cdf((u + 0.5 * dx) / sigma) - normal_cdf((u - 0.5 * dx) / sigma));
      }
    }
    out.density[i] = acc;
  }
  return out;
}

std::optional<double> analytic_weak_value_velocity(const WaveFunction& psi,
                                                   const Potential& potential,
                                                   double tau, double x,
                                                   double rho_min) {
  if (!(tau > 0.0)) throw std::invalid_argument("analytic_weak_value_velocity: tau <= 0");
  const double dt_max = std::min(tau, 1e-3);
  const auto post = evolve_for(psi, potential, tau, dt_max);
  const auto moved = evolve_for(position_times(psi), potential, tau, dt_max);
  const auto& grid = psi.grid();
  const Fft fft(grid.size());
  std::vector<Complex> a(grid.size()), b(grid.size());
  fft.forward(post.amplitudes(), a);
  fft.forward(moved.amplitudes(), b);
  const Complex den = interpolate_spectral(grid, a, x);
  if (std::norm(den) < rho_min) return std::nullopt;
  const Complex num = interpolate_spectral(grid, b, x);
  return (x - std::real(num / den)) / tau;
}

VelocityField weak_value_field(const WaveFunction& psi, const Potential& potential,
                               double tau, double rho_min) {
  if (!(tau > 0.0)) throw std::invalid_argument("weak_value_field: tau <= 0");
  const double dt_max = std::min(tau, 1e-3);
  const auto post = evolve_for(psi, potential, tau, dt_max);
  const auto moved = evolve_for(position_times(psi), potential, tau, dt_max);
  const auto& grid = psi.grid();
  VelocityField field{grid, std::vector<double>(grid.size(), 0.0), post.density(),
                      std::vector<bool>(grid.size(), false)};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!(field.rho[j] >= rho_min) || field.rho[j] == 0.0) continue;
    field.v[j] = (grid.x(j) - std::real(moved[j] / post[j])) / tau;
    field.valid[j] = true;
  }
  return field;
}

VelocityField extrapolated_weak_value_field(const WaveFunction& psi,
                                            const Potential& potential, double tau,
                                            double rho_min) {
  const auto coarse = weak_value_field(psi, potential, tau, rho_min);
  const auto half = weak_value_field(psi, potential, 0.5 * tau, rho_min);
  const auto quarter = weak_value_field(psi, potential, 0.25 * tau, rho_min);
  VelocityField out = quarter;
  for (std::size_t j = 0; j < out.v.size(); ++j) {
    out.valid[j] = coarse.valid[j] && half.valid[j] && quarter.valid[j];
    out.v[j] = out.valid[j] ? (8.0 * quarter.v[j] - 6.0 * half.v[j] + coarse.v[j]) / 3.0
                            : 0.0;
  }
  return out;
}

}  // namespace weakflow
