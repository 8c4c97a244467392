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

#include "weakflow/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace weakflow {

std::vector<double> GridSpec::points() const {
  std::vector<double> xs(n_);
  for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
  return xs;
}

std::size_t GridSpec::wrap_index(std::ptrdiff_t j) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  auto r = j % n;
  if (r < 0) r += n;
  return static_cast<std::size_t>(r);
}

double GridSpec::wrap_position(double x) const {
  const double len = length();
  double r = std::fmod(x - x_min_, len);
  if (r < 0.0) r += len;
  if (r >= len) r = 0.0;
  return x_min_ + r;
}

GridSpec make_grid(double x_min, double x_max, std::size_t n) {
  if (!(std::isfinite(x_min) && std::isfinite(x_max)) || !(x_max > x_min)) {
    throw std::invalid_argument("make_grid: need x_max > x_min, got [" +
                                std::to_string(x_min) + ", " +
                                std::to_string(x_max) + "]");
  }
  if (n < 16 || !std::has_single_bit(n)) {
    throw std::invalid_argument(
        "make_grid: point count must be a power of two >= 16, got " +
        std::to_string(n));
  }
  GridSpec g;
  g.x_min_ = x_min;
  g.x_max_ = x_max;
  g.n_ = n;
  g.dx_ = (x_max - x_min) / static_cast<double>(n);
  return g;
}

WaveFunction::WaveFunction(GridSpec grid, std::vector<Complex> amplitudes,
                           Units units)
    : grid_(grid), amp_(std::move(amplitudes)), units_(units) {
  if (amp_.size() != grid_.size()) {
    throw std::invalid_argument("WaveFunction: amplitude count != grid size");
  }
}

double WaveFunction::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return s * grid_.dx();
}

std::vector<double> WaveFunction::density() const {
  std::vector<double> rho(amp_.size());
  std::transform(amp_.begin(), amp_.end(), rho.begin(),
                 [](const Complex& a) { return std::norm(a); });
  return rho;
}

double WaveFunction::edge_ratio() const {
  double peak = 0.0;
  for (const auto& a : amp_) peak = std::max(peak, std::abs(a));
  if (peak == 0.0) return 0.0;
  // The periodic seam sits between the last and the first sample.
  return std::max(std::abs(amp_.front()), std::abs(amp_.back())) / peak;
}

WaveFunction gaussian_packet(const GridSpec& grid, double x0, double s0,
                             double k0, Units units) {
  if (!(s0 > 0.0)) {
    throw std::invalid_argument("gaussian_packet: width s0 must be positive");
  }
  auto envelope = [&](double x) {
    const double u = (x - x0) / s0;
    return std::exp(-0.25 * u * u);
  };
  const double edge = std::max(envelope(grid.x_min()), envelope(grid.x_max()));
  if (edge > kEdgeDecayLimit) {
    throw std::invalid_argument(
        "gaussian_packet: packet does not decay at the domain edge (edge/peak = " +
        std::to_string(edge) + ")");
  }
  std::vector<Complex> amp(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    amp[j] = std::polar(envelope(x), k0 * x);
  }
  return normalize(WaveFunction(grid, std::move(amp), units));
}

WaveFunction normalize(const WaveFunction& psi) {
  const double norm2 = psi.norm_squared();
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw std::invalid_argument("normalize: wave function has zero norm");
  }
  const double scale = 1.0 / std::sqrt(norm2);
  std::vector<Complex> amp(psi.amplitudes().begin(), psi.amplitudes().end());
  for (auto& a : amp) a *= scale;
  return WaveFunction(psi.grid(), std::move(amp), psi.units());
}

WaveFunction linear_combination(const WaveFunction& psi, Complex a,
                                const WaveFunction& phi, Complex b) {
  if (!(psi.grid() == phi.grid())) {
    throw std::invalid_argument("linear_combination: grids differ");
  }
  std::vector<Complex> amp(psi.size());
  for (std::size_t j = 0; j < amp.size(); ++j) amp[j] = a * psi[j] + b * phi[j];
  return WaveFunction(psi.grid(), std::move(amp), psi.units());
}

WaveFunction multiply(const WaveFunction& psi, std::span<const Complex> f) {
  if (f.size() != psi.size()) {
    throw std::invalid_argument("multiply: multiplier length != grid size");
  }
  std::vector<Complex> amp(psi.size());
  for (std::size_t j = 0; j < amp.size(); ++j) amp[j] = psi[j] * f[j];
  return WaveFunction(psi.grid(), std::move(amp), psi.units());
}

WaveFunction multiply(const WaveFunction& psi, std::span<const double> f) {
  if (f.size() != psi.size()) {
    throw std::invalid_argument("multiply: multiplier length != grid size");
  }
  std::vector<Complex> amp(psi.size());
  for (std::size_t j = 0; j < amp.size(); ++j) amp[j] = psi[j] * f[j];
  return WaveFunction(psi.grid(), std::move(amp), psi.units());
}

WaveFunction conjugate(const WaveFunction& psi) {
  std::vector<Complex> amp(psi.size());
  for (std::size_t j = 0; j < amp.size(); ++j) amp[j] = std::conj(psi[j]);
  return WaveFunction(psi.grid(), std::move(amp), psi.units());
}

std::vector<Complex> spectral_derivative(const GridSpec& grid,
                                         std::span<const Complex> f) {
  const std::size_t n = grid.size();
  if (f.size() != n) {
    throw std::invalid_argument("spectral_derivative: length != grid size");
  }
  const Fft fft(n);
  std::vector<Complex> spec(n);
  fft.forward(f, spec);
  const auto k = wavenumbers(n, grid.length());
  for (std::size_t m = 0; m < n; ++m) spec[m] *= Complex(0.0, k[m]);
  spec[n / 2] = 0.0;
  fft.inverse(spec, spec);
  return spec;
}

std::vector<double> spectral_derivative(const GridSpec& grid,
                                        std::span<const double> f) {
  std::vector<Complex> c(f.begin(), f.end());
  const auto d = spectral_derivative(grid, std::span<const Complex>(c));
  std::vector<double> out(d.size());
  std::transform(d.begin(), d.end(), out.begin(),
                 [](const Complex& z) { return z.real(); });
  return out;
}

FluxField quantum_flux(const WaveFunction& psi) {
  const auto dpsi = spectral_derivative(psi.grid(), psi.amplitudes());
  const double prefactor = psi.units().hbar_over_mass();
  FluxField flux{psi.grid(), std::vector<double>(psi.size()), psi.density()};
  for (std::size_t j = 0; j < psi.size(); ++j) {
    flux.j[j] = prefactor * std::imag(std::conj(psi[j]) * dpsi[j]);
  }
  return flux;
}

}  // namespace weakflow
