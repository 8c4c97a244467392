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

// Periodic 1D grids, wave functions sampled on them, and the quantum flux.

#ifndef WEAKFLOW_GRID_HPP_
#define WEAKFLOW_GRID_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "weakflow/fft.hpp"

namespace weakflow {

/// Density floor below which velocities are not defined.
inline constexpr double kDefaultRhoMin = 1e-8;

/// Largest |psi| on the domain edge allowed for a physical state, relative
/// to the peak amplitude.
inline constexpr double kEdgeDecayLimit = 1e-10;

/// Physical constants of the particle. Natural units by default.
struct Units {
  double hbar = 1.0;
  double mass = 1.0;

  double hbar_over_mass() const { return hbar / mass; }
  bool operator==(const Units&) const = default;
};

/// Uniform periodic grid x_j = x_min + j dx, j = 0..n-1, wrapping at x_max.
class GridSpec {
 public:
  GridSpec() = default;

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  double length() const { return x_max_ - x_min_; }

  double x(std::size_t j) const { return x_min_ + static_cast<double>(j) * dx_; }
  std::vector<double> points() const;

  /// Index modulo n, accepting negative offsets.
  std::size_t wrap_index(std::ptrdiff_t j) const;
  /// Position mapped into [x_min, x_max).
  double wrap_position(double x) const;

  bool operator==(const GridSpec&) const = default;

 private:
  friend GridSpec make_grid(double x_min, double x_max, std::size_t n);

  double x_min_ = 0.0;
  double x_max_ = 0.0;
  std::size_t n_ = 0;
  double dx_ = 0.0;
};

/// Throws std::invalid_argument unless n >= 16 is a power of two and
/// x_max > x_min.
GridSpec make_grid(double x_min, double x_max, std::size_t n);

/// Complex amplitudes psi(x_j) on a grid.
class WaveFunction {
 public:
  WaveFunction() = default;
  WaveFunction(GridSpec grid, std::vector<Complex> amplitudes, Units units = {});

  const GridSpec& grid() const { return grid_; }
  const Units& units() const { return units_; }
  std::span<const Complex> amplitudes() const { return amp_; }
  const Complex& operator[](std::size_t j) const { return amp_[j]; }
  std::size_t size() const { return amp_.size(); }

  /// sum_j |psi_j|^2 dx
  double norm_squared() const;
  std::vector<double> density() const;

  /// Largest edge amplitude relative to the peak amplitude.
  double edge_ratio() const;

 private:
  GridSpec grid_;
  std::vector<Complex> amp_;
  Units units_;
};

/// Probability current and density on the grid.
struct FluxField {
  GridSpec grid;
  std::vector<double> j;
  std::vector<double> rho;
};

/// Normalized packet psi(x) ~ exp(-(x - x0)^2 / (4 s0^2) + i k0 x).
/// Rejects s0 <= 0 and packets whose edge amplitude exceeds kEdgeDecayLimit
/// of the peak.
WaveFunction gaussian_packet(const GridSpec& grid, double x0, double s0,
                             double k0, Units units = {});

/// Rescales to unit norm; pointwise phase is unchanged. Throws on zero norm.
WaveFunction normalize(const WaveFunction& psi);

/// a psi + b phi (same grid), not renormalized.
WaveFunction linear_combination(const WaveFunction& psi, Complex a,
                                const WaveFunction& phi, Complex b);

/// Pointwise product psi(x_j) f_j, not renormalized.
WaveFunction multiply(const WaveFunction& psi, std::span<const Complex> f);
WaveFunction multiply(const WaveFunction& psi, std::span<const double> f);

WaveFunction conjugate(const WaveFunction& psi);

/// Spectral derivative on the periodic grid (Nyquist mode dropped).
std::vector<Complex> spectral_derivative(const GridSpec& grid,
                                         std::span<const Complex> f);
std::vector<double> spectral_derivative(const GridSpec& grid,
                                        std::span<const double> f);

/// j = (hbar/m) Im(conj(psi) dpsi/dx) and rho = |psi|^2.
FluxField quantum_flux(const WaveFunction& psi);

/// Piecewise-linear cumulative distribution of a grid density on the
/// periodic domain. The density is taken constant on each cell
/// [x_j, x_j+1) at the mean of its two end values.
class GridCdf {
 public:
  GridCdf(const GridSpec& grid, std::span<const double> density);

  /// Probability of [x_min, x) for x wrapped into the domain.
  double operator()(double x) const;
  /// Inverse of operator() for q in [0, 1].
  double quantile(double q) const;

  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  std::vector<double> cumulative_;  // n + 1 node values, last == 1
};

/// Born-rule draws for one wave function; build once, draw many times.
class PositionSampler {
 public:
  explicit PositionSampler(const WaveFunction& psi);

  /// Position for a uniform variate u in [0, 1).
  double position(double u) const { return cdf_.quantile(u); }
  std::vector<double> draw(std::size_t count, std::uint64_t seed) const;

 private:
  GridCdf cdf_;
};

/// i.i.d. draws from |psi|^2 by inverse CDF; deterministic in `seed`.
std::vector<double> sample_positions(const WaveFunction& psi,
                                     std::size_t n_samples, std::uint64_t seed);

}  // namespace weakflow

#endif  // WEAKFLOW_GRID_HPP_
