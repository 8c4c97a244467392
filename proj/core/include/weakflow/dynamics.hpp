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

// Schroedinger evolution and the velocity laws that move particles along it.

#ifndef WEAKFLOW_DYNAMICS_HPP_
#define WEAKFLOW_DYNAMICS_HPP_

#include <string>
#include <vector>

#include "weakflow/grid.hpp"

namespace weakflow {

enum class PotentialKind { free, harmonic, gaussian_barrier };

/// Static potential V(x_j) on a grid, built from one of the presets.
class Potential {
 public:
  const GridSpec& grid() const { return grid_; }
  PotentialKind kind() const { return kind_; }
  std::span<const double> values() const { return v_; }
  double operator[](std::size_t j) const { return v_[j]; }

  /// True when V vanishes identically, so propagation is purely kinetic.
  bool is_free() const;
  std::string describe() const;

  friend Potential free_potential(const GridSpec& grid);
  friend Potential harmonic_potential(const GridSpec& grid, double omega,
                                      double center, double mass);
  friend Potential gaussian_barrier(const GridSpec& grid, double height,
                                    double width, double center);

 private:
  Potential(GridSpec grid, PotentialKind kind, std::vector<double> v,
            std::string description);

  GridSpec grid_;
  PotentialKind kind_ = PotentialKind::free;
  std::vector<double> v_;
  std::string description_;
};

Potential free_potential(const GridSpec& grid);
/// V(x) = m omega^2 (x - center)^2 / 2
Potential harmonic_potential(const GridSpec& grid, double omega,
                             double center = 0.0, double mass = 1.0);
/// V(x) = height exp(-(x - center)^2 / (2 width^2))
Potential gaussian_barrier(const GridSpec& grid, double height, double width,
                           double center = 0.0);

enum class LawKind {
  bohmian,
  /// Bohmian current plus a constant; the only divergence-free addition in 1D.
  variant,
  /// Bohmian current plus epsilon * x. Not divergence free; used only to show
  /// that the continuity residual detects a broken law.
  linear_offset,
};

/// A velocity functional psi -> v^psi = (j^psi + offset(x)) / |psi|^2.
struct VelocityLaw {
  LawKind kind = LawKind::bohmian;
  double epsilon = 0.0;

  static VelocityLaw bohmian() { return {}; }
  static VelocityLaw variant(double epsilon) { return {LawKind::variant, epsilon}; }
  static VelocityLaw linear_offset(double epsilon) {
    return {LawKind::linear_offset, epsilon};
  }

  /// Current added to the Bohmian flux at position x.
  double offset_current(double x) const;
  /// d/dx of offset_current.
  double offset_divergence(double x) const;
  /// Current added everywhere when it is a constant (bohmian and variant).
  bool has_constant_offset() const { return kind != LawKind::linear_offset; }

  std::string name() const;
  bool operator==(const VelocityLaw&) const = default;
};

/// Velocities on the grid; v is meaningful only where `valid` is set.
struct VelocityField {
  GridSpec grid;
  std::vector<double> v;
  std::vector<double> rho;
  std::vector<bool> valid;
};

/// v = (j + offset) / rho where rho >= rho_min; other points masked.
VelocityField velocity_field(const VelocityLaw& law, const WaveFunction& psi,
                             double rho_min = kDefaultRhoMin);

/// Strang split-operator propagator for a fixed step:
/// half kick, kinetic drift in Fourier space, half kick.
class Propagator {
 public:
  Propagator(const Potential& potential, double dt, Units units = {});

  double dt() const { return dt_; }
  WaveFunction step(const WaveFunction& psi) const;
  /// Applies `count` steps.
  WaveFunction advance(const WaveFunction& psi, std::size_t count) const;

 private:
  void step_in_place(std::vector<Complex>& amp) const;

  GridSpec grid_;
  Units units_;
  double dt_;
  bool free_;
  Fft fft_;
  std::vector<Complex> half_kick_;
  std::vector<Complex> drift_;
};

/// One split-operator step of length dt (dt > 0).
WaveFunction evolve(const WaveFunction& psi, const Potential& potential, double dt);

/// Propagates over `duration` with equal steps no longer than dt_max.
WaveFunction evolve_for(const WaveFunction& psi, const Potential& potential,
                        double duration, double dt_max = 1e-3);

struct ContinuityReport {
  /// max over the valid mask of |d rho/dt + d(j_law)/dx|
  double max_abs_residual = 0.0;
  /// Residual above the tolerance the report was computed with.
  bool flagged = false;
};

/// Residual of the continuity equation for `law` at the state one step
/// after psi. d rho/dt is a centered difference of the states at 0, dt and
/// 2 dt; the divergence of the Bohmian flux is spectral, the divergence of
/// the law's offset is analytic.
ContinuityReport continuity_residual(const WaveFunction& psi,
                                     const Potential& potential,
                                     const VelocityLaw& law, double dt,
                                     double rho_min = kDefaultRhoMin,
                                     double tolerance = 1e-6);

}  // namespace weakflow

#endif  // WEAKFLOW_DYNAMICS_HPP_
