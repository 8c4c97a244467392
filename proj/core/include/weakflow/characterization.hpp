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

// Finite-grid checks of the multiplier invariance of a velocity law and of
// the argument that singles out the Bohmian current.

#ifndef WEAKFLOW_CHARACTERIZATION_HPP_
#define WEAKFLOW_CHARACTERIZATION_HPP_

#include <string>
#include <vector>

#include "weakflow/dynamics.hpp"
#include "weakflow/weak_measurement.hpp"

namespace weakflow {

enum class MultiplierShape { gaussian, constant };

/// Real multipliers phi_y(x) = Phi(y - x), one per offset y. The Gaussian
/// shape is the pointer amplitude of the given spread; the constant shape
/// is phi_y = 1.
struct MultiplierFamily {
  MultiplierShape shape = MultiplierShape::gaussian;
  double spread = 1.0;
  std::vector<double> offsets;

  static MultiplierFamily gaussian(double spread, std::vector<double> offsets);
  static MultiplierFamily constant(std::size_t members = 1);

  double value(std::size_t member, double x) const;
  /// d phi_y / dx in closed form.
  double derivative(std::size_t member, double x) const;
  std::size_t size() const { return offsets.size(); }
};

struct MultiplicationReport {
  double max_deviation = 0.0;
  std::size_t worst_member = 0;
  std::vector<double> per_member;  // max deviation of each member
};

/// max over members and positions of |v^(psi phi_y) - v^psi|. Positions are
/// those where both densities pass rho_min and rho(psi) >= bulk_fraction of
/// its peak. Throws on an empty family.
MultiplicationReport multiplication_deviation(const VelocityLaw& law,
                                              const WaveFunction& psi,
                                              const MultiplierFamily& family,
                                              double rho_min = kDefaultRhoMin,
                                              double bulk_fraction = 0.0);

/// Same comparison for the complex multiplier exp(i a x). For the Bohmian
/// law the deviation is |a| hbar / m.
double phase_multiplier_deviation(const VelocityLaw& law, const WaveFunction& psi,
                                  double a, double rho_min = kDefaultRhoMin,
                                  double bulk_fraction = 0.0);

/// Per grid point: true iff some member has |phi_y'(x)| > tolerance.
std::vector<bool> gradient_total_check(const MultiplierFamily& family,
                                       const GridSpec& grid, double tolerance = 1e-8);

/// Currents of two laws on the same state. Construction checks that both
/// satisfy the continuity equation.
struct CurrentPair {
  GridSpec grid;
  std::vector<double> j1;
  std::vector<double> j2;
  std::vector<bool> valid;  // density above the floor
  double residual1 = 0.0;
  double residual2 = 0.0;
};

/// Throws std::domain_error if either law's continuity residual is flagged.
CurrentPair make_current_pair(const VelocityLaw& first, const VelocityLaw& second,
                              const WaveFunction& psi, const Potential& potential,
                              double dt = 1e-4, double rho_min = kDefaultRhoMin,
                              double tolerance = 1e-6);

/// W(x) = max_y |d/dx |phi_y(x)|^2 (j1 - j2)(x)|, with the derivative of
/// |phi_y|^2 taken spectrally on the grid. Zero outside the valid mask.
std::vector<double> uniqueness_witness(const CurrentPair& pair,
                                       const MultiplierFamily& family);

struct CatalogEntry {
  std::string law;
  double max_deviation = 0.0;       // over all gradient-total families
  bool invariant = false;           // max_deviation <= zero_tolerance
  double field_difference = 0.0;    // max |v_law - v_bohmian| on the mask
  bool matches_bohmian = false;     // field_difference <= zero_tolerance
  bool consistent = false;          // invariant implies matches_bohmian
};

struct CatalogReport {
  std::vector<CatalogEntry> entries;
  bool pass = false;  // every entry consistent and bohmian invariant
};

/// For each law: if the velocity is unchanged by every gradient-total family
/// on psi, it must coincide with the Bohmian velocity.
CatalogReport law_catalog_triangle(const WaveFunction& psi,
                                   const std::vector<VelocityLaw>& laws,
                                   const std::vector<MultiplierFamily>& families,
                                   double rho_min = kDefaultRhoMin,
                                   double zero_tolerance = 1e-10);

}  // namespace weakflow

#endif  // WEAKFLOW_CHARACTERIZATION_HPP_
