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

#include "weakflow/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace weakflow {
namespace {

// Positions compared by multiplication_deviation.
std::vector<bool> bulk_mask(const VelocityField& field, double bulk_fraction) {
  const double peak = *std::max_element(field.rho.begin(), field.rho.end());
  std::vector<bool> mask(field.valid);
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (field.rho[j] < bulk_fraction * peak) mask[j] = false;
  }
  return mask;
}

double max_difference(const VelocityField& a, const VelocityField& b,
                      const std::vector<bool>& mask) {
  double d = 0.0;
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (mask[j] && a.valid[j] && b.valid[j]) d = std::max(d, std::abs(a.v[j] - b.v[j]));
  }
  return d;
}

}  // namespace

MultiplierFamily MultiplierFamily::gaussian(double spread, std::vector<double> offsets) {
  if (!(spread > 0.0)) throw std::invalid_argument("MultiplierFamily: spread must be positive");
  return {MultiplierShape::gaussian, spread, std::move(offsets)};
}

MultiplierFamily MultiplierFamily::constant(std::size_t members) {
  return {MultiplierShape::constant, 1.0, std::vector<double>(members, 0.0)};
}

double MultiplierFamily::value(std::size_t member, double x) const {
  if (shape == MultiplierShape::constant) return 1.0;
  return PointerModel{spread}.amplitude(offsets.at(member) - x);
}

double MultiplierFamily::derivative(std::size_t member, double x) const {
  if (shape == MultiplierShape::constant) return 0.0;
  const double u = offsets.at(member) - x;
  return value(member, x) * u / (2.0 * spread * spread);
}

MultiplicationReport multiplication_deviation(const VelocityLaw& law,
                                              const WaveFunction& psi,
                                              const MultiplierFamily& family,
                                              double rho_min, double bulk_fraction) {
  if (family.size() == 0) throw std::invalid_argument("multiplication_deviation: empty family");
  const auto base = velocity_field(law, psi, rho_min);
  const auto mask = bulk_mask(base, bulk_fraction);
  const auto& grid = psi.grid();
  MultiplicationReport report;
  report.per_member.resize(family.size());
  for (std::size_t m = 0; m < family.size(); ++m) {
    std::vector<double> phi(grid.size());
    for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = family.value(m, grid.x(j));
    const auto product = normalize(multiply(psi, std::span<const double>(phi)));
    const auto field = velocity_field(law, product, rho_min);
    report.per_member[m] = max_difference(base, field, mask);
    if (report.per_member[m] > report.max_deviation) {
      report.max_deviation = report.per_member[m];
      report.worst_member = m;
    }
  }
  return report;
}

double phase_multiplier_deviation(const VelocityLaw& law, const WaveFunction& psi,
                                  double a, double rho_min, double bulk_fraction) {
  const auto& grid = psi.grid();
  std::vector<Complex> f(grid.size());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = std::polar(1.0, a * grid.x(j));
  const auto base = velocity_field(law, psi, rho_min);
  const auto field = velocity_field(law, multiply(psi, std::span<const Complex>(f)), rho_min);
  return max_difference(base, field, bulk_mask(base, bulk_fraction));
}

std::vector<bool> gradient_total_check(const MultiplierFamily& family,
                                       const GridSpec& grid, double tolerance) {
  std::vector<bool> out(grid.size(), false);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t m = 0; m < family.size() && !out[j]; ++m) {
      out[j] = std::abs(family.derivative(m, grid.x(j))) > tolerance;
    }
  }
  return out;
}

CurrentPair make_current_pair(const VelocityLaw& first, const VelocityLaw& second,
                              const WaveFunction& psi, const Potential& potential,
                              double dt, double rho_min, double tolerance) {
  const auto r1 = continuity_residual(psi, potential, first, dt, rho_min, tolerance);
  const auto r2 = continuity_residual(psi, potential, second, dt, rho_min, tolerance);
  if (r1.flagged || r2.flagged) {
    throw std::domain_error("make_current_pair: " +
                            (r1.flagged ? first.name() : second.name()) +
                            " violates the continuity equation");
  }
  const auto flux = quantum_flux(psi);
  const auto& grid = psi.grid();
  CurrentPair pair{grid, flux.j, flux.j, std::vector<bool>(grid.size()),
                   r1.max_abs_residual, r2.max_abs_residual};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    pair.j1[j] += first.offset_current(grid.x(j));
    pair.j2[j] += second.offset_current(grid.x(j));
    pair.valid[j] = flux.rho[j] >= rho_min;
  }
  return pair;
}

std::vector<double> uniqueness_witness(const CurrentPair& pair,
                                       const MultiplierFamily& family) {
  const auto& grid = pair.grid;
  std::vector<double> w(grid.size(), 0.0);
  std::vector<double> weight(grid.size());
  for (std::size_t m = 0; m < family.size(); ++m) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double phi = family.value(m, grid.x(j));
      weight[j] = phi * phi;
    }
    const auto grad = spectral_derivative(grid, std::span<const double>(weight));
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (!pair.valid[j]) continue;
      w[j] = std::max(w[j], std::abs(grad[j] * (pair.j1[j] - pair.j2[j])));
    }
  }
  return w;
}

CatalogReport law_catalog_triangle(const WaveFunction& psi,
                                   const std::vector<VelocityLaw>& laws,
                                   const std::vector<MultiplierFamily>& families,
                                   double rho_min, double zero_tolerance) {
  const auto base = velocity_field(VelocityLaw::bohmian(), psi, rho_min);
  std::vector<const MultiplierFamily*> total;
  for (const auto& family : families) {
    const auto check = gradient_total_check(family, psi.grid());
    bool all = true;
    for (std::size_t j = 0; j < check.size(); ++j) {
      if (base.valid[j] && !check[j]) all = false;
    }
    if (all) total.push_back(&family);
  }
  if (total.empty()) {
    throw std::invalid_argument("law_catalog_triangle: no gradient-total family given");
  }
  CatalogReport report;
  report.pass = true;
  for (const auto& law : laws) {
    CatalogEntry e;
    e.law = law.name();
    for (const auto* family : total) {
      e.max_deviation = std::max(
          e.max_deviation, multiplication_deviation(law, psi, *family, rho_min).max_deviation);
    }
    e.invariant = e.max_deviation <= zero_tolerance;
    const auto field = velocity_field(law, psi, rho_min);
    e.field_difference = max_difference(base, field, base.valid);
    e.matches_bohmian = e.field_difference <= zero_tolerance;
    e.consistent = !e.invariant || e.matches_bohmian;
    if (!e.consistent) report.pass = false;
    if (law.kind == LawKind::bohmian && !e.invariant) report.pass = false;
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace weakflow
