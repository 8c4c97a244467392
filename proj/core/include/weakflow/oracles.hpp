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

// Closed-form reference values. Nothing here touches the grid code, so the
// tests can hold the numerics against these. hbar = m = 1 throughout.

#ifndef WEAKFLOW_ORACLES_HPP_
#define WEAKFLOW_ORACLES_HPP_

#include <cmath>
#include <numbers>

namespace weakflow::oracle {

/// Position spread of a free packet of initial spread s0 at rest, at time t.
inline double free_width(double s0, double t) {
  return std::sqrt(s0 * s0 + (t / (2.0 * s0)) * (t / (2.0 * s0)));
}

/// |psi_t(x)|^2 of that packet centred at the origin.
inline double free_density(double s0, double t, double x) {
  const double s = free_width(s0, t);
  return std::exp(-x * x / (2.0 * s * s)) / (std::sqrt(2.0 * std::numbers::pi) * s);
}

/// Bohmian velocity of that packet: x t / (4 s0^4 + t^2).
inline double free_velocity(double s0, double t, double x) {
  return x * t / (4.0 * std::pow(s0, 4) + t * t);
}

/// Bohmian trajectory of that packet starting at x0 at t = 0.
inline double free_trajectory(double s0, double t, double x0) {
  return x0 * free_width(s0, t) / s0;
}

/// Offset epsilon / rho of the constant-offset variant law at x.
inline double variant_offset(double epsilon, double s0, double t, double x) {
  return epsilon / free_density(s0, t, x);
}

/// Spread of |psi_Y|^2 after conditioning a packet of spread s0 on a pointer
/// of spread sigma.
inline double conditional_width(double s0, double sigma) {
  return 1.0 / std::sqrt(1.0 / (s0 * s0) + 1.0 / (sigma * sigma));
}

/// Variance of the pointer reading for a packet of spread s (zero mean).
inline double pointer_variance(double s, double sigma) { return s * s + sigma * sigma; }

/// Asymptotic two-sided one-sample KS critical value.
inline double ks_critical(double n, double alpha) {
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(n);
}

/// Period of a harmonic trap.
inline double harmonic_period(double omega) { return 2.0 * std::numbers::pi / omega; }

/// Ground-state spread of a harmonic trap.
inline double coherent_width(double omega) { return std::sqrt(1.0 / (2.0 * omega)); }

/// Largest value over y of |epsilon d|phi_y|^2/dx| for a normalized Gaussian
/// amplitude phi_y of spread s: |epsilon| e^{-1/2} / (sqrt(2 pi) s^2).
inline double witness_peak(double epsilon, double s) {
  return std::abs(epsilon) * std::exp(-0.5) / (std::sqrt(2.0 * std::numbers::pi) * s * s);
}

}  // namespace weakflow::oracle

#endif  // WEAKFLOW_ORACLES_HPP_
