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

// Shared fixtures for the unit tests.

#ifndef WEAKFLOW_TESTS_SUPPORT_HPP_
#define WEAKFLOW_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "weakflow/grid.hpp"

namespace weakflow::testing {

inline GridSpec standard_grid() { return make_grid(-20.0, 20.0, 1024); }

/// Unnormalized analytic packet, written out independently of gaussian_packet.
inline WaveFunction analytic_packet(const GridSpec& g, double x0, double s0, double k0) {
  std::vector<Complex> amp(g.size());
  const double c = std::pow(2.0 * std::numbers::pi * s0 * s0, -0.25);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double u = g.x(j) - x0;
    amp[j] = c * std::exp(-u * u / (4.0 * s0 * s0)) * Complex(std::cos(k0 * g.x(j)), std::sin(k0 * g.x(j)));
  }
  return WaveFunction(g, std::move(amp));
}

/// Two-packet superposition used throughout: 0.6 G(-2,1,+1) + 0.8 G(2,1,-1).
inline WaveFunction two_packets(const GridSpec& g) {
  return normalize(linear_combination(gaussian_packet(g, -2.0, 1.0, 1.0), 0.6,
                                      gaussian_packet(g, 2.0, 1.0, -1.0), 0.8));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double normal_cdf_exact(double x, double mu, double s) {
  return 0.5 * std::erfc(-(x - mu) / (s * std::numbers::sqrt2));
}

}  // namespace weakflow::testing

#endif  // WEAKFLOW_TESTS_SUPPORT_HPP_
