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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "weakflow/grid.hpp"
#include "weakflow/rng.hpp"

namespace weakflow {

GridCdf::GridCdf(const GridSpec& grid, std::span<const double> density)
    : grid_(grid), cumulative_(grid.size() + 1, 0.0) {
  const std::size_t n = grid.size();
  if (density.size() != n) {
    throw std::invalid_argument("GridCdf: density length != grid size");
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double cell = 0.5 * (density[j] + density[(j + 1) % n]) * grid.dx();
    if (!(cell >= 0.0)) throw std::invalid_argument("GridCdf: negative density");
    cumulative_[j + 1] = cumulative_[j] + cell;
  }
  const double total = cumulative_.back();
  if (!(total > 0.0)) throw std::invalid_argument("GridCdf: zero total mass");
  for (auto& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
}

double GridCdf::operator()(double x) const {
  const double s = (grid_.wrap_position(x) - grid_.x_min()) / grid_.dx();
  const auto j = std::min(static_cast<std::size_t>(s), grid_.size() - 1);
  const double f = s - static_cast<double>(j);
  return cumulative_[j] + f * (cumulative_[j + 1] - cumulative_[j]);
}

double GridCdf::quantile(double q) const {
  q = std::clamp(q, 0.0, 1.0);
  // First node with cumulative > q; the cell to its left holds q.
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), q);
  if (it == cumulative_.begin()) ++it;
  if (it == cumulative_.end()) --it;
  // Skip zero-mass cells so the inverse stays inside the support.
  const auto j = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const double lo = cumulative_[j];
  const double hi = cumulative_[j + 1];
  const double f = hi > lo ? (q - lo) / (hi - lo) : 0.0;
  return grid_.x(j) + std::clamp(f, 0.0, 1.0) * grid_.dx();
}

PositionSampler::PositionSampler(const WaveFunction& psi)
    : cdf_(psi.grid(), psi.density()) {}

std::vector<double> PositionSampler::draw(std::size_t count,
                                          std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<double> xs(count);
  for (auto& x : xs) x = position(uniform01(rng));
  return xs;
}

std::vector<double> sample_positions(const WaveFunction& psi,
                                     std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) {
    throw std::invalid_argument("sample_positions: need at least one sample");
  }
  return PositionSampler(psi).draw(n_samples, seed);
}

}  // namespace weakflow
