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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"
#include "weakflow/dynamics.hpp"
#include "weakflow/oracles.hpp"

using namespace weakflow;
using weakflow::testing::standard_grid;

TEST_CASE("potential factories") {
  const auto g = standard_grid();
  CHECK(free_potential(g).is_free());
  const auto h = harmonic_potential(g, 2.0, 1.0);
  CHECK_FALSE(h.is_free());
  for (std::size_t j = 0; j < g.size(); j += 37) {
    const double u = g.x(j) - 1.0;
    CHECK(h[j] == doctest::Approx(0.5 * 4.0 * u * u));
  }
  const auto b = gaussian_barrier(g, 3.0, 0.5, -1.0);
  for (std::size_t j = 0; j < g.size(); j += 37) {
    const double u = (g.x(j) + 1.0) / 0.5;
    CHECK(b[j] == doctest::Approx(3.0 * std::exp(-0.5 * u * u)));
  }
}

TEST_CASE("free packet spreads as the closed form") {
  const auto g = standard_grid();
  const auto psi = gaussian_packet(g, 0.0, 1.0, 0.0);
  const auto later = evolve_for(psi, free_potential(g), 1.0, 1e-3);
  const auto rho = later.density();
  double err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    err = std::max(err, std::abs(rho[j] - oracle::free_density(1.0, 1.0, g.x(j))));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("coherent state returns after one trap period") {
  const auto g = standard_grid();
  const auto pot = harmonic_potential(g, 1.0);
  const auto psi = gaussian_packet(g, 1.5, oracle::coherent_width(1.0), 0.0);
  const auto later = evolve_for(psi, pot, oracle::harmonic_period(1.0), 1e-3);
  const auto a = psi.density();
  const auto b = later.density();
  CHECK(testing::max_abs_diff(a, b) < 1e-6);
}

TEST_CASE("evolution is unitary step by step") {
  const auto g = standard_grid();
  auto psi = testing::two_packets(g);
  const auto pot = gaussian_barrier(g, 2.0, 0.7);
  const Propagator prop(pot, 1e-3);
  for (int i = 0; i < 200; ++i) {
    const double before = psi.norm_squared();
    psi = prop.step(psi);
    CHECK(std::abs(psi.norm_squared() - before) < 1e-12);
  }
}

TEST_CASE("evolve_for covers the exact duration") {
  const auto g = standard_grid();
  const auto psi = gaussian_packet(g, 0.0, 1.0, 0.0);
  const auto pot = free_potential(g);
  // 0.0105 is not a multiple of 1e-3; the result must equal ten and a half steps.
  const auto a = evolve_for(psi, pot, 0.0105, 1e-3);
  const auto b = evolve_for(psi, pot, 0.0105, 0.0105 / 11.0);
  double err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) err = std::max(err, std::abs(a[j] - b[j]));
  CHECK(err < 1e-12);
  const auto rho = a.density();
  double oracle_err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    oracle_err = std::max(oracle_err, std::abs(rho[j] - oracle::free_density(1.0, 0.0105, g.x(j))));
  }
  CHECK(oracle_err < 1e-12);
}

TEST_CASE("velocity_field") {
  const auto g = standard_grid();
  SUBCASE("bohmian on a real packet vanishes") {
    const auto f = velocity_field(VelocityLaw::bohmian(), gaussian_packet(g, 0.0, 1.0, 0.0));
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (f.valid[j]) CHECK(std::abs(f.v[j]) < 1e-10);
    }
  }
  SUBCASE("variant at the centre of a real packet") {
    const auto psi = gaussian_packet(g, 0.0, 1.0, 0.0);
    const auto f = velocity_field(VelocityLaw::variant(0.2), psi);
    CHECK(f.v[512] == doctest::Approx(0.2 * std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
    CHECK(f.v[512] == doctest::Approx(0.2 / psi.density()[512]).epsilon(1e-14));
  }
  SUBCASE("bohmian on a plane-phase packet is uniform") {
    const auto f = velocity_field(VelocityLaw::bohmian(), gaussian_packet(g, 0.0, 1.0, 1.0));
    std::size_t n_valid = 0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (!f.valid[j]) continue;
      ++n_valid;
      CHECK(f.v[j] == doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK(n_valid > 200);
  }
  SUBCASE("valid mask follows the density floor") {
    const auto psi = gaussian_packet(g, 0.0, 1.0, 0.0);
    const auto f = velocity_field(VelocityLaw::bohmian(), psi, 1e-4);
    const auto rho = psi.density();
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(f.valid[j] == (rho[j] >= 1e-4));
  }
  SUBCASE("law names") {
    CHECK(VelocityLaw::bohmian().name() == "bohmian");
    CHECK(VelocityLaw::variant(0.2).name() == "variant(epsilon=0.2)");
    CHECK(VelocityLaw::linear_offset(0.2).offset_divergence(3.0) == 0.2);
    CHECK(VelocityLaw::variant(0.2).offset_divergence(3.0) == 0.0);
  }
}

TEST_CASE("continuity residual") {
  const auto g = standard_grid();
  const auto psi = evolve_for(gaussian_packet(g, 0.0, 1.0, 0.0), free_potential(g), 0.5);
  const auto pot = free_potential(g);
  const auto b = continuity_residual(psi, pot, VelocityLaw::bohmian(), 1e-4);
  CHECK(b.max_abs_residual < 1e-6);
  CHECK_FALSE(b.flagged);
  const auto v = continuity_residual(psi, pot, VelocityLaw::variant(0.2), 1e-4);
  CHECK(v.max_abs_residual < 1e-6);
  CHECK_FALSE(v.flagged);
  const auto l = continuity_residual(psi, pot, VelocityLaw::linear_offset(0.2), 1e-4);
  CHECK(l.max_abs_residual == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(l.flagged);
  SUBCASE("moving packet in a trap") {
    const auto trap = harmonic_potential(g, 1.0);
    const auto moving = gaussian_packet(g, 1.0, 1.0, 0.8);
    CHECK(continuity_residual(moving, trap, VelocityLaw::bohmian(), 1e-4).max_abs_residual < 1e-6);
  }
}
