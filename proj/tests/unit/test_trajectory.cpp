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
#include <numbers>

#include "doctest.h"
#include "support.hpp"
#include "weakflow/oracles.hpp"
#include "weakflow/trajectory.hpp"

using namespace weakflow;
using weakflow::testing::standard_grid;

namespace {

// Free packet of spread s0 at rest at the origin, at time t, in closed form.
WaveFunction free_packet_at(const GridSpec& g, double s0, double t) {
  const Complex width = s0 * Complex(1.0, t / (2.0 * s0 * s0));
  const Complex c = std::pow(2.0 * std::numbers::pi, -0.25) / std::sqrt(width);
  std::vector<Complex> amp(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.x(j);
    amp[j] = c * std::exp(-x * x / (4.0 * s0 * width));
  }
  return WaveFunction(g, std::move(amp));
}

}  // namespace

TEST_CASE("closed-form provider matches the closed-form density") {
  const auto g = standard_grid();
  const auto psi = free_packet_at(g, 1.0, 0.7);
  const auto rho = psi.density();
  for (std::size_t j = 0; j < g.size(); j += 11) {
    CHECK(rho[j] == doctest::Approx(oracle::free_density(1.0, 0.7, g.x(j))).epsilon(1e-12));
  }
}

TEST_CASE("interpolate_field is exact for cubics") {
  const auto g = standard_grid();
  VelocityField f{g, std::vector<double>(g.size()), std::vector<double>(g.size(), 1.0),
                  std::vector<bool>(g.size(), true)};
  auto cubic = [](double x) { return 0.3 * x * x * x - x * x + 2.0 * x - 1.0; };
  for (std::size_t j = 0; j < g.size(); ++j) f.v[j] = cubic(g.x(j));
  for (double x : {-3.3, -0.01, 0.0, 1.2345, 4.9}) {
    const auto v = interpolate_field(f, x);
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(cubic(x)).epsilon(1e-11));
  }
  f.valid[512] = false;
  CHECK_FALSE(interpolate_field(f, 0.01).has_value());
}

TEST_CASE("advance_trajectory") {
  const auto g = standard_grid();
  SUBCASE("plane-phase packet moves at unit speed") {
    const auto psi0 = gaussian_packet(g, 0.0, 1.0, 1.0);
    const auto pot = free_potential(g);
    const WaveProvider provider = [&](double t) { return evolve_for(psi0, pot, t, 1e-3); };
    const auto r = advance_trajectory(0.0, VelocityLaw::bohmian(), provider, 0.0, 0.01);
    CHECK(r.status == StepStatus::ok);
    CHECK(std::abs(r.x - 0.01) < 1e-10);
  }
  SUBCASE("stationary state does not move") {
    const auto trap = harmonic_potential(g, 1.0);
    const auto ground = gaussian_packet(g, 0.0, oracle::coherent_width(1.0), 0.0);
    const WaveProvider provider = [&](double t) { return evolve_for(ground, trap, t, 1e-3); };
    for (double x : {-1.0, 0.0, 0.4, 2.0}) {
      const auto r = advance_trajectory(x, VelocityLaw::bohmian(), provider, 0.0, 0.01);
      // The split-step ground state is stationary only up to discretisation error.
      CHECK(std::abs(r.x - x) < 1e-10);
    }
  }
  SUBCASE("free spreading characteristic") {
    const WaveProvider provider = [&](double t) { return free_packet_at(g, 1.0, t); };
    double x = 1.0;
    const double dt = 1e-3;
    for (int i = 0; i < 1000; ++i) {
      const auto r = advance_trajectory(x, VelocityLaw::bohmian(), provider, i * dt, dt);
      REQUIRE(r.status == StepStatus::ok);
      x = r.x;
    }
    CHECK(std::abs(x - oracle::free_trajectory(1.0, 1.0, 1.0)) < 1e-5);
  }
  SUBCASE("masked start is censored for the Bohmian law") {
    const WaveProvider provider = [&](double t) { return free_packet_at(g, 1.0, t); };
    const auto r = advance_trajectory(15.0, VelocityLaw::bohmian(), provider, 0.0, 1e-3);
    CHECK(r.status == StepStatus::censored);
    CHECK(r.x == 15.0);
  }
  SUBCASE("variant falls back to quantile transport where unresolved") {
    const WaveProvider provider = [&](double t) { return free_packet_at(g, 1.0, t); };
    const auto law = VelocityLaw::variant(0.2);
    const auto r = advance_trajectory(5.5, law, provider, 0.0, 1e-2);
    CHECK(r.status == StepStatus::quantile);
    // The quantile step moves the particle so that the mass to its left grows by epsilon dt,
    // modulo one on the periodic domain.
    const GridCdf before(g, free_packet_at(g, 1.0, 0.0).density());
    const GridCdf after(g, free_packet_at(g, 1.0, 1e-2).density());
    const double target = std::fmod(before(5.5) + 0.2 * 1e-2, 1.0);
    CHECK(std::abs(after(r.x) - target) < 1e-9);
  }
}

TEST_CASE("transport_ensemble") {
  const auto g = standard_grid();
  const auto psi = gaussian_packet(g, 0.0, 1.0, 0.0);
  const auto pot = free_potential(g);
  const auto xs = sample_positions(psi, 4000, 7);
  SUBCASE("worker count does not change the result") {
    const auto a = transport_ensemble(xs, VelocityLaw::variant(0.2), psi, pot, 0.2, 1e-3, 1);
    const auto b = transport_ensemble(xs, VelocityLaw::variant(0.2), psi, pot, 0.2, 1e-3, 3);
    CHECK(a.positions == b.positions);
    CHECK(a.status == b.status);
    CHECK(a.rerouted == b.rerouted);
  }
  SUBCASE("bohmian follows the characteristics") {
    const auto r = transport_ensemble(xs, VelocityLaw::bohmian(), psi, pot, 1.0, 1e-3, 2);
    CHECK(r.censored == 0);
    const double stretch = oracle::free_trajectory(1.0, 1.0, 1.0);
    double err = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (std::abs(xs[i]) < 3.0) err = std::max(err, std::abs(r.positions[i] - stretch * xs[i]));
    }
    CHECK(err < 1e-5);
  }
}
