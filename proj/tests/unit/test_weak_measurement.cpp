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
#include "weakflow/oracles.hpp"
#include "weakflow/rng.hpp"
#include "weakflow/weak_measurement.hpp"

using namespace weakflow;
using weakflow::testing::standard_grid;

TEST_CASE("pointer amplitude is centred and normalized") {
  const PointerModel p{2.5};
  double mass = 0.0, first = 0.0;
  const double h = 1e-3;
  for (double y = -40.0; y <= 40.0; y += h) {
    mass += p.density(y) * h;
    first += y * p.density(y) * h;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(first) < 1e-12);
  CHECK(p.amplitude(1.0) == p.amplitude(-1.0));
}

TEST_CASE("sample_pointer") {
  const PointerModel p{10.0};
  SUBCASE("mean reading equals the position") {
    const std::size_t n = 1000000;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += sample_pointer(p, 1.5, derive_seed(99, i));
    CHECK(std::abs(sum / static_cast<double>(n) - 1.5) < 4.0 * 10.0 / 1000.0);
  }
  SUBCASE("narrow pointer reads the position") {
    CHECK(std::abs(sample_pointer(PointerModel{1e-6}, 0.75, 5) - 0.75) < 1e-5);
  }
  SUBCASE("deterministic") {
    CHECK(sample_pointer(p, 0.0, 123) == sample_pointer(p, 0.0, 123));
    CHECK(sample_pointer(p, 0.0, 123) != sample_pointer(p, 0.0, 124));
  }
}

TEST_CASE("conditional_wavefunction") {
  const auto g = standard_grid();
  SUBCASE("product of two unit Gaussians") {
    const auto psi = gaussian_packet(g, 0.0, 1.0, 0.0);
    const auto cond = conditional_wavefunction(psi, 0.0, PointerModel{1.0});
    const auto ref = testing::analytic_packet(g, 0.0, oracle::conditional_width(1.0, 1.0), 0.0);
    double err = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) err = std::max(err, std::abs(cond[j] - ref[j]));
    CHECK(err < 1e-12);
  }
  SUBCASE("very wide pointer barely disturbs the state") {
    const auto psi = testing::two_packets(g);
    const auto cond = conditional_wavefunction(psi, 3.0, PointerModel{1e3 * 8.0});
    double l2 = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) l2 += std::norm(cond[j] - psi[j]) * g.dx();
    CHECK(std::sqrt(l2) < 1e-2);
  }
  SUBCASE("phase is untouched") {
    const auto psi = testing::two_packets(g);
    const auto cond = conditional_wavefunction(psi, -4.0, PointerModel{2.0});
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (std::abs(cond[j]) < 1e-6 || std::abs(psi[j]) < 1e-6) continue;
      CHECK(std::abs(std::arg(cond[j] / psi[j])) < 1e-12);
    }
    CHECK(cond.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("reading with no overlap") {
    const auto psi = gaussian_packet(g, 0.0, 0.5, 0.0);
    CHECK_THROWS(conditional_wavefunction(psi, 1e6, PointerModel{0.01}));
  }
}

TEST_CASE("pointer_marginal") {
  const auto g = standard_grid();
  SUBCASE("mean identity") {
    const auto psi = testing::two_packets(g);
    const auto m = pointer_marginal(psi, PointerModel{3.0});
    const auto rho = psi.density();
    double mean_x = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) mean_x += g.x(j) * rho[j] * g.dx();
    CHECK(m.integral() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(m.mean() - mean_x) < 1e-10);
  }
  SUBCASE("Gaussian convolution") {
    const auto psi = gaussian_packet(g, 0.0, 1.0, 0.0);
    const auto m = pointer_marginal(psi, PointerModel{2.0});
    const double var = oracle::pointer_variance(1.0, 2.0);
    double err = 0.0;
    for (std::size_t i = 0; i < m.y.size(); ++i) {
      const double ref = std::exp(-m.y[i] * m.y[i] / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
      err = std::max(err, std::abs(m.density[i] - ref));
    }
    CHECK(err < 1e-10);
  }
  SUBCASE("narrow pointer reproduces the position density") {
    const auto psi = gaussian_packet(g, 0.3, 1.0, 0.0);
    const auto m = pointer_marginal(psi, PointerModel{1e-4});
    const auto rho = psi.density();
    double err = 0.0;
    for (std::size_t i = 0; i < m.y.size(); ++i) {
      const double s = (m.y[i] - g.x_min()) / g.dx();
      const auto j = static_cast<std::size_t>(std::llround(s));
      if (std::abs(s - static_cast<double>(j)) > 1e-9) continue;
      err = std::max(err, std::abs(m.density[i] - rho[j % g.size()]));
    }
    CHECK(err < 1e-10);
  }
}

TEST_CASE("weak value of the velocity") {
  const auto g = standard_grid();
  const auto pot = free_potential(g);
  SUBCASE("plane phase") {
    const auto psi = gaussian_packet(g, 0.0, 1.0, 1.0);
    for (double x : {-1.0, 0.0, 0.5, 1.5}) {
      const auto v = analytic_weak_value_velocity(psi, pot, 1e-4, x);
      REQUIRE(v.has_value());
      CHECK(std::abs(*v - 1.0) < 1e-2);
    }
  }
  SUBCASE("real packet") {
    const auto psi = gaussian_packet(g, 0.0, 1.0, 0.0);
    for (double x : {-1.0, 0.0, 2.0}) {
      const auto v = analytic_weak_value_velocity(psi, pot, 1e-4, x);
      REQUIRE(v.has_value());
      CHECK(std::abs(*v) < 1e-2);
    }
    CHECK_FALSE(analytic_weak_value_velocity(psi, pot, 1e-4, 15.0).has_value());
  }
  SUBCASE("extrapolation reaches j / rho") {
    const auto psi = testing::two_packets(g);
    const auto weak = extrapolated_weak_value_field(psi, pot, 4e-4);
    const auto flux = quantum_flux(psi);
    std::size_t n = 0;
    double err = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (!weak.valid[j] || flux.rho[j] < kDefaultRhoMin) continue;
      ++n;
      err = std::max(err, std::abs(weak.v[j] - flux.j[j] / flux.rho[j]));
    }
    CHECK(n > 300);
    CHECK(err < 1e-4);
  }
  SUBCASE("single tau is first order") {
    const auto psi = testing::two_packets(g);
    const auto flux = quantum_flux(psi);
    auto error_at = [&](double tau) {
      const auto f = weak_value_field(psi, pot, tau);
      double e = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (f.valid[j] && flux.rho[j] > 1e-2) e = std::max(e, std::abs(f.v[j] - flux.j[j] / flux.rho[j]));
      }
      return e;
    };
    const double ratio = error_at(2e-3) / error_at(1e-3);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
  }
}
