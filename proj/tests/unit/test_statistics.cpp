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
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "weakflow/oracles.hpp"
#include "weakflow/statistics.hpp"

using namespace weakflow;
using weakflow::testing::standard_grid;

namespace {

WeakRunRecord record(double y, double x) {
  WeakRunRecord r;
  r.y = y;
  r.x_tau = x;
  return r;
}

}  // namespace

TEST_CASE("make_bins lattice") {
  const auto g = standard_grid();
  const auto psi = gaussian_packet(g, 0.0, 1.0, 0.0);
  const double w = 4.0 * g.dx();
  const auto bins = make_bins(g, w, psi.density());
  REQUIRE(bins.size() > 10);
  CHECK(bins.origin == g.x_min());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    CHECK(bins.centers[k] == doctest::Approx(g.x_min() + (bins.lattice[k] + 0.5) * w));
    CHECK(bins.locate(bins.centers[k]) == k);
  }
  CHECK_FALSE(bins.locate(15.0).has_value());
  CHECK_FALSE(bins.locate(std::nan("")).has_value());
  // Every kept bin has density above the floor at its centre.
  CHECK(bins.centers.front() > -7.0);
  CHECK(bins.centers.back() < 7.0);
  CHECK_THROWS_AS(make_bins(g, 0.0, psi.density()), std::invalid_argument);
}

TEST_CASE("bins_from_centers") {
  const std::vector<double> centers{0.5, -0.5, 1.5};
  const auto bins = bins_from_centers(centers, 1.0);
  CHECK(bins.centers == std::vector<double>{-0.5, 0.5, 1.5});
  CHECK(bins.locate(0.99) == 1);
  CHECK(bins.locate(-1.0) == 0);
  CHECK_FALSE(bins.locate(2.0).has_value());
  CHECK_THROWS_AS(bins_from_centers(std::vector<double>{0.0, 0.3}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bins_from_centers(std::vector<double>{0.0, 0.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bins_from_centers(std::vector<double>{}, 1.0), std::invalid_argument);
}

TEST_CASE("conditional_mean_by_bin") {
  const auto bins = bins_from_centers(std::vector<double>{0.0, 1.0, 2.0}, 1.0);
  SUBCASE("readings equal to the strong result give zero velocity") {
    std::vector<WeakRunRecord> rs;
    for (double x : {-0.2, 0.1, 0.3, 0.9, 1.2}) rs.push_back(record(x, x));
    const auto cond = conditional_mean_by_bin(rs, bins, 2);
    CHECK(cond.bins[0].mean_y == doctest::Approx((-0.2 + 0.1 + 0.3) / 3.0));
    CHECK(cond.bins[0].mean_y == cond.bins[0].mean_x);
    const auto est = weak_velocity_estimate(cond, 0.05);
    CHECK(est.bins[0].v_hat == 0.0);
    CHECK(est.bins[1].v_hat == 0.0);
  }
  SUBCASE("empty and sparse bins are kept and flagged") {
    std::vector<WeakRunRecord> rs{record(0.0, 0.1), record(0.2, 0.2), record(1.0, 1.1)};
    WeakRunRecord censored;
    censored.y = 3.0;
    rs.push_back(censored);
    const auto cond = conditional_mean_by_bin(rs, bins, 2);
    REQUIRE(cond.bins.size() == 3);
    CHECK(cond.bins[0].reliable);
    CHECK(cond.bins[1].n == 1);
    CHECK_FALSE(cond.bins[1].reliable);
    CHECK(std::isnan(cond.bins[1].stderr_y));
    CHECK(cond.bins[2].n == 0);
    CHECK(std::isnan(cond.bins[2].mean_y));
    CHECK(cond.censored == 1);
    CHECK(cond.censored_fraction == 0.25);
  }
  SUBCASE("all censored") {
    std::vector<WeakRunRecord> rs(3);
    CHECK_THROWS_AS(conditional_mean_by_bin(rs, bins), std::invalid_argument);
  }
  SUBCASE("synthetic readings with a known drift") {
    const double tau = 0.05, sigma = 10.0, v = 0.3;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> pos(-0.5, 0.5);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<WeakRunRecord> rs;
    for (int i = 0; i < 100000; ++i) {
      const double x = pos(rng);
      rs.push_back(record(x - v * tau + noise(rng), x));
    }
    const auto one = bins_from_centers(std::vector<double>{0.0}, 1.0);
    const auto cond = conditional_mean_by_bin(rs, one);
    const auto& b = cond.bins[0];
    CHECK(b.n == 100000);
    CHECK(std::abs(b.mean_y - (b.mean_x - v * tau)) < 4.0 * b.stderr_y);
    CHECK(b.stderr_y == doctest::Approx(sigma / std::sqrt(1e5)).epsilon(0.02));
    const auto est = weak_velocity_estimate(cond, tau);
    CHECK(std::abs(est.bins[0].v_hat - v) < 4.0 * est.bins[0].stderr_v);
  }
}

TEST_CASE("weak_velocity_estimate algebra") {
  const double tau = 0.05;
  const auto bins = bins_from_centers(std::vector<double>{1.0}, 0.5);
  std::vector<WeakRunRecord> rs{record(1.0 - 0.5 * tau - 0.1, 1.0), record(1.0 - 0.5 * tau + 0.1, 1.0)};
  const auto cond = conditional_mean_by_bin(rs, bins, 2);
  for (auto loc : {EstimatorLocation::bin_center, EstimatorLocation::mean_position}) {
    const auto est = weak_velocity_estimate(cond, tau, loc);
    CHECK(est.bins[0].v_hat == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(est.bins[0].stderr_v == doctest::Approx(cond.bins[0].stderr_y / tau));
  }
  CHECK(cond.bins[0].stderr_y == doctest::Approx(0.1));
  CHECK_THROWS_AS(weak_velocity_estimate(cond, 0.0), std::invalid_argument);
}

TEST_CASE("estimator location") {
  const auto bins = bins_from_centers(std::vector<double>{0.5}, 1.0);
  std::vector<WeakRunRecord> rs{record(0.0, 0.1), record(0.0, 0.3)};
  const auto cond = conditional_mean_by_bin(rs, bins, 1);
  CHECK(weak_velocity_estimate(cond, 1.0, EstimatorLocation::bin_center).bins[0].location == 0.5);
  CHECK(weak_velocity_estimate(cond, 1.0, EstimatorLocation::mean_position).bins[0].location ==
        doctest::Approx(0.2));
}

TEST_CASE("readings_by_bin") {
  const auto bins = bins_from_centers(std::vector<double>{0.0, 1.0}, 1.0);
  std::vector<WeakRunRecord> rs{record(5.0, 0.1), record(6.0, 1.1), record(7.0, 0.2), record(8.0, 9.0)};
  const auto r = readings_by_bin(rs, bins);
  CHECK(r[0] == std::vector<double>{5.0, 7.0});
  CHECK(r[1] == std::vector<double>{6.0});
}

TEST_CASE("KS helpers") {
  CHECK(ks_critical(100000, 0.01) == doctest::Approx(oracle::ks_critical(1e5, 0.01)));
  CHECK(ks_critical(100000, 0.01) * std::sqrt(1e5) == doctest::Approx(1.6276).epsilon(1e-4));
  CHECK(normal_cdf(1.0, 1.0, 3.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.96, 0.0, 1.0) == doctest::Approx(0.9750021).epsilon(1e-6));
  // Single sample at the median: D = 1/2.
  CHECK(ks_statistic({0.0}, [](double x) { return normal_cdf(x, 0.0, 1.0); }) == doctest::Approx(0.5));
  // Uniform sample against its own CDF.
  std::vector<double> u;
  for (int i = 0; i < 10; ++i) u.push_back((i + 0.5) / 10.0);
  CHECK(ks_statistic(u, [](double x) { return x; }) == doctest::Approx(0.05));
  CHECK_THROWS_AS(ks_statistic({}, [](double x) { return x; }), std::invalid_argument);
}

TEST_CASE("fit_power_law") {
  const std::vector<double> x{5.0, 10.0, 20.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.25));
  const auto fit = fit_power_law(x, y);
  CHECK(fit.slope == doctest::Approx(-1.25).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law(x, std::vector<double>{1.0, -1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("predicted_bin_statistics sum rules") {
  const auto g = standard_grid();
  const auto pot = free_potential(g);
  const double tau = 0.05, k0 = 1.0;
  const auto psi = gaussian_packet(g, 0.3, 1.0, k0);
  const auto bins = make_bins(g, 4.0 * g.dx(), evolve_for(psi, pot, tau).density(), 1e-14);
  const auto pred = predicted_bin_statistics(psi, pot, PointerModel{5.0}, tau, bins);
  double p = 0.0, my = 0.0, mx = 0.0;
  for (const auto& b : pred) {
    if (b.probability == 0.0) continue;
    p += b.probability;
    my += b.probability * b.mean_y;
    mx += b.probability * b.mean_x;
    CHECK(b.v_expected == doctest::Approx((b.mean_x - b.mean_y) / tau));
  }
  // Readings average to the initial mean position; the strong result to that plus tau k0.
  CHECK(p == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(my == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(mx == doctest::Approx(0.3 + tau * k0).epsilon(1e-8));
}

TEST_CASE("predicted statistics agree with Monte Carlo") {
  const auto g = standard_grid();
  const auto pot = free_potential(g);
  const double tau = 0.05;
  const auto psi = evolve_for(gaussian_packet(g, 0.0, 1.0, 0.0), pot, 0.5);
  const ProtocolConfig config{psi, pot, VelocityLaw::bohmian(), PointerModel{3.0}, tau, 40000, 5};
  const auto records = run_protocol(config);
  const auto bins = bins_from_centers(std::vector<double>{-1.0, 0.0, 1.0}, 0.5);
  const auto cond = conditional_mean_by_bin(records, bins);
  const auto pred = predicted_bin_statistics(psi, pot, config.pointer, tau, bins);
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const auto& b = cond.bins[k];
    CHECK(std::abs(b.mean_y - pred[k].mean_y) < 4.0 * b.stderr_y);
    const double p_se = std::sqrt(pred[k].probability * (1.0 - pred[k].probability) / 40000.0);
    CHECK(std::abs(static_cast<double>(b.n) / 40000.0 - pred[k].probability) < 4.0 * p_se);
  }
}

TEST_CASE("convergence_sweep cells") {
  const auto g = standard_grid();
  const auto pot = free_potential(g);
  const auto psi = evolve_for(gaussian_packet(g, 0.0, 1.0, 0.0), pot, 0.5);
  const ProtocolConfig base{psi, pot, VelocityLaw::bohmian(), PointerModel{10.0}, 0.05, 3000, 11};
  const std::vector<double> sigmas{5.0, 10.0}, taus{0.05}, deltas{4.0 * g.dx(), 8.0 * g.dx()};
  const auto cells = convergence_sweep(base, sigmas, taus, deltas);
  REQUIRE(cells.size() == 4);
  for (const auto& c : cells) {
    CHECK(c.ok);
    CHECK_FALSE(c.rows.empty());
    for (const auto& r : c.rows) CHECK(r.stat.center == r.estimate.center);
  }
  CHECK(cells[1].delta == deltas[1]);
  CHECK(cells[0].rows.size() > cells[1].rows.size());

  SUBCASE("censored cell is kept and flagged") {
    SweepOptions options;
    options.protocol.rho_min = 0.02;
    const auto flagged = convergence_sweep(base, std::vector<double>{10.0}, taus,
                                           std::vector<double>{4.0 * g.dx()}, options);
    REQUIRE(flagged.size() == 1);
    CHECK_FALSE(flagged[0].ok);
    CHECK(flagged[0].error.find("censor") != std::string::npos);
    CHECK_FALSE(flagged[0].rows.empty());
  }
  CHECK_THROWS_AS(convergence_sweep(base, std::vector<double>{}, taus, deltas), std::invalid_argument);
}
