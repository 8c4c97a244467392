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
#include <limits>
#include <stdexcept>

#include "weakflow/statistics.hpp"
#include "weakflow/trajectory.hpp"

namespace weakflow {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double value_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

void fill_cell(SweepCell& cell, std::span<const WeakRunRecord> records,
               const ProtocolConfig& config, const SweepOptions& options,
               const VelocityField& bohmian, const VelocityField& own) {
  const auto later = evolve_for(config.psi0, config.potential, config.tau);
  const auto bins = make_bins(config.psi0.grid(), cell.delta, later.density(),
                              options.protocol.rho_min);
  const auto cond = conditional_mean_by_bin(records, bins, options.n_min);
  const auto est = weak_velocity_estimate(cond, config.tau, options.location);
  std::vector<BinPrediction> predicted;
  if (options.predict) {
    predicted = predicted_bin_statistics(config.psi0, config.potential, config.pointer,
                                         config.tau, bins);
  }
  cell.censored_fraction = cond.censored_fraction;
  cell.rows.resize(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    auto& row = cell.rows[k];
    row.stat = cond.bins[k];
    row.estimate = est.bins[k];
    row.v_bohmian_ref = value_or_nan(interpolate_field(bohmian, row.estimate.location));
    row.v_law_ref = value_or_nan(interpolate_field(own, row.estimate.location));
    if (options.predict) {
      row.v_expected = predicted[k].v_expected;
    } else {
      row.v_expected = kNaN;
    }
    if (!row.stat.reliable || std::isnan(row.v_bohmian_ref)) continue;
    cell.max_bias = std::max(cell.max_bias, std::abs(row.estimate.v_hat - row.v_bohmian_ref));
    if (options.predict) {
      // The expected estimator is evaluated at the bin's expected location.
      const auto ref = interpolate_field(bohmian, predicted[k].mean_x);
      if (ref) {
        cell.max_expected_bias =
            std::max(cell.max_expected_bias, std::abs(row.v_expected - *ref));
      }
    }
  }
}

}  // namespace

std::vector<SweepCell> convergence_sweep(const ProtocolConfig& base,
                                         std::span<const double> sigmas,
                                         std::span<const double> taus,
                                         std::span<const double> deltas,
                                         const SweepOptions& options) {
  if (sigmas.empty() || taus.empty() || deltas.empty()) {
    throw std::invalid_argument("convergence_sweep: parameter arrays must be non-empty");
  }
  const auto bohmian =
      velocity_field(VelocityLaw::bohmian(), base.psi0, options.protocol.rho_min);
  const auto own = velocity_field(base.law, base.psi0, options.protocol.rho_min);
  std::vector<SweepCell> cells;
  for (double sigma : sigmas) {
    for (double tau : taus) {
      ProtocolConfig config = base;
      config.pointer.sigma = sigma;
      config.tau = tau;
      std::vector<WeakRunRecord> records;
      std::string error;
      try {
        records = run_protocol(config, options.protocol);
      } catch (const CensoringError& e) {
        error = e.what();
        records = e.records();
      } catch (const std::exception& e) {
        error = e.what();
      }
      for (double delta : deltas) {
        SweepCell cell;
        cell.sigma = sigma;
        cell.tau = tau;
        cell.delta = delta;
        cell.ok = error.empty();
        cell.error = error;
        if (!records.empty()) {
          try {
            fill_cell(cell, records, config, options, bohmian, own);
          } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
          }
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

}  // namespace weakflow
