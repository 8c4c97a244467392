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

#include "weakflow/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

#include "weakflow/characterization.hpp"
#include "weakflow/parallel.hpp"
#include "weakflow/rng.hpp"
#include "weakflow/trajectory.hpp"

namespace weakflow {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.17g}", v);
}

CheckResult make_check(std::string id, double measured, double tolerance,
                       std::string comparison, std::string detail = {}) {
  bool pass = false;
  if (comparison == "<") pass = measured < tolerance;
  if (comparison == "<=") pass = measured <= tolerance;
  if (comparison == ">") pass = measured > tolerance;
  if (comparison == ">=") pass = measured >= tolerance;
  return {std::move(id), measured, tolerance, std::move(comparison), pass, std::move(detail)};
}

double field_at(const VelocityField& f, double x) {
  const auto v = interpolate_field(f, x);
  return v ? *v : kNaN;
}

double density_at(const GridSpec& grid, const std::vector<double>& rho, double x) {
  const double s = (grid.wrap_position(x) - grid.x_min()) / grid.dx();
  const auto j = std::min(static_cast<std::size_t>(s), grid.size() - 1);
  const double u = s - static_cast<double>(j);
  return (1.0 - u) * rho[j] + u * rho[(j + 1) % grid.size()];
}

ProtocolOptions protocol_options(const ExperimentConfig& c, unsigned workers) {
  ProtocolOptions o;
  o.trajectory_steps = c.protocol.trajectory_steps;
  o.rho_min = c.rho_min;
  o.censor_bound = c.protocol.censor_bound;
  o.workers = workers;
  o.spectral_fast_path = c.protocol.spectral_fast_path;
  return o;
}

// Records of one protocol batch; a censoring overflow is kept, not thrown.
struct Batch {
  std::vector<WeakRunRecord> records;
  double censored = 0.0;
  bool over_bound = false;
};

Batch run_batch(const ProtocolConfig& pc, const ProtocolOptions& options) {
  Batch b;
  try {
    b.records = run_protocol(pc, options);
  } catch (const CensoringError& e) {
    b.records = e.records();
    b.over_bound = true;
  }
  b.censored = censored_fraction(b.records);
  return b;
}

// Per-bin analysis of one batch.
struct Analysis {
  BinSpec bins;
  ConditionalEstimate cond;
  VelocityEstimate est;
  std::vector<BinPrediction> predicted;
  std::vector<double> v_bohmian;  // at each bin's location
  std::vector<double> v_law;
  std::vector<double> expected_ref;  // Bohmian velocity at the predicted location
};

Analysis analyze(const ExperimentConfig& c, const ProtocolConfig& pc,
                 std::span<const WeakRunRecord> records, const VelocityField& bohmian,
                 const VelocityField& own) {
  Analysis a;
  const auto later = evolve_for(pc.psi0, pc.potential, pc.tau, c.dt);
  a.bins = make_bins(pc.psi0.grid(), c.bin_width(), later.density(), c.rho_min);
  a.cond = conditional_mean_by_bin(records, a.bins, c.protocol.n_min);
  a.est = weak_velocity_estimate(a.cond, pc.tau, c.protocol.location);
  a.predicted = predicted_bin_statistics(pc.psi0, pc.potential, pc.pointer, pc.tau, a.bins);
  for (std::size_t k = 0; k < a.bins.size(); ++k) {
    a.v_bohmian.push_back(field_at(bohmian, a.est.bins[k].location));
    a.v_law.push_back(field_at(own, a.est.bins[k].location));
    a.expected_ref.push_back(field_at(bohmian, a.predicted[k].mean_x));
  }
  return a;
}

// Largest |v_expected - v_B| over bins expected to hold at least n_min runs.
double expected_bias(const Analysis& a, std::size_t runs, std::size_t n_min) {
  double bias = 0.0;
  for (std::size_t k = 0; k < a.bins.size(); ++k) {
    if (a.predicted[k].probability * static_cast<double>(runs) < static_cast<double>(n_min)) continue;
    if (std::isnan(a.expected_ref[k])) continue;
    bias = std::max(bias, std::abs(a.predicted[k].v_expected - a.expected_ref[k]));
  }
  return bias;
}

void append_sweep_rows(Table& t, const Analysis& a, double sigma, double tau, double delta,
                       const std::string& hash) {
  for (std::size_t k = 0; k < a.bins.size(); ++k) {
    const auto& s = a.cond.bins[k];
    const auto& e = a.est.bins[k];
    t.rows.push_back({num(sigma), num(tau), num(delta), num(s.center), std::to_string(s.n),
                      num(s.mean_y), num(s.stderr_y), num(e.v_hat), num(e.stderr_v),
                      num(a.v_bohmian[k]), num(a.v_law[k]), s.reliable ? "1" : "0",
                      num(e.location), num(a.predicted[k].v_expected), hash});
  }
}

Table sweep_table() {
  return {"sweep.csv",
          {"sigma", "tau", "delta", "bin_center", "n", "mean_Y", "stderr_Y", "v_hat", "stderr_v",
           "v_bohmian_ref", "v_law_ref", "reliable_flag", "x_mean", "v_expected", "config_hash"},
          {}};
}

void run_weak_velocity(const ExperimentConfig& c, unsigned workers, ResultBundle& out) {
  const auto psi0 = c.state("");
  const auto pot = c.potential(c.states.at("").potential);
  const auto options = protocol_options(c, workers);
  const ProtocolConfig pc{psi0, pot, c.law, PointerModel{c.protocol.sigma}, c.protocol.tau,
                          c.protocol.n_runs, c.seed};
  const auto bohmian = velocity_field(VelocityLaw::bohmian(), psi0, c.rho_min);
  const auto own = velocity_field(c.law, psi0, c.rho_min);
  const auto batch = run_batch(pc, options);
  const auto a = analyze(c, pc, batch.records, bohmian, own);
  const auto& grid = psi0.grid();
  const auto rho0 = psi0.density();
  const double rho_peak = *std::max_element(rho0.begin(), rho0.end());

  Table est{"estimates.csv",
            {"bin_center", "n", "mean_Y", "stderr_Y", "v_hat", "stderr_v", "v_bohmian_ref",
             "v_law_ref", "reliable_flag", "x_mean", "v_expected", "config_hash"},
            {}};
  for (std::size_t k = 0; k < a.bins.size(); ++k) {
    const auto& s = a.cond.bins[k];
    const auto& e = a.est.bins[k];
    est.rows.push_back({num(s.center), std::to_string(s.n), num(s.mean_y), num(s.stderr_y),
                        num(e.v_hat), num(e.stderr_v), num(a.v_bohmian[k]), num(a.v_law[k]),
                        s.reliable ? "1" : "0", num(e.location), num(a.predicted[k].v_expected),
                        out.config_hash});
  }
  out.tables.push_back(std::move(est));

  const double f = c.check.stat_factor;
  std::size_t reliable = 0;
  double scale = 0.0;
  for (std::size_t k = 0; k < a.bins.size(); ++k) {
    if (a.est.bins[k].reliable && !std::isnan(a.v_bohmian[k])) {
      ++reliable;
      scale = std::max(scale, std::abs(a.v_bohmian[k]));
    }
  }

  if (c.wants("v_bohmian")) {
    double worst = 0.0;
    double worst_x = kNaN;
    for (std::size_t k = 0; k < a.bins.size(); ++k) {
      const auto& e = a.est.bins[k];
      if (!e.reliable || std::isnan(a.v_bohmian[k])) continue;
      const double allowed = std::max(f * e.stderr_v, c.check.relative_floor * scale);
      const double ratio = std::abs(e.v_hat - a.v_bohmian[k]) / allowed;
      if (ratio > worst) {
        worst = ratio;
        worst_x = e.center;
      }
    }
    out.checks.push_back(make_check(
        "v_bohmian", worst, 1.0, "<",
        fmt::format("max over {} reliable bins of |v_hat - v_B| / max({} stderr, {} * {:.4g}); "
                    "worst bin at x = {:.4g}",
                    reliable, f, c.check.relative_floor, scale, worst_x)));
  }
  if (c.wants("reliable_bins")) {
    out.checks.push_back(make_check("reliable_bins", static_cast<double>(reliable),
                                    static_cast<double>(c.check.min_reliable_bins), ">=",
                                    fmt::format("bins with n >= {}", c.protocol.n_min)));
  }
  if (c.wants("censoring")) {
    out.checks.push_back(make_check(
        "censoring", batch.censored, c.protocol.censor_bound, "<",
        fmt::format("{} of {} runs censored", static_cast<std::size_t>(std::llround(
                                                   batch.censored * static_cast<double>(batch.records.size()))),
                    batch.records.size())));
  }

  if (c.wants("tau_sweep_bias") || c.wants("tau_sweep_consistency")) {
    auto taus = c.check.sweep_taus;
    std::sort(taus.begin(), taus.end(), std::greater<>());
    const std::size_t runs = c.check.sweep_runs.value_or(c.protocol.n_runs);
    Table sweep = sweep_table();
    std::vector<double> biases;
    double worst_ratio = 0.0;
    std::string bias_text;
    std::string consistency_text;
    for (double tau : taus) {
      ProtocolConfig cell = pc;
      cell.tau = tau;
      cell.n_runs = runs;
      Batch b;
      Analysis an;
      if (tau == pc.tau && runs == pc.n_runs) {
        an = a;
      } else {
        b = run_batch(cell, options);
        an = analyze(c, cell, b.records, bohmian, own);
      }
      append_sweep_rows(sweep, an, c.protocol.sigma, tau, c.bin_width(), out.config_hash);
      const double bias = expected_bias(an, runs, c.protocol.n_min);
      biases.push_back(bias);
      bias_text += fmt::format("{}tau={}: {:.4g}", bias_text.empty() ? "" : "; ", tau, bias);
      double cell_worst = 0.0;
      for (std::size_t k = 0; k < an.bins.size(); ++k) {
        const auto& e = an.est.bins[k];
        if (!e.reliable) continue;
        cell_worst = std::max(cell_worst,
                              std::abs(e.v_hat - an.predicted[k].v_expected) / (f * e.stderr_v));
      }
      worst_ratio = std::max(worst_ratio, cell_worst);
      consistency_text += fmt::format("{}tau={}: {:.3g}", consistency_text.empty() ? "" : "; ",
                                      tau, cell_worst);
    }
    out.tables.push_back(std::move(sweep));
    if (c.wants("tau_sweep_bias")) {
      double increase = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < biases.size(); ++i) {
        increase = std::max(increase, biases[i] - biases[i - 1]);
      }
      if (biases.size() < 2) increase = 0.0;
      out.checks.push_back(make_check(
          "tau_sweep_bias", increase, 0.0, "<=",
          "largest increase of the expected max-bin |v_hat - v_B| as tau shrinks; " + bias_text));
    }
    if (c.wants("tau_sweep_consistency")) {
      out.checks.push_back(make_check(
          "tau_sweep_consistency", worst_ratio, 1.0, "<",
          fmt::format("max |v_hat - v_expected| / ({} stderr) over reliable bins; {}", f,
                      consistency_text)));
    }
  }

  // Central bins: reliable, references defined, density above a fraction of the peak.
  auto central = [&](std::size_t k) {
    const auto& e = a.est.bins[k];
    return e.reliable && !std::isnan(a.v_bohmian[k]) && !std::isnan(a.v_law[k]) &&
           density_at(grid, rho0, e.location) >= c.check.central_fraction * rho_peak;
  };

  if (c.wants("law_separation")) {
    double worst = std::numeric_limits<double>::infinity();
    std::size_t qualifying = 0, separated = 0;
    double se_sum = 0.0, offset_sum = 0.0;
    for (std::size_t k = 0; k < a.bins.size(); ++k) {
      if (!central(k)) continue;
      const double offset = std::abs(a.v_law[k] - a.v_bohmian[k]);
      if (offset <= c.check.separation_threshold) continue;
      const auto& e = a.est.bins[k];
      ++qualifying;
      se_sum += e.stderr_v;
      offset_sum += offset;
      const double ratio = std::abs(e.v_hat - a.v_law[k]) / (f * e.stderr_v);
      if (ratio > 1.0) ++separated;
      worst = std::min(worst, ratio);
    }
    if (qualifying == 0) worst = 0.0;
    const double q = std::max<double>(1.0, static_cast<double>(qualifying));
    out.checks.push_back(make_check(
        "law_separation", worst, 1.0, ">",
        fmt::format("min over {} central bins with |v_law - v_B| > {} of |v_hat - v_law| / ({} "
                    "stderr); {} bins separated; mean stderr_v {:.3g}, mean |v_law - v_B| {:.3g}",
                    qualifying, c.check.separation_threshold, f, separated, se_sum / q,
                    offset_sum / q)));
  }
  if (c.wants("expected_separation")) {
    double worst = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < a.bins.size(); ++k) {
      if (!central(k) || std::isnan(a.expected_ref[k])) continue;
      const double offset = std::abs(field_at(own, a.predicted[k].mean_x) - a.expected_ref[k]);
      if (!(offset > 0.0)) continue;
      ++used;
      worst = std::max(worst, std::abs(a.predicted[k].v_expected - a.expected_ref[k]) / offset);
    }
    out.checks.push_back(make_check(
        "expected_separation", used ? worst : kNaN, 0.1, "<",
        fmt::format("max over {} central bins of |E v_hat - v_B| / |v_law - v_B| from the exact "
                    "joint law of (Y, X(tau))",
                    used)));
  }
  if (c.wants("pointer_law")) {
    const auto readings = readings_by_bin(batch.records, a.bins);
    Table ks{"pointer_ks.csv",
             {"bin_center", "n", "ks_distance", "ks_critical", "pass", "config_hash"}, {}};
    double worst = 0.0;
    std::size_t tested = 0;
    for (std::size_t k = 0; k < a.bins.size(); ++k) {
      const auto& e = a.est.bins[k];
      if (!e.reliable || e.n < c.check.ks_min_count || std::isnan(a.v_bohmian[k])) continue;
      const double mu = e.location - a.v_bohmian[k] * pc.tau;
      const double d = ks_statistic(readings[k], [&](double y) {
        return normal_cdf(y, mu, c.protocol.sigma);
      });
      const double crit = ks_critical(e.n, c.check.ks_alpha);
      ++tested;
      worst = std::max(worst, d / crit);
      ks.rows.push_back({num(e.center), std::to_string(e.n), num(d), num(crit),
                         d < crit ? "1" : "0", out.config_hash});
    }
    out.tables.push_back(std::move(ks));
    out.checks.push_back(make_check(
        "pointer_law", tested ? worst : kNaN, 1.0, "<",
        fmt::format("max KS distance / critical value (alpha = {}) over {} bins with n >= {}",
                    c.check.ks_alpha, tested, c.check.ks_min_count)));
  }
  if (c.wants("pointer_mean")) {
    double sum_y = 0.0;
    for (const auto& r : batch.records) sum_y += r.y;
    const double n = static_cast<double>(batch.records.size());
    double mean_x = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) mean_x += grid.x(j) * rho0[j] * grid.dx();
    const double diff = std::abs(sum_y / n - mean_x);
    out.checks.push_back(make_check(
        "pointer_mean", diff, c.check.mean_factor * c.protocol.sigma / std::sqrt(n), "<",
        fmt::format("|mean Y - E X| with mean Y = {:.6g} over {} runs, E X = {:.6g}", sum_y / n,
                    batch.records.size(), mean_x)));
  }
}

void run_sweep(const ExperimentConfig& c, unsigned workers, ResultBundle& out) {
  const auto psi0 = c.state("");
  const auto pot = c.potential(c.states.at("").potential);
  const ProtocolConfig pc{psi0, pot, c.law, PointerModel{c.protocol.sigma}, c.protocol.tau,
                          c.protocol.n_runs, c.seed};
  SweepOptions options;
  options.protocol = protocol_options(c, workers);
  options.n_min = c.protocol.n_min;
  options.location = c.protocol.location;
  const auto cells = convergence_sweep(pc, c.sweep.sigmas, c.sweep.taus, c.sweep.deltas, options);

  Table t = sweep_table();
  t.header.insert(t.header.end() - 1, {"cell_ok", "cell_error"});
  for (const auto& cell : cells) {
    for (const auto& row : cell.rows) {
      const auto& s = row.stat;
      const auto& e = row.estimate;
      t.rows.push_back({num(cell.sigma), num(cell.tau), num(cell.delta), num(s.center),
                        std::to_string(s.n), num(s.mean_y), num(s.stderr_y), num(e.v_hat),
                        num(e.stderr_v), num(row.v_bohmian_ref), num(row.v_law_ref),
                        s.reliable ? "1" : "0", num(e.location), num(row.v_expected),
                        cell.ok ? "1" : "0", "\"" + cell.error + "\"", out.config_hash});
    }
    if (cell.rows.empty()) {
      std::vector<std::string> row{num(cell.sigma), num(cell.tau), num(cell.delta)};
      row.resize(14, "nan");
      row.push_back("0");
      row.push_back("\"" + cell.error + "\"");
      row.push_back(out.config_hash);
      t.rows.push_back(std::move(row));
    }
  }
  out.tables.push_back(std::move(t));

  if (c.wants("tau_slope")) {
    double worst = 0.0;
    std::string detail;
    bool failed_cell = false;
    for (double sigma : c.sweep.sigmas) {
      std::vector<double> taus, bias;
      for (const auto& cell : cells) {
        if (cell.sigma != sigma || cell.delta != c.sweep.deltas.front()) continue;
        if (!cell.ok) failed_cell = true;
        taus.push_back(cell.tau);
        bias.push_back(cell.max_expected_bias);
      }
      if (taus.size() < 2) continue;
      if (std::any_of(bias.begin(), bias.end(), [](double b) { return !(b > 0.0); })) {
        failed_cell = true;
        detail += fmt::format("{}sigma={}: a cell has no reliable bins", detail.empty() ? "" : "; ", sigma);
        continue;
      }
      const auto fit = fit_power_law(taus, bias);
      worst = std::max(worst, std::abs(fit.slope - c.check.slope));
      detail += fmt::format("{}sigma={}: slope {:.4f}", detail.empty() ? "" : "; ", sigma, fit.slope);
    }
    if (failed_cell) {
      worst = std::numeric_limits<double>::infinity();
      detail += "; a sweep cell failed";
    }
    out.checks.push_back(make_check(
        "tau_slope", worst, c.check.slope_tolerance, "<=",
        fmt::format("|fitted log-log slope of expected max-bin bias vs tau - {}|; {}",
                    c.check.slope, detail)));
  }
}

void run_analytic(const ExperimentConfig& c, ResultBundle& out) {
  auto names = c.analytic.states;
  if (names.empty()) names.push_back("");
  Table t{"weak_values.csv", {"state", "x", "v_weak", "v_bohmian", "valid", "config_hash"}, {}};
  double worst = 0.0;
  std::string detail;
  for (const auto& name : names) {
    const auto psi = c.state(name);
    const auto pot = c.potential(c.states.at(name).potential);
    const auto weak = extrapolated_weak_value_field(psi, pot, c.analytic.tau, c.rho_min);
    const auto ref = velocity_field(VelocityLaw::bohmian(), psi, c.rho_min);
    double err = 0.0;
    std::size_t valid = 0;
    for (std::size_t j = 0; j < psi.size(); ++j) {
      const bool ok = weak.valid[j] && ref.valid[j];
      if (ok) {
        ++valid;
        err = std::max(err, std::abs(weak.v[j] - ref.v[j]));
      }
      t.rows.push_back({name.empty() ? "state" : name, num(psi.grid().x(j)),
                        weak.valid[j] ? num(weak.v[j]) : "nan", ref.valid[j] ? num(ref.v[j]) : "nan",
                        ok ? "1" : "0", out.config_hash});
    }
    worst = std::max(worst, err);
    detail += fmt::format("{}{}: {:.3g} over {} points", detail.empty() ? "" : "; ",
                          name.empty() ? "state" : name, err, valid);
  }
  out.tables.push_back(std::move(t));
  if (c.wants("weak_value_identity")) {
    out.checks.push_back(make_check("weak_value_identity", worst, c.analytic.tolerance, "<",
                                    "L-infinity |extrapolated weak value - j/rho|; " + detail));
  }
}

void run_characterize(const ExperimentConfig& c, ResultBundle& out) {
  const auto psi = c.state("");
  const auto pot = c.potential(c.states.at("").potential);
  const auto& k = c.characterize;
  const auto& grid = psi.grid();
  std::vector<MultiplierFamily> families;
  for (double sigma : k.sigmas) {
    std::vector<double> offsets;
    for (double o : k.offsets) offsets.push_back(o * sigma);
    families.push_back(MultiplierFamily::gaussian(sigma, offsets));
  }

  Table t{"characterization.csv",
          {"sigma", "bohmian_deviation", "law_deviation_bulk", "config_hash"}, {}};
  double bohmian_worst = 0.0;
  std::vector<double> law_dev;
  for (std::size_t i = 0; i < families.size(); ++i) {
    const double b = multiplication_deviation(VelocityLaw::bohmian(), psi, families[i], c.rho_min)
                         .max_deviation;
    const double v =
        multiplication_deviation(c.law, psi, families[i], c.rho_min, k.bulk_fraction).max_deviation;
    bohmian_worst = std::max(bohmian_worst, b);
    law_dev.push_back(v);
    t.rows.push_back({num(k.sigmas[i]), num(b), num(v), out.config_hash});
  }
  out.tables.push_back(std::move(t));
  if (c.wants("bohmian_invariance")) {
    out.checks.push_back(make_check("bohmian_invariance", bohmian_worst, k.invariance_tolerance,
                                    "<=", "max |v^(psi phi) - v^psi| for the Bohmian law"));
  }
  if (c.wants("variant_scaling")) {
    double measured = std::numeric_limits<double>::infinity();
    std::string detail = "fewer than two sigmas";
    if (k.sigmas.size() >= 2) {
      const auto fit = fit_power_law(k.sigmas, law_dev);
      measured = std::abs(-fit.slope - k.slope);
      detail = fmt::format("deviation ~ c / sigma^p with p = {:.4f} on rho >= {} max rho",
                           -fit.slope, k.bulk_fraction);
    }
    out.checks.push_back(make_check("variant_scaling", measured, k.slope_tolerance, "<=",
                                    "|p - " + num(k.slope) + "|; " + detail));
  }

  const auto witness_family = MultiplierFamily::gaussian(k.witness_spread, k.witness_offsets);
  const auto pair =
      make_current_pair(VelocityLaw::bohmian(), c.law, psi, pot, k.residual_dt, c.rho_min);
  const auto w_gauss = uniqueness_witness(pair, witness_family);
  const auto w_const = uniqueness_witness(pair, MultiplierFamily::constant(witness_family.size()));
  Table wt{"witness.csv", {"x", "w_gaussian", "w_closed_form", "w_constant", "valid", "config_hash"}, {}};
  double min_ratio = std::numeric_limits<double>::infinity();
  double const_max = 0.0;
  const double s2 = k.witness_spread * k.witness_spread;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    double closed = 0.0;
    for (std::size_t m = 0; m < witness_family.size(); ++m) {
      const double phi = witness_family.value(m, x);
      closed = std::max(closed, std::abs(phi * phi * (witness_family.offsets[m] - x) / s2));
    }
    closed *= std::abs(c.law.epsilon);
    if (pair.valid[j]) {
      if (closed > 0.0) min_ratio = std::min(min_ratio, w_gauss[j] / closed);
      const_max = std::max(const_max, w_const[j]);
    }
    wt.rows.push_back({num(x), num(w_gauss[j]), num(closed), num(w_const[j]),
                       pair.valid[j] ? "1" : "0", out.config_hash});
  }
  out.tables.push_back(std::move(wt));
  if (c.wants("witness_separation")) {
    out.checks.push_back(make_check(
        "witness_separation", min_ratio, k.witness_fraction, ">=",
        fmt::format("min over the valid mask of W / closed form, Gaussian family of spread {} "
                    "with {} offsets",
                    k.witness_spread, witness_family.size())));
  }
  if (c.wants("witness_constant")) {
    out.checks.push_back(make_check("witness_constant", const_max, k.constant_tolerance, "<=",
                                    "max W over the valid mask for the constant family"));
  }
  if (c.wants("catalog_triangle")) {
    const auto report = law_catalog_triangle(psi, {VelocityLaw::bohmian(), c.law}, families,
                                             c.rho_min, k.invariance_tolerance);
    std::string detail;
    double inconsistent = 0.0;
    for (const auto& e : report.entries) {
      if (!e.consistent) inconsistent += 1.0;
      detail += fmt::format("{}{}: deviation {:.3g}, |v - v_B| {:.3g}", detail.empty() ? "" : "; ",
                            e.law, e.max_deviation, e.field_difference);
    }
    if (!report.pass && inconsistent == 0.0) inconsistent = 1.0;
    out.checks.push_back(make_check("catalog_triangle", inconsistent, 0.0, "<=", detail));
  }
}

void run_equivariance(const ExperimentConfig& c, unsigned workers, ResultBundle& out) {
  const auto psi = c.state("");
  const auto pot = c.potential(c.states.at("").potential);
  const auto& k = c.equivariance;
  Table t{"equivariance.csv",
          {"law", "continuity_residual", "ks_distance", "ks_critical", "censored", "rerouted",
           "config_hash"},
          {}};
  double residual_worst = 0.0;
  double ks_worst = 0.0;
  double censored_worst = 0.0;
  std::string detail;
  const auto positions = c.wants("transport_ks")
                             ? sample_positions(psi, k.n_samples, derive_seed(c.seed, 0))
                             : std::vector<double>{};
  for (const auto& law : k.laws) {
    const auto r = continuity_residual(psi, pot, law, k.residual_dt, c.rho_min, k.residual_tolerance);
    residual_worst = std::max(residual_worst, r.max_abs_residual);
    double d = kNaN, crit = kNaN;
    std::size_t censored = 0, rerouted = 0;
    if (!positions.empty()) {
      const auto moved =
          transport_ensemble(positions, law, psi, pot, k.duration, c.dt, workers, c.rho_min);
      std::vector<double> kept;
      for (std::size_t i = 0; i < moved.positions.size(); ++i) {
        if (moved.status[i] != StepStatus::censored) kept.push_back(moved.positions[i]);
      }
      censored = moved.censored;
      rerouted = moved.rerouted;
      const GridCdf cdf(psi.grid(), moved.final_state.density());
      d = ks_statistic(kept, [&](double x) { return cdf(x); });
      crit = ks_critical(kept.size(), k.ks_alpha);
      ks_worst = std::max(ks_worst, d / crit);
      censored_worst = std::max(censored_worst, static_cast<double>(censored) /
                                                    static_cast<double>(positions.size()));
      detail += fmt::format("{}{}: D = {:.4g}, critical {:.4g}, censored {}, rerouted {}",
                            detail.empty() ? "" : "; ", law.name(), d, crit, censored, rerouted);
    }
    t.rows.push_back({law.name(), num(r.max_abs_residual), num(d), num(crit),
                      std::to_string(censored), std::to_string(rerouted), out.config_hash});
  }
  if (c.wants("continuity")) {
    out.checks.push_back(make_check("continuity", residual_worst, k.residual_tolerance, "<",
                                    "max continuity residual over the laws"));
  }
  if (c.wants("broken_law_flagged")) {
    const double eps = c.law.epsilon != 0.0 ? c.law.epsilon : 0.2;
    const auto broken = VelocityLaw::linear_offset(eps);
    const auto r = continuity_residual(psi, pot, broken, k.residual_dt, c.rho_min, k.residual_tolerance);
    t.rows.push_back({broken.name(), num(r.max_abs_residual), "nan", "nan", "0", "0", out.config_hash});
    out.checks.push_back(make_check("broken_law_flagged", r.max_abs_residual, k.residual_tolerance,
                                    ">", "residual of " + broken.name()));
  }
  out.tables.push_back(std::move(t));
  if (c.wants("transport_ks")) {
    const bool censor_ok = censored_worst <= c.protocol.censor_bound;
    auto check = make_check(
        "transport_ks", censor_ok ? ks_worst : std::numeric_limits<double>::infinity(), 1.0, "<",
        fmt::format("max KS distance / critical value against |psi_t|^2 at t = {}; {}", k.duration,
                    detail));
    out.checks.push_back(std::move(check));
  }
}

}  // namespace

ResultBundle run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ResultBundle out;
  out.name = config.name;
  out.kind = config.kind;
  out.config_echo = config_echo(config);
  out.config_hash = config_hash(config);
  out.version = library_version();
  out.seed = config.seed;
  out.workers = resolve_workers(config.workers);
  try {
    switch (config.kind) {
      case ExperimentKind::weak_velocity: run_weak_velocity(config, out.workers, out); break;
      case ExperimentKind::sweep: run_sweep(config, out.workers, out); break;
      case ExperimentKind::analytic_wv: run_analytic(config, out); break;
      case ExperimentKind::characterize: run_characterize(config, out); break;
      case ExperimentKind::equivariance: run_equivariance(config, out.workers, out); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(config.name + " (" + to_string(config.kind) + "): " + e.what());
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace weakflow
