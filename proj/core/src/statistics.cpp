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

#include "weakflow/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace weakflow {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Running integral of the piecewise-linear interpolant of node values.
class LinearIntegral {
 public:
  LinearIntegral(const GridSpec& grid, std::vector<double> values)
      : grid_(grid), f_(std::move(values)), prefix_(f_.size() + 1, 0.0) {
    const std::size_t n = f_.size();
    for (std::size_t j = 0; j < n; ++j) {
      prefix_[j + 1] = prefix_[j] + 0.5 * (f_[j] + f_[(j + 1) % n]) * grid_.dx();
    }
  }

  // Integral over [x_min, x] for x in [x_min, x_max].
  double upto(double x) const {
    const double s = std::clamp((x - grid_.x_min()) / grid_.dx(), 0.0,
                                static_cast<double>(f_.size()));
    const auto j = std::min(static_cast<std::size_t>(s), f_.size() - 1);
    const double u = s - static_cast<double>(j);
    const double a = f_[j];
    const double b = f_[(j + 1) % f_.size()];
    return prefix_[j] + grid_.dx() * (a * u + 0.5 * (b - a) * u * u);
  }

  double over(double lo, double hi) const { return upto(hi) - upto(lo); }

 private:
  GridSpec grid_;
  std::vector<double> f_;
  std::vector<double> prefix_;
};

}  // namespace

std::optional<std::size_t> BinSpec::locate(double x) const {
  if (!(width > 0.0) || !std::isfinite(x)) return std::nullopt;
  const auto k = static_cast<long>(std::floor((x - origin) / width));
  const auto it = std::lower_bound(lattice.begin(), lattice.end(), k);
  if (it == lattice.end() || *it != k) return std::nullopt;
  return static_cast<std::size_t>(it - lattice.begin());
}

BinSpec make_bins(const GridSpec& grid, double width, std::span<const double> density,
                  double rho_min) {
  if (!(width > 0.0)) throw std::invalid_argument("make_bins: width must be positive");
  if (density.size() != grid.size()) {
    throw std::invalid_argument("make_bins: density length != grid size");
  }
  BinSpec bins;
  bins.origin = grid.x_min();
  bins.width = width;
  const auto cells = static_cast<long>(std::floor(grid.length() / width + 1e-9));
  for (long k = 0; k < cells; ++k) {
    const double c = bins.origin + (static_cast<double>(k) + 0.5) * width;
    const double s = (c - grid.x_min()) / grid.dx();
    const auto j = std::min(static_cast<std::size_t>(s), grid.size() - 1);
    const double u = s - static_cast<double>(j);
    const double rho = (1.0 - u) * density[j] + u * density[(j + 1) % grid.size()];
    if (rho >= rho_min) {
      bins.lattice.push_back(k);
      bins.centers.push_back(c);
    }
  }
  return bins;
}

BinSpec bins_from_centers(std::span<const double> centers, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("bins_from_centers: width must be positive");
  if (centers.empty()) throw std::invalid_argument("bins_from_centers: no centers");
  BinSpec bins;
  bins.width = width;
  std::vector<double> sorted(centers.begin(), centers.end());
  std::sort(sorted.begin(), sorted.end());
  bins.origin = sorted.front() - 0.5 * width;
  for (double c : sorted) {
    const double k = (c - bins.origin) / width - 0.5;
    const double rounded = std::round(k);
    if (std::abs(k - rounded) > 1e-9) {
      throw std::invalid_argument("bins_from_centers: centers are not on one lattice");
    }
    const auto idx = static_cast<long>(rounded);
    if (!bins.lattice.empty() && bins.lattice.back() == idx) {
      throw std::invalid_argument("bins_from_centers: duplicate center");
    }
    bins.lattice.push_back(idx);
    bins.centers.push_back(c);
  }
  return bins;
}

ConditionalEstimate conditional_mean_by_bin(std::span<const WeakRunRecord> records,
                                            const BinSpec& bins, std::size_t n_min) {
  ConditionalEstimate out;
  out.width = bins.width;
  out.n_min = n_min;
  out.total = records.size();
  out.bins.resize(bins.size());
  std::vector<double> sum_y(bins.size(), 0.0), sum_x(bins.size(), 0.0);
  std::vector<std::optional<std::size_t>> slot(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.censored()) {
      ++out.censored;
      continue;
    }
    slot[i] = bins.locate(*r.x_tau);
    if (!slot[i]) continue;
    auto& b = out.bins[*slot[i]];
    ++b.n;
    sum_y[*slot[i]] += r.y;
    sum_x[*slot[i]] += *r.x_tau;
  }
  if (out.censored == records.size()) {
    throw std::invalid_argument("conditional_mean_by_bin: no uncensored records");
  }
  out.censored_fraction =
      static_cast<double>(out.censored) / static_cast<double>(records.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    auto& b = out.bins[k];
    b.center = bins.centers[k];
    const double n = static_cast<double>(b.n);
    b.mean_y = b.n > 0 ? sum_y[k] / n : kNaN;
    b.mean_x = b.n > 0 ? sum_x[k] / n : kNaN;
  }
  std::vector<double> sq(bins.size(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!slot[i]) continue;
    const double d = records[i].y - out.bins[*slot[i]].mean_y;
    sq[*slot[i]] += d * d;
  }
  for (std::size_t k = 0; k < bins.size(); ++k) {
    auto& b = out.bins[k];
    const double n = static_cast<double>(b.n);
    b.stderr_y = b.n >= 2 ? std::sqrt(sq[k] / (n - 1.0)) / std::sqrt(n) : kNaN;
    b.reliable = b.n >= n_min && b.n >= 2;
  }
  return out;
}

std::vector<std::vector<double>> readings_by_bin(std::span<const WeakRunRecord> records,
                                                 const BinSpec& bins) {
  std::vector<std::vector<double>> out(bins.size());
  for (const auto& r : records) {
    if (r.censored()) continue;
    if (const auto k = bins.locate(*r.x_tau)) out[*k].push_back(r.y);
  }
  return out;
}

VelocityEstimate weak_velocity_estimate(const ConditionalEstimate& cond, double tau,
                                        EstimatorLocation location) {
  if (!(tau > 0.0)) throw std::invalid_argument("weak_velocity_estimate: tau <= 0");
  VelocityEstimate out;
  out.tau = tau;
  out.bins.reserve(cond.bins.size());
  for (const auto& b : cond.bins) {
    VelocityBin v;
    v.center = b.center;
    v.location = location == EstimatorLocation::bin_center || b.n == 0 ? b.center : b.mean_x;
    v.n = b.n;
    v.v_hat = (v.location - b.mean_y) / tau;
    v.stderr_v = b.stderr_y / tau;
    v.reliable = b.reliable;
    out.bins.push_back(v);
  }
  return out;
}

std::vector<BinPrediction> predicted_bin_statistics(const WaveFunction& psi0,
                                                    const Potential& potential,
                                                    const PointerModel& pointer,
                                                    double tau, const BinSpec& bins) {
  if (!(tau > 0.0)) throw std::invalid_argument("predicted_bin_statistics: tau <= 0");
  const auto& grid = psi0.grid();
  const auto rho0 = psi0.density();
  const double peak = *std::max_element(rho0.begin(), rho0.end());
  std::size_t lo = 0, hi = rho0.size() - 1;
  while (rho0[lo] <= 1e-18 * peak) ++lo;
  while (rho0[hi] <= 1e-18 * peak) --hi;
  const double sigma = pointer.sigma;
  const double y_lo = grid.x(lo) - 9.0 * sigma;
  const double y_hi = grid.x(hi) + 9.0 * sigma;
  const double step = 0.25 * sigma;
  const auto count = static_cast<std::size_t>(std::ceil((y_hi - y_lo) / step)) + 1;
  const auto xs = grid.points();
  const double dt_max = std::min(tau, 1e-3);

  std::vector<double> prob(bins.size(), 0.0), sx(bins.size(), 0.0), sy(bins.size(), 0.0);
  for (std::size_t q = 0; q < count; ++q) {
    const double y = y_lo + static_cast<double>(q) * step;
    const double w = (q == 0 || q + 1 == count) ? 0.5 * step : step;
    std::vector<double> phi(grid.size());
    for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = pointer.amplitude(y - xs[j]);
    const auto later =
        evolve_for(multiply(psi0, std::span<const double>(phi)), potential, tau, dt_max);
    auto rho = later.density();
    std::vector<double> xrho(rho.size());
    for (std::size_t j = 0; j < rho.size(); ++j) xrho[j] = xs[j] * rho[j];
    const LinearIntegral mass(grid, std::move(rho));
    const LinearIntegral first(grid, std::move(xrho));
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const double a = bins.centers[k] - 0.5 * bins.width;
      const double b = bins.centers[k] + 0.5 * bins.width;
      const double m = w * mass.over(a, b);
      prob[k] += m;
      sy[k] += y * m;
      sx[k] += w * first.over(a, b);
    }
  }
  std::vector<BinPrediction> out(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    out[k].probability = prob[k];
    out[k].mean_x = prob[k] > 0.0 ? sx[k] / prob[k] : kNaN;
    out[k].mean_y = prob[k] > 0.0 ? sy[k] / prob[k] : kNaN;
    out[k].v_expected = (out[k].mean_x - out[k].mean_y) / tau;
  }
  return out;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical(std::size_t n, double alpha) {
  if (n == 0) throw std::invalid_argument("ks_critical: n == 0");
  return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(n));
}

double normal_cdf(double x, double mu, double s) {
  return 0.5 * std::erfc(-(x - mu) / (s * std::numbers::sqrt2));
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_power_law: need two or more paired points");
  }
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("fit_power_law: values must be positive");
    }
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_power_law: x values all equal");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace weakflow
