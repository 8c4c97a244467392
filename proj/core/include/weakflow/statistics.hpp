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

// Post-selection bins, conditional means of the pointer reading, the
// finite-tau velocity estimator and parameter sweeps.

#ifndef WEAKFLOW_STATISTICS_HPP_
#define WEAKFLOW_STATISTICS_HPP_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weakflow/weak_measurement.hpp"

namespace weakflow {

inline constexpr std::size_t kDefaultMinBinCount = 200;

/// Cells [origin + k width, origin + (k + 1) width) of a fixed lattice.
/// Only the kept cells are bins; `lattice[b]` is the lattice index of bin b.
struct BinSpec {
  double origin = 0.0;
  double width = 0.0;
  std::vector<long> lattice;
  std::vector<double> centers;

  std::size_t size() const { return centers.size(); }
  /// Bin holding x, if that lattice cell is kept.
  std::optional<std::size_t> locate(double x) const;
};

/// Lattice anchored at grid.x_min(); keeps cells whose center lies where
/// the density (sampled on the grid, linearly interpolated) is >= rho_min.
BinSpec make_bins(const GridSpec& grid, double width, std::span<const double> density,
                  double rho_min = kDefaultRhoMin);

/// Bins with explicit centers; they must lie on one lattice of the given width.
BinSpec bins_from_centers(std::span<const double> centers, double width);

struct BinStatistic {
  double center = 0.0;
  std::size_t n = 0;
  double mean_y = 0.0;    // NaN when n == 0
  double stderr_y = 0.0;  // sample std / sqrt(n); NaN when n < 2
  double mean_x = 0.0;    // mean strong reading in the bin; NaN when n == 0
  bool reliable = false;  // n >= n_min
};

struct ConditionalEstimate {
  std::vector<BinStatistic> bins;
  double width = 0.0;
  std::size_t n_min = kDefaultMinBinCount;
  std::size_t censored = 0;
  std::size_t total = 0;
  double censored_fraction = 0.0;
};

/// Groups uncensored records by x_tau and summarizes y per bin. Records
/// outside every bin are dropped. Throws if no record is uncensored.
ConditionalEstimate conditional_mean_by_bin(std::span<const WeakRunRecord> records,
                                            const BinSpec& bins,
                                            std::size_t n_min = kDefaultMinBinCount);

/// Pointer readings of the uncensored records in each bin.
std::vector<std::vector<double>> readings_by_bin(std::span<const WeakRunRecord> records,
                                                 const BinSpec& bins);

/// Where the estimator places its position: the bin center, or the mean
/// strong reading of the records in the bin. The latter removes the
/// O(width^2) bias of a density gradient across the bin.
enum class EstimatorLocation { bin_center, mean_position };

struct VelocityBin {
  double center = 0.0;
  double location = 0.0;  // position the estimate refers to
  std::size_t n = 0;
  double v_hat = 0.0;
  double stderr_v = 0.0;
  bool reliable = false;
};

struct VelocityEstimate {
  std::vector<VelocityBin> bins;
  double tau = 0.0;
};

/// v_hat = (location - mean_y) / tau and stderr_v = stderr_y / tau.
VelocityEstimate weak_velocity_estimate(
    const ConditionalEstimate& cond, double tau,
    EstimatorLocation location = EstimatorLocation::mean_position);

/// Expected per-bin statistics of the protocol from the exact joint law of
/// (Y, X(tau)): rho(x, y) = |U(tau)[psi0 Phi(y - .)](x)|^2. Y is integrated by
/// the trapezoid rule with step sigma/4 over the support of psi0 widened by
/// 9 sigma; each bin is integrated exactly over the linear interpolant.
/// The joint law does not depend on the velocity law.
struct BinPrediction {
  double probability = 0.0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  double v_expected = 0.0;  // (mean_x - mean_y) / tau
};
std::vector<BinPrediction> predicted_bin_statistics(const WaveFunction& psi0,
                                                    const Potential& potential,
                                                    const PointerModel& pointer,
                                                    double tau, const BinSpec& bins);

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Asymptotic critical distance for a sample of size n at level alpha
/// (two-sided), sqrt(-ln(alpha / 2) / 2) / sqrt(n).
double ks_critical(std::size_t n, double alpha = 0.01);
/// Normal CDF with mean mu and standard deviation s.
double normal_cdf(double x, double mu, double s);

/// Least-squares line through (log x, log y); returns {slope, intercept}.
struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
};
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

/// One row of a sweep table: a bin of one (sigma, tau, delta) cell.
struct SweepRow {
  BinStatistic stat;
  VelocityBin estimate;
  double v_bohmian_ref = 0.0;  // NaN where the reference is masked
  double v_law_ref = 0.0;
  double v_expected = 0.0;     // NaN unless predictions were requested
};

struct SweepCell {
  double sigma = 0.0;
  double tau = 0.0;
  double delta = 0.0;
  bool ok = true;
  std::string error;  // set when ok is false
  double censored_fraction = 0.0;
  std::vector<SweepRow> rows;
  /// max over reliable bins of |v_hat - v_bohmian_ref|
  double max_bias = 0.0;
  /// max over reliable bins of |v_expected - v_bohmian_ref|
  double max_expected_bias = 0.0;
};

struct SweepOptions {
  ProtocolOptions protocol;
  std::size_t n_min = kDefaultMinBinCount;
  EstimatorLocation location = EstimatorLocation::mean_position;
  bool predict = true;
};

/// Runs the protocol once per (sigma, tau) and estimates with every delta
/// from the same records. Bins follow the density of psi0 evolved by tau.
/// References are the Bohmian and law velocity fields of psi0 at each bin's
/// location. A failing cell is kept with ok = false and its message.
std::vector<SweepCell> convergence_sweep(const ProtocolConfig& base,
                                         std::span<const double> sigmas,
                                         std::span<const double> taus,
                                         std::span<const double> deltas,
                                         const SweepOptions& options = {});

}  // namespace weakflow

#endif  // WEAKFLOW_STATISTICS_HPP_
