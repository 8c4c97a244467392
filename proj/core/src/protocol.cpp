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
#include <sstream>

#include "weakflow/parallel.hpp"
#include "weakflow/rng.hpp"
#include "weakflow/trajectory.hpp"
#include "weakflow/weak_measurement.hpp"

namespace weakflow {
namespace {

// Modes whose magnitude is below this fraction of the largest one are
// dropped by the node evaluator; their total contribution stays near the
// FFT round-off level.
constexpr double kModeCutoff = 1e-15;

// Kinetic phases exp(-i hbar k^2 t / 2m) at the stage times idx * h / 2 and
// the n-th roots of unity, shared by every run of a free-potential protocol.
struct FreeTables {
  GridSpec grid;
  std::size_t times = 0;
  std::vector<double> k;
  std::vector<Complex> phase;  // times x n
  std::vector<Complex> roots;  // exp(2 pi i r / n)

  FreeTables(const GridSpec& g, Units units, double half_step, std::size_t time_count)
      : grid(g), times(time_count), k(wavenumbers(g.size(), g.length())) {
    const std::size_t n = g.size();
    const double c = units.hbar / (2.0 * units.mass);
    phase.resize(times * n);
    for (std::size_t t = 0; t < times; ++t) {
      const double time = static_cast<double>(t) * half_step;
      for (std::size_t m = 0; m < n; ++m) {
        phase[t * n + m] = std::polar(1.0, -c * k[m] * k[m] * time);
      }
    }
    roots.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      roots[r] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) /
                                     static_cast<double>(n));
    }
  }
};

// Stage source for a free evolution that evaluates psi and dpsi/dx only at
// the nodes the trajectory asks for, by direct sums over the significant
// Fourier modes of the initial state.
class SpectralStages {
 public:
  SpectralStages(const FreeTables& tables, const WaveFunction& psi,
                 const VelocityLaw& law, double rho_min)
      : tables_(tables), law_(law), rho_min_(rho_min), hbar_over_mass_(psi.units().hbar_over_mass()) {
    const std::size_t n = tables.grid.size();
    const Fft fft(n);
    spectrum_.resize(n);
    fft.forward(psi.amplitudes(), spectrum_);
    double peak = 0.0;
    for (const auto& c : spectrum_) peak = std::max(peak, std::abs(c));
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m) {
      if (std::abs(spectrum_[m]) < kModeCutoff * peak) continue;
      const Complex a = spectrum_[m] * inv_n;
      const double km = m == n / 2 ? 0.0 : tables.k[m];
      modes_.push_back({m, a, Complex(0.0, km) * a});
    }
  }

  const GridSpec& grid() const { return tables_.grid; }

  NodeVelocity node(int stage, std::size_t j) {
    auto& cache = cache_[static_cast<std::size_t>(stage)];
    for (const auto& [index, value] : cache) {
      if (index == j) return value;
    }
    const NodeVelocity value = evaluate(base_ + static_cast<std::size_t>(stage), j);
    cache.emplace_back(j, value);
    return value;
  }

  const GridCdf& cdf(int stage) {
    auto& slot = cdfs_[static_cast<std::size_t>(stage)];
    if (!slot) {
      const std::size_t n = tables_.grid.size();
      const std::size_t t = base_ + static_cast<std::size_t>(stage);
      std::vector<Complex> amp(n);
      for (std::size_t m = 0; m < n; ++m) amp[m] = spectrum_[m] * tables_.phase[t * n + m];
      Fft(n).inverse(amp, amp);
      std::vector<double> rho(n);
      for (std::size_t j = 0; j < n; ++j) rho[j] = std::norm(amp[j]);
      slot.emplace(tables_.grid, rho);
    }
    return *slot;
  }

  void next_step() {
    base_ += 2;
    cache_[0] = std::move(cache_[2]);
    cache_[1].clear();
    cache_[2].clear();
    cdfs_[0] = std::move(cdfs_[2]);
    cdfs_[1].reset();
    cdfs_[2].reset();
  }

 private:
  struct Mode {
    std::size_t m;
    Complex amp;
    Complex damp;
  };

  NodeVelocity evaluate(std::size_t t, std::size_t j) const {
    const std::size_t n = tables_.grid.size();
    const Complex* phase = tables_.phase.data() + t * n;
    Complex psi = 0.0;
    Complex dpsi = 0.0;
    for (const auto& mode : modes_) {
      const Complex w = phase[mode.m] * tables_.roots[(j * mode.m) % n];
      psi += mode.amp * w;
      dpsi += mode.damp * w;
    }
    const double rho = std::norm(psi);
    if (!(rho >= rho_min_) || rho == 0.0) return {};
    const double flux = hbar_over_mass_ * std::imag(std::conj(psi) * dpsi);
    return {(flux + law_.offset_current(tables_.grid.x(j))) / rho, true};
  }

  const FreeTables& tables_;
  VelocityLaw law_;
  double rho_min_;
  double hbar_over_mass_;
  std::vector<Complex> spectrum_;
  std::vector<Mode> modes_;
  std::size_t base_ = 0;
  std::array<std::vector<std::pair<std::size_t, NodeVelocity>>, 3> cache_;
  std::array<std::optional<GridCdf>, 3> cdfs_;
};

// Stage source that propagates the whole grid by half steps.
class GridStages {
 public:
  GridStages(const Propagator& half_step, WaveFunction psi, const VelocityLaw& law,
             double rho_min)
      : half_step_(half_step), law_(law), rho_min_(rho_min), psi_(std::move(psi)) {
    fields_[0] = velocity_field(law_, psi_, rho_min_);
    fill_step();
  }

  const GridSpec& grid() const { return psi_.grid(); }
  NodeVelocity node(int stage, std::size_t j) const {
    const auto& f = fields_[static_cast<std::size_t>(stage)];
    return {f.v[j], f.valid[j]};
  }
  const GridCdf& cdf(int stage) {
    auto& slot = cdfs_[static_cast<std::size_t>(stage)];
    if (!slot) {
      const auto& f = fields_[static_cast<std::size_t>(stage)];
      slot.emplace(f.grid, f.rho);
    }
    return *slot;
  }

  void next_step() {
    fields_[0] = std::move(fields_[2]);
    cdfs_[0] = std::move(cdfs_[2]);
    cdfs_[1].reset();
    cdfs_[2].reset();
    fill_step();
  }

 private:
  void fill_step() {
    psi_ = half_step_.step(psi_);
    fields_[1] = velocity_field(law_, psi_, rho_min_);
    psi_ = half_step_.step(psi_);
    fields_[2] = velocity_field(law_, psi_, rho_min_);
  }

  const Propagator& half_step_;
  VelocityLaw law_;
  double rho_min_;
  WaveFunction psi_;
  std::array<VelocityField, 3> fields_;
  std::array<std::optional<GridCdf>, 3> cdfs_;
};

static_assert(StageSource<SpectralStages>);
static_assert(StageSource<GridStages>);

template <class Stages>
void integrate(WeakRunRecord& record, const VelocityLaw& law, Stages& stages,
               std::size_t steps, double h) {
  double x = record.x0;
  for (std::size_t s = 0; s < steps; ++s) {
    if (s > 0) stages.next_step();
    const StepResult r = advance_trajectory(x, law, stages, h);
    if (r.status == StepStatus::censored) {
      record.x_tau.reset();
      return;
    }
    if (r.status == StepStatus::quantile) record.rerouted = true;
    x = r.x;
  }
  record.x_tau = x;
}

}  // namespace

CensoringError::CensoringError(double fraction, double bound,
                               std::vector<WeakRunRecord> records)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "run_protocol: censored fraction " << fraction << " exceeds bound " << bound;
        return os.str();
      }()),
      fraction_(fraction),
      records_(std::move(records)) {}

double censored_fraction(std::span<const WeakRunRecord> records) {
  if (records.empty()) return 0.0;
  const auto c = std::count_if(records.begin(), records.end(),
                               [](const WeakRunRecord& r) { return r.censored(); });
  return static_cast<double>(c) / static_cast<double>(records.size());
}

std::vector<WeakRunRecord> run_protocol(const ProtocolConfig& config,
                                        const ProtocolOptions& options) {
  if (!(config.tau > 0.0)) throw std::invalid_argument("run_protocol: tau must be positive");
  if (config.n_runs == 0) throw std::invalid_argument("run_protocol: n_runs must be >= 1");
  if (options.trajectory_steps == 0) {
    throw std::invalid_argument("run_protocol: trajectory_steps must be >= 1");
  }
  if (!(config.pointer.sigma > 0.0)) {
    throw std::invalid_argument("run_protocol: pointer sigma must be positive");
  }
  if (!(config.psi0.grid() == config.potential.grid())) {
    throw std::invalid_argument("run_protocol: state and potential grids differ");
  }

  const std::size_t steps = options.trajectory_steps;
  const double h = config.tau / static_cast<double>(steps);
  const PositionSampler sampler(config.psi0);
  const bool fast = options.spectral_fast_path && config.potential.is_free();
  std::optional<FreeTables> tables;
  std::optional<Propagator> half_step;
  if (fast) {
    tables.emplace(config.psi0.grid(), config.psi0.units(), 0.5 * h, 2 * steps + 1);
  } else {
    half_step.emplace(config.potential, 0.5 * h, config.psi0.units());
  }

  std::vector<WeakRunRecord> records(config.n_runs);
  parallel_for(config.n_runs, resolve_workers(options.workers), [&](std::size_t i) {
    WeakRunRecord& record = records[i];
    record.trajectory_seed = derive_seed(config.master_seed, i);
    Rng rng(derive_seed(record.trajectory_seed, 0));
    record.x0 = sampler.position(uniform01(rng));
    record.y = sample_pointer(config.pointer, record.x0, derive_seed(record.trajectory_seed, 1));
    const auto psi_plus = conditional_wavefunction(config.psi0, record.y, config.pointer);
    if (fast) {
      SpectralStages stages(*tables, psi_plus, config.law, options.rho_min);
      integrate(record, config.law, stages, steps, h);
    } else {
      GridStages stages(*half_step, psi_plus, config.law, options.rho_min);
      integrate(record, config.law, stages, steps, h);
    }
  });

  const double fraction = censored_fraction(records);
  if (fraction > options.censor_bound) {
    throw CensoringError(fraction, options.censor_bound, std::move(records));
  }
  return records;
}

}  // namespace weakflow
