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

#include "weakflow/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace weakflow {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string suggestion(const std::string& word, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto& c : candidates) {
    const auto d = edit_distance(word, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best.empty() || best_d > std::max<std::size_t>(2, word.size() / 2)) return {};
  return fmt::format(" (did you mean '{}'?)", best);
}

std::string format_double(double v) { return fmt::format("{}", v); }

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

std::string join_strings(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
  return out;
}

struct RawEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct RawSection {
  std::string name;
  int line = 0;
  std::map<std::string, RawEntry> entries;
};

// Reads typed values from one section and reports every problem into a
// shared violation list. Each getter registers its key as known, so the
// unknown-key check at the end knows the full schema of the section.
class SectionReader {
 public:
  SectionReader(RawSection& section, std::vector<std::string>& errors, std::string source)
      : section_(section), errors_(errors), source_(std::move(source)) {}

  using Check = std::function<const char*(double)>;

  bool number(const std::string& key, double& out, const Check& check = {}) {
    auto* e = take(key);
    if (!e) return false;
    double v = 0.0;
    if (!to_double(e->value, v)) return fail(*e, key, "is not a number");
    if (check) {
      if (const char* why = check(v)) return fail(*e, key, why);
    }
    out = v;
    return true;
  }

  bool optional_number(const std::string& key, std::optional<double>& out, const Check& check) {
    double v = 0.0;
    if (!number(key, v, check)) return false;
    out = v;
    return true;
  }

  bool count(const std::string& key, std::size_t& out, std::size_t min_value) {
    auto* e = take(key);
    if (!e) return false;
    double v = 0.0;
    if (!to_double(e->value, v) || v != std::floor(v) || v < 0 || v > 1e15) {
      return fail(*e, key, "is not a non-negative integer");
    }
    if (v < static_cast<double>(min_value)) {
      return fail(*e, key, fmt::format("must be >= {}", min_value).c_str());
    }
    out = static_cast<std::size_t>(v);
    return true;
  }

  bool seed(const std::string& key, std::uint64_t& out) {
    auto* e = take(key);
    if (!e) return false;
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(e->value, &pos, 0);
      if (pos != e->value.size() || e->value.front() == '-') throw std::invalid_argument("");
      out = v;
      return true;
    } catch (const std::exception&) {
      return fail(*e, key, "is not an unsigned 64-bit integer");
    }
  }

  bool boolean(const std::string& key, bool& out) {
    auto* e = take(key);
    if (!e) return false;
    if (e->value == "true" || e->value == "yes" || e->value == "1") {
      out = true;
    } else if (e->value == "false" || e->value == "no" || e->value == "0") {
      out = false;
    } else {
      return fail(*e, key, "must be true or false");
    }
    return true;
  }

  bool text(const std::string& key, std::string& out) {
    auto* e = take(key);
    if (!e) return false;
    out = e->value;
    return true;
  }

  template <class Enum>
  bool choice(const std::string& key, Enum& out, const std::vector<std::pair<std::string, Enum>>& options) {
    auto* e = take(key);
    if (!e) return false;
    for (const auto& [name, value] : options) {
      if (e->value == name) {
        out = value;
        return true;
      }
    }
    std::vector<std::string> names;
    for (const auto& o : options) names.push_back(o.first);
    return fail(*e, key, fmt::format("must be one of {{{}}}{}", join_strings(names),
                                     suggestion(e->value, names)).c_str());
  }

  bool numbers(const std::string& key, std::vector<double>& out, const Check& check = {},
               bool allow_empty = false) {
    auto* e = take(key);
    if (!e) return false;
    std::vector<double> values;
    for (const auto& item : split_list(e->value)) {
      double v = 0.0;
      if (!to_double(item, v)) return fail(*e, key, "is not a comma-separated list of numbers");
      if (check) {
        if (const char* why = check(v)) return fail(*e, key, fmt::format("entries {}", why).c_str());
      }
      values.push_back(v);
    }
    if (values.empty() && !allow_empty) return fail(*e, key, "must list at least one number");
    out = std::move(values);
    return true;
  }

  bool words(const std::string& key, std::vector<std::string>& out) {
    auto* e = take(key);
    if (!e) return false;
    out = split_list(e->value);
    return true;
  }

  void error(const std::string& key, const std::string& message) {
    const auto it = section_.entries.find(key);
    const int line = it != section_.entries.end() ? it->second.line : section_.line;
    errors_.push_back(fmt::format("{}:{}: [{}] {}: {}", source_, line, section_.name, key, message));
  }

  void finish() {
    for (auto& [key, e] : section_.entries) {
      if (e.used) continue;
      errors_.push_back(fmt::format("{}:{}: [{}] unknown key '{}'{}", source_, e.line,
                                    section_.name, key, suggestion(key, known_)));
    }
  }

 private:
  RawEntry* take(const std::string& key) {
    known_.push_back(key);
    const auto it = section_.entries.find(key);
    if (it == section_.entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  static bool to_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(v);
  }

  bool fail(const RawEntry& e, const std::string& key, const char* why) {
    errors_.push_back(fmt::format("{}:{}: [{}] {} = {}: {}", source_, e.line, section_.name, key,
                                  e.value, why));
    return false;
  }

  RawSection& section_;
  std::vector<std::string>& errors_;
  std::string source_;
  std::vector<std::string> known_;
};

const char* positive(double v) { return v > 0.0 ? nullptr : "must be > 0"; }
const char* non_negative(double v) { return v >= 0.0 ? nullptr : "must be >= 0"; }
const char* unit_open(double v) { return v > 0.0 && v < 1.0 ? nullptr : "must lie in (0, 1)"; }
const char* unit_closed(double v) { return v >= 0.0 && v <= 1.0 ? nullptr : "must lie in [0, 1]"; }

const std::vector<std::pair<std::string, ExperimentKind>> kKinds{
    {"weak_velocity", ExperimentKind::weak_velocity},
    {"analytic_wv", ExperimentKind::analytic_wv},
    {"sweep", ExperimentKind::sweep},
    {"characterize", ExperimentKind::characterize},
    {"equivariance", ExperimentKind::equivariance},
};
const std::vector<std::pair<std::string, PotentialKind>> kPotentials{
    {"free", PotentialKind::free},
    {"harmonic", PotentialKind::harmonic},
    {"gaussian_barrier", PotentialKind::gaussian_barrier},
};
const std::vector<std::pair<std::string, StateKind>> kStates{
    {"gaussian", StateKind::gaussian},
    {"superposition", StateKind::superposition},
    {"coherent", StateKind::coherent},
};
const std::vector<std::pair<std::string, LawKind>> kLaws{
    {"bohmian", LawKind::bohmian},
    {"variant", LawKind::variant},
    {"linear_offset", LawKind::linear_offset},
};
const std::vector<std::pair<std::string, EstimatorLocation>> kLocations{
    {"mean_position", EstimatorLocation::mean_position},
    {"bin_center", EstimatorLocation::bin_center},
};

template <class Enum>
std::string name_of(const std::vector<std::pair<std::string, Enum>>& table, Enum value) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

const std::vector<std::string> kSectionNames{
    "experiment", "grid",   "units",    "state",        "potential", "law",         "dynamics",
    "protocol",   "checks", "sweep",    "characterize", "equivariance", "analytic_wv", "output"};

void read_state(SectionReader& r, StateParams& s) {
  r.choice("kind", s.kind, kStates);
  r.numbers("x0", s.x0);
  r.numbers("s0", s.s0, positive);
  r.numbers("k0", s.k0);
  r.numbers("weights", s.weights);
  r.number("omega", s.omega, positive);
  r.number("prepare_time", s.prepare_time, non_negative);
  r.text("potential", s.potential);
}

void read_potential(SectionReader& r, PotentialParams& p) {
  r.choice("kind", p.kind, kPotentials);
  r.number("omega", p.omega, positive);
  r.number("center", p.center);
  r.number("height", p.height);
  r.number("width", p.width, positive);
}

// Physics preconditions that need the assembled configuration.
void validate(const ExperimentConfig& c, std::vector<std::string>& errors) {
  GridSpec grid;
  try {
    grid = c.grid_spec();
  } catch (const std::exception& e) {
    errors.push_back(fmt::format("[grid]: {}", e.what()));
    return;
  }
  for (const auto& [name, p] : c.potentials) {
    try {
      (void)c.potential(name);
    } catch (const std::exception& e) {
      errors.push_back(fmt::format("[{}]: {}", name.empty() ? "potential" : "potential." + name,
                                   e.what()));
    }
  }
  for (const auto& [name, s] : c.states) {
    const std::string label = name.empty() ? "state" : "state." + name;
    const std::size_t parts = s.kind == StateKind::superposition ? s.weights.size() : 1;
    if (s.kind == StateKind::superposition &&
        (s.x0.size() != parts || s.s0.size() != parts || s.k0.size() != parts)) {
      errors.push_back(fmt::format("[{}]: x0, s0, k0 and weights must have the same length",
                                   label));
      continue;
    }
    if (s.kind != StateKind::superposition &&
        (s.x0.size() != 1 || s.s0.size() != 1 || s.k0.size() != 1)) {
      errors.push_back(fmt::format("[{}]: x0, s0 and k0 take one value for kind {}", label,
                                   name_of(kStates, s.kind)));
      continue;
    }
    if (!s.potential.empty() && !c.potentials.contains(s.potential)) {
      errors.push_back(fmt::format("[{}] potential: no section [potential.{}]", label, s.potential));
      continue;
    }
    try {
      (void)c.state(name);
    } catch (const std::exception& e) {
      errors.push_back(fmt::format("[{}]: {}", label, e.what()));
    }
  }
  if (!c.states.contains("") &&
      (c.kind == ExperimentKind::weak_velocity || c.kind == ExperimentKind::sweep ||
       c.kind == ExperimentKind::characterize || c.kind == ExperimentKind::equivariance)) {
    errors.push_back(fmt::format("[state]: required for kind {}", to_string(c.kind)));
  }
  if (c.kind == ExperimentKind::analytic_wv) {
    if (c.analytic.states.empty() && !c.states.contains("")) {
      errors.push_back("[analytic_wv] states: no states given and no [state] section");
    }
    for (const auto& s : c.analytic.states) {
      if (!c.states.contains(s)) {
        errors.push_back(fmt::format("[analytic_wv] states: no section [state.{}]", s));
      }
    }
  }
  const auto known = known_checks(c.kind);
  for (const auto& id : c.checks) {
    if (std::find(known.begin(), known.end(), id) == known.end()) {
      errors.push_back(fmt::format("[experiment] checks: unknown check '{}' for kind {}{}", id,
                                   to_string(c.kind), suggestion(id, known)));
    }
  }
  if (c.protocol.bin_width && *c.protocol.bin_width > grid.length()) {
    errors.push_back("[protocol] bin_width: wider than the domain");
  }
  if (c.kind == ExperimentKind::characterize &&
      (c.law.kind != LawKind::variant || c.law.epsilon == 0.0)) {
    errors.push_back("[law]: characterize needs kind = variant with a nonzero epsilon");
  }
  if (c.law.kind == LawKind::bohmian && c.law.epsilon != 0.0) {
    errors.push_back("[law] epsilon: must be 0 for the bohmian law");
  }
}

}  // namespace

std::string to_string(ExperimentKind kind) { return name_of(kKinds, kind); }

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations) msg += "\n  " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

GridSpec ExperimentConfig::grid_spec() const { return make_grid(grid.x_min, grid.x_max, grid.n); }

Potential ExperimentConfig::potential(const std::string& name) const {
  const auto g = grid_spec();
  const auto it = potentials.find(name);
  if (it == potentials.end()) {
    if (name.empty()) return free_potential(g);
    throw std::invalid_argument("no potential named '" + name + "'");
  }
  const auto& p = it->second;
  switch (p.kind) {
    case PotentialKind::free: return free_potential(g);
    case PotentialKind::harmonic: return harmonic_potential(g, p.omega, p.center, units.mass);
    case PotentialKind::gaussian_barrier: return gaussian_barrier(g, p.height, p.width, p.center);
  }
  throw std::logic_error("unhandled potential kind");
}

WaveFunction ExperimentConfig::state(const std::string& name) const {
  const auto it = states.find(name);
  if (it == states.end()) throw std::invalid_argument("no state named '" + name + "'");
  const auto& s = it->second;
  const auto g = grid_spec();
  WaveFunction psi;
  switch (s.kind) {
    case StateKind::gaussian:
      psi = gaussian_packet(g, s.x0[0], s.s0[0], s.k0[0], units);
      break;
    case StateKind::coherent: {
      const double width = std::sqrt(units.hbar / (2.0 * units.mass * s.omega));
      psi = gaussian_packet(g, s.x0[0], width, s.k0[0], units);
      break;
    }
    case StateKind::superposition: {
      psi = WaveFunction(g, std::vector<Complex>(g.size(), 0.0), units);
      for (std::size_t i = 0; i < s.weights.size(); ++i) {
        psi = linear_combination(psi, 1.0, gaussian_packet(g, s.x0[i], s.s0[i], s.k0[i], units),
                                 s.weights[i]);
      }
      psi = normalize(psi);
      break;
    }
  }
  if (s.prepare_time > 0.0) psi = evolve_for(psi, potential(s.potential), s.prepare_time, dt);
  if (psi.edge_ratio() > kEdgeDecayLimit) {
    throw std::invalid_argument("prepared state reaches the domain edge (edge/peak = " +
                                format_double(psi.edge_ratio()) + ")");
  }
  return psi;
}

double ExperimentConfig::bin_width() const {
  return protocol.bin_width ? *protocol.bin_width : 4.0 * grid_spec().dx();
}

bool ExperimentConfig::wants(const std::string& check_id) const {
  const auto& list = checks.empty() ? default_checks(kind) : checks;
  return std::find(list.begin(), list.end(), check_id) != list.end();
}

std::vector<std::string> known_checks(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::weak_velocity:
      return {"v_bohmian",       "reliable_bins",     "censoring",    "tau_sweep_bias",
              "tau_sweep_consistency", "law_separation", "expected_separation",
              "pointer_law",     "pointer_mean"};
    case ExperimentKind::analytic_wv: return {"weak_value_identity"};
    case ExperimentKind::sweep: return {"tau_slope"};
    case ExperimentKind::characterize:
      return {"bohmian_invariance", "variant_scaling", "witness_separation", "witness_constant",
              "catalog_triangle"};
    case ExperimentKind::equivariance:
      return {"continuity", "broken_law_flagged", "transport_ks"};
  }
  return {};
}

std::vector<std::string> default_checks(ExperimentKind kind) {
  if (kind == ExperimentKind::weak_velocity) return {"v_bohmian", "reliable_bins", "censoring"};
  return known_checks(kind);
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
  std::vector<std::string> errors;
  std::vector<RawSection> sections;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        errors.push_back(fmt::format("{}:{}: malformed section header '{}'", source, line_no, line));
        continue;
      }
      const std::string name = trim(line.substr(1, line.size() - 2));
      for (const auto& s : sections) {
        if (s.name == name) {
          errors.push_back(fmt::format("{}:{}: duplicate section [{}]", source, line_no, name));
        }
      }
      sections.push_back({name, line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(fmt::format("{}:{}: expected 'key = value', got '{}'", source, line_no, line));
      continue;
    }
    if (sections.empty()) {
      errors.push_back(fmt::format("{}:{}: key outside of any section", source, line_no));
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto& entries = sections.back().entries;
    if (entries.contains(key)) {
      errors.push_back(fmt::format("{}:{}: duplicate key '{}'", source, line_no, key));
      continue;
    }
    entries[key] = {value, line_no, false};
  }

  ExperimentConfig c;
  bool have_experiment = false;
  std::string law_kind_error;
  for (auto& section : sections) {
    SectionReader r(section, errors, source);
    const auto dot = section.name.find('.');
    const std::string base = section.name.substr(0, dot);
    const std::string sub = dot == std::string::npos ? "" : section.name.substr(dot + 1);
    if (dot != std::string::npos && (sub.empty() || (base != "state" && base != "potential"))) {
      errors.push_back(fmt::format("{}:{}: only [state.NAME] and [potential.NAME] take a name",
                                   source, section.line));
      continue;
    }
    if (base == "experiment") {
      have_experiment = true;
      r.text("name", c.name);
      if (!r.choice("kind", c.kind, kKinds) && !section.entries.contains("kind")) {
        r.error("kind", "is required");
      }
      r.words("checks", c.checks);
      r.seed("seed", c.seed);
      double workers = 0;
      if (r.number("workers", workers, non_negative)) c.workers = static_cast<unsigned>(workers);
    } else if (base == "grid") {
      r.number("x_min", c.grid.x_min);
      r.number("x_max", c.grid.x_max);
      r.count("n", c.grid.n, 16);
    } else if (base == "units") {
      r.number("hbar", c.units.hbar, positive);
      r.number("mass", c.units.mass, positive);
    } else if (base == "state") {
      read_state(r, c.states[sub]);
    } else if (base == "potential") {
      read_potential(r, c.potentials[sub]);
    } else if (base == "law") {
      r.choice("kind", c.law.kind, kLaws);
      r.number("epsilon", c.law.epsilon);
    } else if (base == "dynamics") {
      r.number("dt", c.dt, positive);
      r.number("rho_min", c.rho_min, positive);
      r.count("trajectory_steps", c.protocol.trajectory_steps, 1);
    } else if (base == "protocol") {
      r.number("sigma", c.protocol.sigma, positive);
      r.number("tau", c.protocol.tau, positive);
      r.count("n_runs", c.protocol.n_runs, 1);
      r.optional_number("bin_width", c.protocol.bin_width, positive);
      r.count("n_min", c.protocol.n_min, 2);
      r.number("censor_bound", c.protocol.censor_bound, unit_closed);
      r.choice("estimator_location", c.protocol.location, kLocations);
      r.boolean("fast_path", c.protocol.spectral_fast_path);
    } else if (base == "checks") {
      auto& k = c.check;
      r.number("stat_factor", k.stat_factor, positive);
      r.number("relative_floor", k.relative_floor, non_negative);
      r.count("min_reliable_bins", k.min_reliable_bins, 0);
      r.number("central_fraction", k.central_fraction, unit_closed);
      r.number("separation_threshold", k.separation_threshold, non_negative);
      r.numbers("sweep_taus", k.sweep_taus, positive);
      std::size_t runs = 0;
      if (r.count("sweep_runs", runs, 1)) k.sweep_runs = runs;
      r.number("ks_alpha", k.ks_alpha, unit_open);
      r.count("ks_min_count", k.ks_min_count, 1);
      r.number("mean_factor", k.mean_factor, positive);
      r.number("slope", k.slope);
      r.number("slope_tolerance", k.slope_tolerance, positive);
    } else if (base == "sweep") {
      r.numbers("sigmas", c.sweep.sigmas, positive);
      r.numbers("taus", c.sweep.taus, positive);
      r.numbers("deltas", c.sweep.deltas, positive);
    } else if (base == "characterize") {
      auto& k = c.characterize;
      r.numbers("sigmas", k.sigmas, positive);
      r.numbers("offsets", k.offsets);
      r.number("bulk_fraction", k.bulk_fraction, unit_closed);
      r.number("invariance_tolerance", k.invariance_tolerance, positive);
      r.number("slope", k.slope);
      r.number("slope_tolerance", k.slope_tolerance, positive);
      r.number("witness_spread", k.witness_spread, positive);
      r.numbers("witness_offsets", k.witness_offsets);
      r.number("witness_fraction", k.witness_fraction, unit_closed);
      r.number("constant_tolerance", k.constant_tolerance, positive);
      r.number("residual_dt", k.residual_dt, positive);
    } else if (base == "equivariance") {
      auto& k = c.equivariance;
      std::vector<std::string> laws;
      if (r.words("laws", laws)) {
        for (const auto& name : laws) {
          const auto it = std::find_if(kLaws.begin(), kLaws.end(),
                                       [&](const auto& p) { return p.first == name; });
          if (it == kLaws.end()) {
            std::vector<std::string> names;
            for (const auto& p : kLaws) names.push_back(p.first);
            r.error("laws", fmt::format("unknown law '{}'{}", name, suggestion(name, names)));
          } else {
            k.laws.push_back({it->second, 0.0});
          }
        }
      }
      r.count("n_samples", k.n_samples, 1);
      r.number("duration", k.duration, positive);
      r.number("residual_dt", k.residual_dt, positive);
      r.number("residual_tolerance", k.residual_tolerance, positive);
      r.number("ks_alpha", k.ks_alpha, unit_open);
    } else if (base == "analytic_wv") {
      r.words("states", c.analytic.states);
      r.number("tau", c.analytic.tau, positive);
      r.number("tolerance", c.analytic.tolerance, positive);
    } else if (base == "output") {
      r.text("dir", c.output_dir);
    } else {
      errors.push_back(fmt::format("{}:{}: unknown section [{}]{}", source, section.line,
                                   section.name, suggestion(base, kSectionNames)));
      continue;
    }
    r.finish();
  }
  if (!have_experiment) errors.push_back(fmt::format("{}: missing [experiment] section", source));

  // Laws named in [equivariance] take their epsilon from [law].
  for (auto& law : c.equivariance.laws) {
    if (law.kind != LawKind::bohmian) law.epsilon = c.law.epsilon;
  }
  if (c.equivariance.laws.empty()) {
    c.equivariance.laws.push_back(VelocityLaw::bohmian());
    if (c.law.kind != LawKind::bohmian) c.equivariance.laws.push_back(c.law);
  }
  if (c.characterize.witness_offsets.empty()) {
    for (int y = -12; y <= 12; ++y) c.characterize.witness_offsets.push_back(y);
  }
  if (c.check.sweep_taus.empty()) {
    c.check.sweep_taus = {2.0 * c.protocol.tau, c.protocol.tau, 0.5 * c.protocol.tau};
  }
  if (c.sweep.deltas.empty() && errors.empty()) {
    try {
      c.sweep.deltas = {c.bin_width()};
    } catch (const std::exception&) {
    }
  }
  if (c.output_dir.empty()) c.output_dir = "results/" + c.name;

  if (errors.empty()) validate(c, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({fmt::format("{}: cannot open file", path)});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string config_echo(const ExperimentConfig& c) {
  std::string out;
  auto line = [&](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  out += "[experiment]\n";
  line("name", c.name);
  line("kind", to_string(c.kind));
  line("checks", join_strings(c.checks.empty() ? default_checks(c.kind) : c.checks));
  line("seed", std::to_string(c.seed));
  out += "\n[grid]\n";
  line("x_min", format_double(c.grid.x_min));
  line("x_max", format_double(c.grid.x_max));
  line("n", std::to_string(c.grid.n));
  out += "\n[units]\n";
  line("hbar", format_double(c.units.hbar));
  line("mass", format_double(c.units.mass));
  for (const auto& [name, p] : c.potentials) {
    out += "\n[" + (name.empty() ? std::string("potential") : "potential." + name) + "]\n";
    line("kind", name_of(kPotentials, p.kind));
    line("omega", format_double(p.omega));
    line("center", format_double(p.center));
    line("height", format_double(p.height));
    line("width", format_double(p.width));
  }
  for (const auto& [name, s] : c.states) {
    out += "\n[" + (name.empty() ? std::string("state") : "state." + name) + "]\n";
    line("kind", name_of(kStates, s.kind));
    line("x0", join_doubles(s.x0));
    line("s0", join_doubles(s.s0));
    line("k0", join_doubles(s.k0));
    line("weights", join_doubles(s.weights));
    line("omega", format_double(s.omega));
    line("prepare_time", format_double(s.prepare_time));
    if (!s.potential.empty()) line("potential", s.potential);
  }
  out += "\n[law]\n";
  line("kind", name_of(kLaws, c.law.kind));
  line("epsilon", format_double(c.law.epsilon));
  out += "\n[dynamics]\n";
  line("dt", format_double(c.dt));
  line("rho_min", format_double(c.rho_min));
  line("trajectory_steps", std::to_string(c.protocol.trajectory_steps));
  out += "\n[protocol]\n";
  line("sigma", format_double(c.protocol.sigma));
  line("tau", format_double(c.protocol.tau));
  line("n_runs", std::to_string(c.protocol.n_runs));
  line("bin_width", format_double(c.bin_width()));
  line("n_min", std::to_string(c.protocol.n_min));
  line("censor_bound", format_double(c.protocol.censor_bound));
  line("estimator_location", name_of(kLocations, c.protocol.location));
  line("fast_path", c.protocol.spectral_fast_path ? "true" : "false");
  out += "\n[checks]\n";
  line("stat_factor", format_double(c.check.stat_factor));
  line("relative_floor", format_double(c.check.relative_floor));
  line("min_reliable_bins", std::to_string(c.check.min_reliable_bins));
  line("central_fraction", format_double(c.check.central_fraction));
  line("separation_threshold", format_double(c.check.separation_threshold));
  line("sweep_taus", join_doubles(c.check.sweep_taus));
  line("sweep_runs", std::to_string(c.check.sweep_runs.value_or(c.protocol.n_runs)));
  line("ks_alpha", format_double(c.check.ks_alpha));
  line("ks_min_count", std::to_string(c.check.ks_min_count));
  line("mean_factor", format_double(c.check.mean_factor));
  line("slope", format_double(c.check.slope));
  line("slope_tolerance", format_double(c.check.slope_tolerance));
  out += "\n[sweep]\n";
  line("sigmas", join_doubles(c.sweep.sigmas));
  line("taus", join_doubles(c.sweep.taus));
  line("deltas", join_doubles(c.sweep.deltas));
  const auto& ch = c.characterize;
  out += "\n[characterize]\n";
  line("sigmas", join_doubles(ch.sigmas));
  line("offsets", join_doubles(ch.offsets));
  line("bulk_fraction", format_double(ch.bulk_fraction));
  line("invariance_tolerance", format_double(ch.invariance_tolerance));
  line("slope", format_double(ch.slope));
  line("slope_tolerance", format_double(ch.slope_tolerance));
  line("witness_spread", format_double(ch.witness_spread));
  line("witness_offsets", join_doubles(ch.witness_offsets));
  line("witness_fraction", format_double(ch.witness_fraction));
  line("constant_tolerance", format_double(ch.constant_tolerance));
  line("residual_dt", format_double(ch.residual_dt));
  const auto& eq = c.equivariance;
  out += "\n[equivariance]\n";
  std::vector<std::string> laws;
  for (const auto& l : eq.laws) laws.push_back(name_of(kLaws, l.kind));
  line("laws", join_strings(laws));
  line("n_samples", std::to_string(eq.n_samples));
  line("duration", format_double(eq.duration));
  line("residual_dt", format_double(eq.residual_dt));
  line("residual_tolerance", format_double(eq.residual_tolerance));
  line("ks_alpha", format_double(eq.ks_alpha));
  out += "\n[analytic_wv]\n";
  if (!c.analytic.states.empty()) line("states", join_strings(c.analytic.states));
  line("tau", format_double(c.analytic.tau));
  line("tolerance", format_double(c.analytic.tolerance));
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_echo(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace weakflow
