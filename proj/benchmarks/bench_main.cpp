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

#include <benchmark/benchmark.h>

#include <vector>

#include "weakflow/dynamics.hpp"
#include "weakflow/grid.hpp"
#include "weakflow/trajectory.hpp"
#include "weakflow/weak_measurement.hpp"

namespace {

using namespace weakflow;

WaveFunction spread_packet(std::size_t n) {
  const auto g = make_grid(-20.0, 20.0, n);
  return evolve_for(gaussian_packet(g, 0.0, 1.0, 0.0), free_potential(g), 0.5);
}

void BM_EvolveStep(benchmark::State& state) {
  const auto psi = spread_packet(static_cast<std::size_t>(state.range(0)));
  const auto pot = free_potential(psi.grid());
  for (auto _ : state) benchmark::DoNotOptimize(evolve(psi, pot, 1e-3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvolveStep)->RangeMultiplier(2)->Range(256, 4096);

void BM_Flux(benchmark::State& state) {
  const auto psi = spread_packet(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(quantum_flux(psi));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Flux)->RangeMultiplier(2)->Range(256, 4096);

void BM_VelocityField(benchmark::State& state) {
  const auto psi = spread_packet(1024);
  const auto law = state.range(0) == 0 ? VelocityLaw::bohmian() : VelocityLaw::variant(0.2);
  for (auto _ : state) benchmark::DoNotOptimize(velocity_field(law, psi));
}
BENCHMARK(BM_VelocityField)->Arg(0)->Arg(1);

void BM_InterpolateField(benchmark::State& state) {
  const auto field = velocity_field(VelocityLaw::bohmian(), spread_packet(1024));
  double x = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(interpolate_field(field, x));
    x = x > 1.0 ? -1.0 : x + 1e-3;
  }
}
BENCHMARK(BM_InterpolateField);

void BM_ProtocolRuns(benchmark::State& state) {
  const auto psi = spread_packet(1024);
  const auto law = state.range(1) == 0 ? VelocityLaw::bohmian() : VelocityLaw::variant(0.2);
  ProtocolConfig config{psi, free_potential(psi.grid()), law, PointerModel{10.0}, 0.05,
                        static_cast<std::size_t>(state.range(0)), 1};
  ProtocolOptions options;
  options.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol(config, options));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProtocolRuns)->Args({1000, 0})->Args({1000, 1})->Unit(benchmark::kMillisecond);

void BM_TransportEnsemble(benchmark::State& state) {
  const auto psi = spread_packet(1024);
  const auto pot = free_potential(psi.grid());
  const auto xs = sample_positions(psi, static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transport_ensemble(xs, VelocityLaw::bohmian(), psi, pot, 0.05, 1e-3));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TransportEnsemble)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
