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

#include "weakflow/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace weakflow {
namespace {

struct AlignedDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using AlignedBuffer = std::unique_ptr<fftw_complex[], AlignedDeleter>;

AlignedBuffer allocate(std::size_t n) {
  auto* p = fftw_alloc_complex(n);
  if (p == nullptr) throw std::bad_alloc();
  return AlignedBuffer(p);
}

struct PlanPair {
  fftw_plan forward;
  fftw_plan inverse;
};

// FFTW's planner is not reentrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

PlanPair plans_for(std::size_t n) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto in = allocate(n);
  auto out = allocate(n);
  const int len = static_cast<int>(n);
  PlanPair pair{
      fftw_plan_dft_1d(len, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE),
      fftw_plan_dft_1d(len, in.get(), out.get(), FFTW_BACKWARD, FFTW_ESTIMATE)};
  if (pair.forward == nullptr || pair.inverse == nullptr) {
    throw std::runtime_error("FFTW failed to create a plan");
  }
  cache.emplace(n, pair);
  return pair;
}

struct Scratch {
  std::size_t n = 0;
  AlignedBuffer in;
  AlignedBuffer out;
};

Scratch& scratch_for(std::size_t n) {
  thread_local std::map<std::size_t, Scratch> buffers;
  auto& s = buffers[n];
  if (s.n != n) {
    s.n = n;
    s.in = allocate(n);
    s.out = allocate(n);
  }
  return s;
}

void execute(void* plan, std::size_t n, std::span<const Complex> in,
             std::span<Complex> out, double scale) {
  if (in.size() != n || out.size() != n) {
    throw std::invalid_argument("Fft: buffer length does not match plan length");
  }
  auto& s = scratch_for(n);
  std::copy(in.begin(), in.end(), reinterpret_cast<Complex*>(s.in.get()));
  fftw_execute_dft(static_cast<fftw_plan>(plan), s.in.get(), s.out.get());
  const auto* result = reinterpret_cast<const Complex*>(s.out.get());
  if (scale == 1.0) {
    std::copy(result, result + n, out.begin());
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = result[i] * scale;
  }
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("Fft: length must be positive");
  const auto pair = plans_for(n);
  forward_plan_ = pair.forward;
  inverse_plan_ = pair.inverse;
}

void Fft::forward(std::span<const Complex> in, std::span<Complex> out) const {
  execute(forward_plan_, n_, in, out, 1.0);
}

void Fft::inverse(std::span<const Complex> in, std::span<Complex> out) const {
  execute(inverse_plan_, n_, in, out, 1.0 / static_cast<double>(n_));
}

std::vector<double> wavenumbers(std::size_t n, double length) {
  std::vector<double> k(n);
  const double dk = 2.0 * std::numbers::pi / length;
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t m = 0; m < n; ++m) {
    auto idx = static_cast<std::ptrdiff_t>(m);
    if (idx >= half) idx -= static_cast<std::ptrdiff_t>(n);
    k[m] = dk * static_cast<double>(idx);
  }
  return k;
}

}  // namespace weakflow
