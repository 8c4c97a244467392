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

#ifndef WEAKFLOW_FFT_HPP_
#define WEAKFLOW_FFT_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace weakflow {

using Complex = std::complex<double>;

/// One-dimensional complex DFT of a fixed length, backed by FFTW.
///
/// Plans are created once per length with FFTW_ESTIMATE, so the same inputs
/// give bit-identical outputs across processes. Transforms run through
/// aligned per-thread scratch buffers; calling from several threads at once
/// is safe.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const { return n_; }

  /// out[m] = sum_j in[j] exp(-2 pi i j m / n). `in` and `out` may alias.
  void forward(std::span<const Complex> in, std::span<Complex> out) const;

  /// out[j] = (1/n) sum_m in[m] exp(+2 pi i j m / n). `in` and `out` may alias.
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;

 private:
  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// Angular wavenumbers of the DFT bins for a periodic domain of length
/// `length` sampled at `n` points (standard FFT ordering).
std::vector<double> wavenumbers(std::size_t n, double length);

}  // namespace weakflow

#endif  // WEAKFLOW_FFT_HPP_
