// Copyright (c) 2026 The sanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SANON_FFT_H_
#define SANON_FFT_H_

#include <complex>
#include <span>
#include <vector>

namespace sanon {

// Real-to-complex forward transform of a fixed size, backed by FFTW.
// Planning uses FFTW_ESTIMATE so the chosen algorithm, and therefore every
// output bit, is the same on every run. An instance is not thread-safe; give
// each worker its own.
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return size_; }

  // Input shorter than size() is zero-padded. Returns size()/2 + 1 bins.
  std::vector<std::complex<double>> Forward(std::span<const double> input);
  // |X[k]|^2 for k in [0, size()/2].
  std::vector<double> PowerSpectrum(std::span<const double> input);

 private:
  int size_;
  double* in_ = nullptr;
  void* out_ = nullptr;
  void* plan_ = nullptr;
};

}  // namespace sanon

#endif  // SANON_FFT_H_
