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

#include "sanon/fft.h"

#include <algorithm>
#include <mutex>

#include <fftw3.h>

#include "sanon/error.h"

namespace sanon {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& PlannerMutex() {
  static std::mutex mutex;
  return mutex;
}
}  // namespace

RealFft::RealFft(int size) : size_(size) {
  Require(size >= 2, "RealFft: size must be >= 2");
  std::lock_guard<std::mutex> lock(PlannerMutex());
  in_ = fftw_alloc_real(size);
  out_ = fftw_alloc_complex(size / 2 + 1);
  plan_ = fftw_plan_dft_r2c_1d(size, in_, static_cast<fftw_complex*>(out_),
                               FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(in_);
  fftw_free(out_);
}

std::vector<std::complex<double>> RealFft::Forward(
    std::span<const double> input) {
  const size_t n = std::min<size_t>(input.size(), size_);
  std::copy_n(input.begin(), n, in_);
  std::fill(in_ + n, in_ + size_, 0.0);
  fftw_execute(static_cast<fftw_plan>(plan_));
  const auto* out = static_cast<const fftw_complex*>(out_);
  std::vector<std::complex<double>> bins(size_ / 2 + 1);
  for (size_t k = 0; k < bins.size(); ++k) {
    bins[k] = {out[k][0], out[k][1]};
  }
  return bins;
}

std::vector<double> RealFft::PowerSpectrum(std::span<const double> input) {
  const auto bins = Forward(input);
  std::vector<double> power(bins.size());
  for (size_t k = 0; k < bins.size(); ++k) power[k] = std::norm(bins[k]);
  return power;
}

}  // namespace sanon
