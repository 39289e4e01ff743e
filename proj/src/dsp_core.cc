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

#include "sanon/dsp_core.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sanon/error.h"
#include "sanon/polynomial.h"

namespace sanon {

using Complex = std::complex<double>;

std::vector<double> MakeWindow(WindowType type, int length) {
  Require(length > 0, "MakeWindow: length must be positive");
  std::vector<double> w(length, 1.0);
  if (type == WindowType::kHann) {
    for (int n = 0; n < length; ++n) {
      const double s = std::sin(M_PI * (n + 0.5) / length);
      w[n] = s * s;
    }
  }
  return w;
}

FrameSequence FrameSignal(const AudioBuffer& buffer, double frame_ms,
                          double hop_ms, WindowType window) {
  Require(hop_ms > 0 && frame_ms >= hop_ms,
          "FrameSignal: need frame_ms >= hop_ms > 0");
  Require(!buffer.empty(), "FrameSignal: empty buffer");
  FrameSequence seq;
  seq.sample_rate_hz = buffer.sample_rate_hz;
  seq.frame_len =
      static_cast<int>(std::lround(frame_ms * buffer.sample_rate_hz / 1000.0));
  seq.hop_len =
      static_cast<int>(std::lround(hop_ms * buffer.sample_rate_hz / 1000.0));
  Require(seq.hop_len > 0 && seq.hop_len <= seq.frame_len,
          "FrameSignal: hop must be positive and not exceed the frame");
  seq.window = window;
  seq.signal_length = buffer.size();

  const auto w = MakeWindow(window, seq.frame_len);
  const size_t count = (buffer.size() + seq.hop_len - 1) / seq.hop_len;
  seq.frames.resize(count, std::vector<double>(seq.frame_len, 0.0));
  for (size_t i = 0; i < count; ++i) {
    const size_t start = i * seq.hop_len;
    auto& frame = seq.frames[i];
    const size_t avail =
        std::min<size_t>(seq.frame_len, buffer.size() - start);
    for (size_t n = 0; n < avail; ++n) {
      frame[n] = buffer.samples[start + n] * w[n];
    }
  }
  return seq;
}

AudioBuffer OverlapAdd(const FrameSequence& seq) {
  Require(seq.frame_len > 0 && seq.hop_len > 0,
          "OverlapAdd: invalid frame geometry");
  const auto w = MakeWindow(seq.window, seq.frame_len);

  // COLA: the hop-shifted windows must sum to a constant.
  std::vector<double> cola(seq.hop_len, 0.0);
  for (int n = 0; n < seq.frame_len; ++n) cola[n % seq.hop_len] += w[n];
  const auto [lo, hi] = std::minmax_element(cola.begin(), cola.end());
  if (*hi - *lo > 1e-9 * *hi) {
    Fail(ErrorKind::kConfiguration,
         fmt::format("OverlapAdd: window/hop ({}/{}) is not COLA",
                     seq.frame_len, seq.hop_len));
  }

  AudioBuffer out;
  out.sample_rate_hz = seq.sample_rate_hz;
  if (seq.frames.empty()) return out;
  const size_t span_len =
      (seq.frames.size() - 1) * seq.hop_len + seq.frame_len;
  std::vector<double> acc(span_len, 0.0), norm(span_len, 0.0);
  for (size_t i = 0; i < seq.frames.size(); ++i) {
    const auto& frame = seq.frames[i];
    Require(static_cast<int>(frame.size()) == seq.frame_len,
            "OverlapAdd: frame length mismatch");
    const size_t start = i * seq.hop_len;
    for (int n = 0; n < seq.frame_len; ++n) {
      acc[start + n] += frame[n];
      norm[start + n] += w[n];
    }
  }
  const size_t len = seq.signal_length ? std::min(seq.signal_length, span_len)
                                       : span_len;
  out.samples.resize(len);
  for (size_t n = 0; n < len; ++n) {
    out.samples[n] = norm[n] > 1e-12 ? acc[n] / norm[n] : 0.0;
  }
  return out;
}

std::vector<double> Autocorrelation(std::span<const double> frame,
                                    int max_lag) {
  std::vector<double> r(max_lag + 1, 0.0);
  const size_t n = frame.size();
  for (int k = 0; k <= max_lag && static_cast<size_t>(k) < n; ++k) {
    double acc = 0.0;
    for (size_t i = k; i < n; ++i) acc += frame[i] * frame[i - k];
    r[k] = acc;
  }
  return r;
}

LpcModel LevinsonDurbin(std::span<const double> r, int order) {
  Require(order >= 0 && static_cast<int>(r.size()) > order,
          "LevinsonDurbin: need order + 1 autocorrelation lags");
  if (!(r[0] > 0.0)) {
    Fail(ErrorKind::kDegenerateFrame, "LevinsonDurbin: zero-energy frame");
  }
  LpcModel model;
  model.coefficients.assign(order, 0.0);
  auto& a = model.coefficients;
  std::vector<double> prev(order, 0.0);
  double error = r[0];
  for (int i = 1; i <= order; ++i) {
    double acc = r[i];
    for (int j = 1; j < i; ++j) acc -= a[j - 1] * r[i - j];
    const double k = acc / error;
    if (!(std::abs(k) < 1.0)) {
      Fail(ErrorKind::kNumerical,
           fmt::format("LevinsonDurbin: |k{}| = {} is not below 1", i,
                       std::abs(k)));
    }
    std::copy(a.begin(), a.begin() + i - 1, prev.begin());
    a[i - 1] = k;
    for (int j = 1; j < i; ++j) a[j - 1] = prev[j - 1] - k * prev[i - j - 1];
    error *= 1.0 - k * k;
  }
  model.gain = std::sqrt(std::max(error, 0.0));
  return model;
}

LpcModel LpcFromFrame(std::span<const double> frame, int order,
                      const LpcOptions& options) {
  Require(order >= 0 && static_cast<size_t>(order) < frame.size(),
          "LpcFromFrame: order must be below the frame length");
  auto r = Autocorrelation(frame, order);
  if (!(r[0] > 0.0)) {
    Fail(ErrorKind::kDegenerateFrame, "LpcFromFrame: all-zero frame");
  }
  if (options.lag_window_bandwidth_hz > 0.0) {
    const double c = 2.0 * M_PI * options.lag_window_bandwidth_hz /
                     options.sample_rate_hz;
    for (int k = 1; k <= order; ++k) {
      r[k] *= std::exp(-0.5 * (c * k) * (c * k));
    }
  }
  return LevinsonDurbin(r, order);
}

namespace {

constexpr double kNearRealPairImag = 1e-6;

// A double real root converges only to about sqrt(machine epsilon), so the
// root finder may report it as a conjugate pair with a tiny imaginary part.
// Refines x by Newton steps on p', whose root there is simple, and accepts
// it when p(x) vanishes within the rounding bound of its evaluation.
bool IsDoubleRealRoot(const std::vector<double>& poly, double x0, double* x) {
  const int n = static_cast<int>(poly.size()) - 1;
  auto eval = [&](double t, double* p, double* dp, double* ddp, double* bound) {
    *p = poly[0];
    *dp = 0.0;
    *ddp = 0.0;
    *bound = std::abs(poly[0]);
    for (int i = 1; i <= n; ++i) {
      *ddp = *ddp * t + 2.0 * *dp;
      *dp = *dp * t + *p;
      *p = *p * t + poly[i];
      *bound = *bound * std::abs(t) + std::abs(poly[i]);
    }
  };
  double t = x0, p, dp, ddp, bound;
  for (int it = 0; it < 8; ++it) {
    eval(t, &p, &dp, &ddp, &bound);
    if (ddp == 0.0) break;
    const double step = dp / ddp;
    t -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(t))) break;
  }
  eval(t, &p, &dp, &ddp, &bound);
  if (std::abs(t - x0) > kNearRealPairImag ||
      std::abs(p) > 8.0 * n * std::numeric_limits<double>::epsilon() * bound) {
    return false;
  }
  *x = t;
  return true;
}

}  // namespace

PoleSet LpcToPoles(const LpcModel& model) {
  PoleSet set;
  set.gain = model.gain;
  if (model.order() == 0) return set;
  std::vector<double> poly(model.order() + 1);
  poly[0] = 1.0;
  for (int k = 0; k < model.order(); ++k) poly[k + 1] = -model.coefficients[k];
  const auto roots = FindRootsAberth(poly);

  std::vector<Complex> upper, lower;
  for (const Complex& z : roots) {
    if (std::abs(z.imag()) <= kRealPoleEpsilon) {
      set.poles.emplace_back(z.real(), 0.0);
    } else if (z.imag() > 0) {
      upper.push_back(z);
    } else {
      lower.push_back(z);
    }
  }
  if (upper.size() != lower.size()) {
    Fail(ErrorKind::kNumerical, "LpcToPoles: roots are not conjugate-closed");
  }
  std::vector<bool> used(lower.size(), false);
  std::vector<Complex> pairs;
  std::sort(upper.begin(), upper.end(), [](const Complex& x, const Complex& y) {
    return std::arg(x) < std::arg(y);
  });
  for (const Complex& u : upper) {
    size_t best = lower.size();
    double best_dist = 0.0;
    for (size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(u - std::conj(lower[j]));
      if (best == lower.size() || d < best_dist) {
        best = j;
        best_dist = d;
      }
    }
    used[best] = true;
    const Complex z = 0.5 * (u + std::conj(lower[best]));
    double x = 0.0;
    if (std::abs(z.imag()) < kNearRealPairImag &&
        IsDoubleRealRoot(poly, z.real(), &x)) {
      set.poles.emplace_back(x, 0.0);
      set.poles.emplace_back(x, 0.0);
      continue;
    }
    pairs.push_back(z);
    pairs.push_back(std::conj(z));
  }
  std::sort(set.poles.begin(), set.poles.end(),
            [](const Complex& a, const Complex& b) {
              return a.real() < b.real();
            });
  set.poles.insert(set.poles.end(), pairs.begin(), pairs.end());
  return set;
}

LpcModel PolesToLpc(const PoleSet& set) {
  const size_t n = set.poles.size();
  std::vector<bool> paired(n, false);
  for (size_t i = 0; i < n; ++i) {
    const Complex z = set.poles[i];
    if (std::abs(z.imag()) <= kRealPoleEpsilon || paired[i]) continue;
    bool found = false;
    for (size_t j = 0; j < n && !found; ++j) {
      if (j == i || paired[j]) continue;
      if (std::abs(set.poles[j] - std::conj(z)) <=
          1e-10 * std::max(1.0, std::abs(z))) {
        paired[i] = paired[j] = true;
        found = true;
      }
    }
    if (!found) {
      Fail(ErrorKind::kValidation,
           fmt::format("PolesToLpc: pole ({}, {}) has no conjugate", z.real(),
                       z.imag()));
    }
  }

  // prod_k (1 - z_k x), with x standing for z^-1.
  std::vector<Complex> c(n + 1, 0.0);
  c[0] = 1.0;
  for (size_t k = 0; k < n; ++k) {
    const Complex z = std::abs(set.poles[k].imag()) <= kRealPoleEpsilon
                          ? Complex(set.poles[k].real(), 0.0)
                          : set.poles[k];
    for (size_t j = k + 1; j >= 1; --j) c[j] -= z * c[j - 1];
  }
  LpcModel model;
  model.gain = set.gain;
  model.coefficients.resize(n);
  for (size_t k = 0; k < n; ++k) {
    if (std::abs(c[k + 1].imag()) >= 1e-9) {
      Fail(ErrorKind::kNumerical,
           fmt::format("PolesToLpc: imaginary residue {} in coefficient {}",
                       c[k + 1].imag(), k + 1));
    }
    model.coefficients[k] = -c[k + 1].real();
  }
  return model;
}

std::vector<double> ReflectionCoefficients(const LpcModel& model) {
  const int p = model.order();
  std::vector<double> a = model.coefficients;
  std::vector<double> k(p, 0.0);
  std::vector<double> next(p, 0.0);
  for (int i = p; i >= 1; --i) {
    k[i - 1] = a[i - 1];
    const double denom = 1.0 - k[i - 1] * k[i - 1];
    if (!(std::abs(k[i - 1]) < 1.0)) {
      // Remaining coefficients are meaningless once the unit circle is hit.
      break;
    }
    for (int j = 1; j < i; ++j) {
      next[j - 1] = (a[j - 1] + k[i - 1] * a[i - j - 1]) / denom;
    }
    std::copy(next.begin(), next.begin() + i - 1, a.begin());
  }
  return k;
}

bool IsMinimumPhase(const LpcModel& model) {
  const auto k = ReflectionCoefficients(model);
  for (int i = model.order() - 1; i >= 0; --i) {
    if (!(std::abs(k[i]) < 1.0)) return false;
  }
  return true;
}

namespace {

void PrepareHistory(FilterState* state, int order) {
  if (static_cast<int>(state->history.size()) < order) {
    state->history.resize(order, 0.0);
  }
}

void PushHistory(FilterState* state, double value) {
  auto& h = state->history;
  if (h.empty()) return;
  std::move_backward(h.begin(), h.end() - 1, h.end());
  h[0] = value;
}

}  // namespace

std::vector<double> InverseFilter(std::span<const double> frame,
                                  const LpcModel& model, FilterState* state) {
  const int p = model.order();
  PrepareHistory(state, p);
  const auto& a = model.coefficients;
  std::vector<double> out(frame.size());
  for (size_t n = 0; n < frame.size(); ++n) {
    double pred = 0.0;
    for (int k = 0; k < p; ++k) pred += a[k] * state->history[k];
    out[n] = frame[n] - pred;
    PushHistory(state, frame[n]);
  }
  return out;
}

std::vector<double> SynthesisFilter(std::span<const double> excitation,
                                    const LpcModel& model, FilterState* state) {
  if (!IsMinimumPhase(model)) {
    Fail(ErrorKind::kStability, "SynthesisFilter: model is not minimum-phase");
  }
  const int p = model.order();
  PrepareHistory(state, p);
  const auto& a = model.coefficients;
  std::vector<double> out(excitation.size());
  for (size_t n = 0; n < excitation.size(); ++n) {
    double y = excitation[n];
    for (int k = 0; k < p; ++k) y += a[k] * state->history[k];
    out[n] = y;
    PushHistory(state, y);
  }
  return out;
}

}  // namespace sanon
