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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace sanon::testing {

double BruteForceEer(std::span<const double> mated,
                     std::span<const double> nonmated) {
  std::set<double> distinct(mated.begin(), mated.end());
  distinct.insert(nonmated.begin(), nonmated.end());
  std::vector<double> thresholds(distinct.begin(), distinct.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());
  std::vector<double> frr, far;
  for (double t : thresholds) {
    double below = 0, above = 0;
    for (double s : mated) below += s < t;
    for (double s : nonmated) above += s >= t;
    frr.push_back(below / mated.size());
    far.push_back(above / nonmated.size());
  }
  for (size_t i = 0; i < thresholds.size(); ++i) {
    if (frr[i] < far[i]) continue;
    if (i == 0 || frr[i] == far[i]) return frr[i];
    // Where the line through the two points crosses FRR = FAR.
    const double d0 = far[i - 1] - frr[i - 1];
    const double d1 = far[i] - frr[i];
    const double t = d0 / (d0 - d1);
    return frr[i - 1] + t * (frr[i] - frr[i - 1]);
  }
  return 1.0;
}

double NaiveCosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  return dot / std::sqrt(na * nb);
}

std::vector<size_t> BruteForceFarthest(const SpeakerEmbedding& source,
                                       const EmbeddingPool& pool, size_t k) {
  const auto& entries = pool.entries();
  std::vector<double> dist(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) {
    dist[i] = 1.0 - std::clamp(NaiveCosine(source.values(),
                                           entries[i].embedding.values()),
                               -1.0, 1.0);
  }
  std::vector<size_t> by_rank(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) {
    size_t rank = 0;
    for (size_t j = 0; j < entries.size(); ++j) {
      if (dist[j] > dist[i] || (dist[j] == dist[i] && j < i)) ++rank;
    }
    by_rank[rank] = i;
  }
  by_rank.resize(std::min(k, by_rank.size()));
  return by_rank;
}

double NaivePearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) /
         std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

std::vector<double> PolynomialFromRoots(
    std::span<const std::complex<double>> roots) {
  std::vector<std::complex<double>> poly{1.0};  // powers of z^-1
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
    for (size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= r * poly[i];
    }
    poly = std::move(next);
  }
  std::vector<double> a;
  for (size_t i = 1; i < poly.size(); ++i) a.push_back(-poly[i].real());
  return a;
}

double SnrDb(std::span<const double> reference, std::span<const double> test) {
  const size_t n = std::min(reference.size(), test.size());
  double signal = 0, error = 0;
  for (size_t i = 0; i < n; ++i) {
    signal += reference[i] * reference[i];
    error += (reference[i] - test[i]) * (reference[i] - test[i]);
  }
  if (error == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal / error);
}

PitchProbe ProbePitch(std::span<const double> frame, double sample_rate_hz,
                      double period_lo, double period_hi) {
  PitchProbe probe;
  double energy = 0;
  for (double v : frame) energy += v * v;
  probe.rms = std::sqrt(energy / frame.size());
  const int lo = std::max(2, static_cast<int>(std::floor(period_lo)) - 1);
  const int hi = static_cast<int>(std::ceil(period_hi)) + 1;
  const size_t window = frame.size() - hi - 1;
  auto corr = [&](int lag) {
    double xy = 0, xx = 0, yy = 0;
    for (size_t i = 0; i < window; ++i) {
      xy += frame[i] * frame[i + lag];
      xx += frame[i] * frame[i];
      yy += frame[i + lag] * frame[i + lag];
    }
    return xx > 0 && yy > 0 ? xy / std::sqrt(xx * yy) : 0.0;
  };
  int best = lo + 1;
  double best_value = -2.0;
  for (int lag = lo + 1; lag < hi; ++lag) {
    const double c = corr(lag);
    if (c > best_value) {
      best_value = c;
      best = lag;
    }
  }
  const double left = corr(best - 1), right = corr(best + 1);
  const double denom = left - 2 * best_value + right;
  const double shift = denom < 0 ? 0.5 * (left - right) / denom : 0.0;
  probe.f0_hz = sample_rate_hz / (best + std::clamp(shift, -0.5, 0.5));
  probe.clarity = best_value;
  return probe;
}

}  // namespace sanon::testing
