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

#include "sanon/polynomial.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sanon/error.h"

namespace sanon {

namespace {

using Complex = std::complex<double>;

struct Evaluation {
  Complex value;
  Complex derivative;
  double error_bound;  // rounding bound on |value|
};

Evaluation Horner(std::span<const double> monic, Complex z) {
  Complex p = monic[0];
  Complex dp = 0.0;
  const double abs_z = std::abs(z);
  double bound = std::abs(monic[0]);
  for (size_t i = 1; i < monic.size(); ++i) {
    dp = dp * z + p;
    p = p * z + monic[i];
    bound = bound * abs_z + std::abs(monic[i]);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  return {p, dp, 2.0 * static_cast<double>(monic.size()) * eps * bound};
}

}  // namespace

std::vector<Complex> FindRootsAberth(std::span<const double> coefficients,
                                     const RootFinderOptions& options) {
  Require(!coefficients.empty(), "FindRootsAberth: no coefficients");
  Require(coefficients[0] != 0.0, "FindRootsAberth: zero leading coefficient");
  const size_t degree = coefficients.size() - 1;
  if (degree == 0) return {};

  std::vector<double> monic(coefficients.begin(), coefficients.end());
  for (double& c : monic) c /= coefficients[0];

  // Trailing zero coefficients are exact roots at the origin.
  size_t zero_roots = 0;
  while (zero_roots < degree && monic[degree - zero_roots] == 0.0) {
    ++zero_roots;
  }
  const size_t n = degree - zero_roots;
  std::vector<Complex> roots(zero_roots, Complex(0.0, 0.0));
  if (n == 0) return roots;
  const std::span<const double> poly(monic.data(), n + 1);

  const double radius = std::pow(std::abs(poly[n]), 1.0 / n);
  std::vector<Complex> z(n);
  for (size_t k = 0; k < n; ++k) {
    // The offset keeps starting points off the real axis so conjugate pairs
    // can separate.
    const double angle = 2.0 * M_PI * k / n + 0.4;
    z[k] = std::polar(radius, angle);
  }

  std::vector<bool> done(n, false);
  bool all_done = false;
  for (int iter = 0; iter < options.max_iterations && !all_done; ++iter) {
    all_done = true;
    for (size_t k = 0; k < n; ++k) {
      if (done[k]) continue;
      const Evaluation ev = Horner(poly, z[k]);
      if (std::abs(ev.value) <= ev.error_bound) {
        done[k] = true;
        continue;
      }
      Complex ratio;
      if (ev.derivative == 0.0) {
        ratio = Complex(options.tolerance, options.tolerance) *
                std::max(1.0, std::abs(z[k]));
      } else {
        ratio = ev.value / ev.derivative;
      }
      Complex repulsion = 0.0;
      for (size_t j = 0; j < n; ++j) {
        if (j != k) repulsion += 1.0 / (z[k] - z[j]);
      }
      const Complex step = ratio / (1.0 - ratio * repulsion);
      z[k] -= step;
      if (!std::isfinite(z[k].real()) || !std::isfinite(z[k].imag())) {
        Fail(ErrorKind::kNumerical, "FindRootsAberth: iteration diverged");
      }
      if (std::abs(step) <= options.tolerance * std::max(1.0, std::abs(z[k]))) {
        done[k] = true;
      } else {
        all_done = false;
      }
    }
  }
  if (!std::all_of(done.begin(), done.end(), [](bool d) { return d; })) {
    Fail(ErrorKind::kNumerical,
         fmt::format("FindRootsAberth: no convergence after {} iterations",
                     options.max_iterations));
  }
  roots.insert(roots.end(), z.begin(), z.end());
  return roots;
}

}  // namespace sanon
