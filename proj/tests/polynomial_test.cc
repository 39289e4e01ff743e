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
#include <complex>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "support/expect_error.h"
#include "support/oracles.h"

namespace sanon {
namespace {

using Complex = std::complex<double>;

// Greedy nearest matching; returns the largest distance between pairs.
double MatchDistance(std::vector<Complex> got, std::vector<Complex> want) {
  EXPECT_EQ(got.size(), want.size());
  double worst = 0.0;
  for (const Complex& w : want) {
    auto it = std::min_element(got.begin(), got.end(),
                               [&](const Complex& a, const Complex& b) {
                                 return std::abs(a - w) < std::abs(b - w);
                               });
    if (it == got.end()) return INFINITY;
    worst = std::max(worst, std::abs(*it - w));
    got.erase(it);
  }
  return worst;
}

TEST(AberthTest, QuadraticMatchesClosedForm) {
  // z^2 - 3z + 2 = (z - 1)(z - 2)
  const std::vector<double> c = {1.0, -3.0, 2.0};
  EXPECT_LT(MatchDistance(FindRootsAberth(c), {1.0, 2.0}), 1e-12);
  // z^2 + 0.81: roots +-0.9i
  const std::vector<double> d = {1.0, 0.0, 0.81};
  EXPECT_LT(MatchDistance(FindRootsAberth(d), {{0, 0.9}, {0, -0.9}}), 1e-12);
}

TEST(AberthTest, DoubleRootConvergesToSqrtEpsilon) {
  const std::vector<double> c = {1.0, -1.0, 0.25};  // (z - 0.5)^2
  EXPECT_LT(MatchDistance(FindRootsAberth(c), {0.5, 0.5}), 1e-7);
}

TEST(AberthTest, TrailingZerosGiveRootsAtOrigin) {
  const std::vector<double> c = {1.0, -0.5, 0.0, 0.0};  // z^2 (z - 0.5)
  EXPECT_LT(MatchDistance(FindRootsAberth(c), {0.5, 0.0, 0.0}), 1e-12);
}

TEST(AberthTest, DegreeZeroHasNoRoots) {
  EXPECT_TRUE(FindRootsAberth(std::vector<double>{3.0}).empty());
}

TEST(AberthTest, ZeroLeadingCoefficientRejected) {
  EXPECT_SANON_ERROR(FindRootsAberth(std::vector<double>{0.0, 1.0, 2.0}),
                     ErrorKind::kPrecondition);
}

// Property: random stable conjugate-closed root sets up to degree 20 are
// recovered from their expanded polynomial.
TEST(AberthTest, RecoversRandomRootSets) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> radius(0.2, 0.97), angle(0.05, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int pairs = 1 + trial % 10;
    std::vector<Complex> roots;
    for (int p = 0; p < pairs; ++p) {
      const Complex z = std::polar(radius(gen), angle(gen));
      roots.push_back(z);
      roots.push_back(std::conj(z));
    }
    if (trial % 3 == 0) roots.push_back(radius(gen) - 0.5);
    const auto a = testing::PolynomialFromRoots(roots);
    std::vector<double> c = {1.0};
    for (double v : a) c.push_back(-v);
    EXPECT_LT(MatchDistance(FindRootsAberth(c), roots), 1e-6) << trial;
  }
}

}  // namespace
}  // namespace sanon
