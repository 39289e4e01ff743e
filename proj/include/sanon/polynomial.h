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

#ifndef SANON_POLYNOMIAL_H_
#define SANON_POLYNOMIAL_H_

#include <complex>
#include <span>
#include <vector>

namespace sanon {

struct RootFinderOptions {
  int max_iterations = 100;
  // Relative step size below which a root is considered converged.
  double tolerance = 1e-12;
};

// All complex roots of c[0] z^n + c[1] z^(n-1) + ... + c[n] by Aberth-Ehrlich
// simultaneous iteration. Starting points lie on a circle of radius
// |c[n]/c[0]|^(1/n). A root also counts as converged once |p(z)| is below the
// rounding bound of its Horner evaluation, which is what terminates multiple
// roots. Throws kNumerical if any root fails to converge.
std::vector<std::complex<double>> FindRootsAberth(
    std::span<const double> coefficients, const RootFinderOptions& options = {});

}  // namespace sanon

#endif  // SANON_POLYNOMIAL_H_
