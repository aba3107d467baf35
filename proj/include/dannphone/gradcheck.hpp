// include/dannphone/gradcheck.hpp

// Copyright 2026  The dannphone Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Central finite differences, the oracle every analytic gradient is checked
// against in the tests and the acceptance suite.

#ifndef DANNPHONE_GRADCHECK_HPP_
#define DANNPHONE_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace dannphone {

inline constexpr double kFdStep = 1e-6;
inline constexpr double kGradTol = 1e-6;

/// Gradient of f with respect to every entry of `values`, which f must read
/// through the same storage.
inline std::vector<double> numeric_gradient(const std::function<double()> &f,
                                            std::span<double> values, double h = kFdStep) {
  std::vector<double> g(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double keep = values[i];
    values[i] = keep + h;
    const double up = f();
    values[i] = keep - h;
    const double down = f();
    values[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// ||a - b|| / max(||a||, ||b||), or the absolute error when both vanish.
inline double relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::max(std::sqrt(na), std::sqrt(nb));
  return denom < 1e-12 ? std::sqrt(diff) : std::sqrt(diff) / denom;
}

}  // namespace dannphone

#endif  // DANNPHONE_GRADCHECK_HPP_
