// src/divergence.cpp

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

#include "dannphone/divergence.hpp"

#include <algorithm>
#include <cmath>

#include "dannphone/error.hpp"
#include "dannphone/features.hpp"
#include "dannphone/mlp.hpp"
#include "dannphone/rng.hpp"

namespace dannphone {

DomainProbeResult domain_probe(const RealMatrix &source, const RealMatrix &target,
                               const ProbeConfig &cfg) {
  if (source.rows() < cfg.min_frames || target.rows() < cfg.min_frames)
    fail(ErrorKind::kInsufficientData, "domain probe needs ", cfg.min_frames,
         " frames per domain, got ", source.rows(), " and ", target.rows());
  if (source.cols() != target.cols())
    fail(ErrorKind::kDimension, "domain probe inputs have ", source.cols(), " and ",
         target.cols(), " columns");
  Rng rng(derive_seed(cfg.seed, "domain-probe"));
  const auto ps = rng.permutation(source.rows());
  const auto pt = rng.permutation(target.rows());
  const std::size_t hs = source.rows() / 2, ht = target.rows() / 2;
  auto half = [](const std::vector<std::size_t> &p, std::size_t b, std::size_t e) {
    return std::vector<std::size_t>(p.begin() + static_cast<long>(b), p.begin() + static_cast<long>(e));
  };
  const RealMatrix train = vconcat(gather_rows(source, half(ps, 0, hs)),
                                   gather_rows(target, half(pt, 0, ht)));
  const RealMatrix test = vconcat(gather_rows(source, half(ps, hs, source.rows())),
                                  gather_rows(target, half(pt, ht, target.rows())));
  std::vector<double> y_train(train.rows(), 0.0), y_test(test.rows(), 0.0);
  std::fill(y_train.begin() + static_cast<long>(hs), y_train.end(), 1.0);
  std::fill(y_test.begin() + static_cast<long>(source.rows() - hs), y_test.end(), 1.0);

  NormStats stats = normalize_fit(train);
  if (!cfg.standardize) std::fill(stats.inv_std.begin(), stats.inv_std.end(), 1.0);
  const RealMatrix xtr = normalize_apply(train, stats);
  const RealMatrix xte = normalize_apply(test, stats);
  const std::size_t D = xtr.cols();
  std::vector<double> w(D, 0.0), gw(D);
  double b = 0.0;
  const auto n = static_cast<double>(xtr.rows());
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t r = 0; r < xtr.rows(); ++r) {
      const auto row = xtr.row(r);
      double a = b;
      for (std::size_t j = 0; j < D; ++j) a += w[j] * row[j];
      const double e = sigmoid(a) - y_train[r];
      for (std::size_t j = 0; j < D; ++j) gw[j] += e * row[j];
      gb += e;
    }
    for (std::size_t j = 0; j < D; ++j) w[j] -= cfg.learning_rate * (gw[j] / n + cfg.l2 * w[j]);
    b -= cfg.learning_rate * gb / n;
  }
  std::size_t correct = 0;
  for (std::size_t r = 0; r < xte.rows(); ++r) {
    const auto row = xte.row(r);
    double a = b;
    for (std::size_t j = 0; j < D; ++j) a += w[j] * row[j];
    correct += (a > 0.0) == (y_test[r] > 0.5);
  }
  DomainProbeResult res;
  res.heldout_accuracy = static_cast<double>(correct) / static_cast<double>(xte.rows());
  res.heldout_error = 1.0 - res.heldout_accuracy;
  res.proxy_a_distance = std::clamp(2.0 * (1.0 - 2.0 * res.heldout_error), 0.0, 2.0);
  return res;
}

double proxy_a_distance(const RealMatrix &source, const RealMatrix &target,
                        const ProbeConfig &cfg) {
  return domain_probe(source, target, cfg).proxy_a_distance;
}

}  // namespace dannphone
