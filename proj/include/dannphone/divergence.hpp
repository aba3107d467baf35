// dannphone/divergence.hpp

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

// Domain separability diagnostics: a logistic domain probe trained on half of
// each domain and scored on the other half, and the proxy A-distance
// 2(1 - 2 err) derived from its held-out error.

#ifndef DANNPHONE_DIVERGENCE_HPP_
#define DANNPHONE_DIVERGENCE_HPP_

#include <cstdint>

#include "dannphone/matrix.hpp"

namespace dannphone {

struct ProbeConfig {
  std::size_t iterations = 300;
  double learning_rate = 0.5;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  std::size_t min_frames = 20;  // per domain
  bool standardize = true;      // per-dimension scaling fitted on the train half
  bool operator==(const ProbeConfig &) const = default;
};

struct DomainProbeResult {
  double heldout_accuracy = 0.0;
  double heldout_error = 0.0;
  double proxy_a_distance = 0.0;  // clipped to [0, 2]
};

DomainProbeResult domain_probe(const RealMatrix &source, const RealMatrix &target,
                               const ProbeConfig &cfg = {});

double proxy_a_distance(const RealMatrix &source, const RealMatrix &target,
                        const ProbeConfig &cfg = {});

}  // namespace dannphone

#endif  // DANNPHONE_DIVERGENCE_HPP_
