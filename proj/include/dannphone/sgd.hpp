// dannphone/sgd.hpp

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

#ifndef DANNPHONE_SGD_HPP_
#define DANNPHONE_SGD_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dannphone/mlp.hpp"

namespace dannphone {

enum class LrSchedule { kConstant, kInverseDecay };

std::string_view lr_schedule_name(LrSchedule s);
LrSchedule parse_lr_schedule(std::string_view name);

struct SgdConfig {
  double lr0 = 0.1;
  LrSchedule schedule = LrSchedule::kConstant;
  double alpha = 0.0;  // inverse decay: lr0 / (1 + alpha t)^beta
  double beta = 0.0;
  std::size_t batch_size = 32;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const SgdConfig &) const = default;
};

/// Step size for step index t (0-based, counted over the whole run).
double learning_rate(const SgdConfig &config, std::size_t step);

/// p <- p - lr(t) * g over matching flat views. Throws a training error
/// naming the step if any gradient is non-finite; params are untouched then.
void sgd_step(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads, std::size_t step,
              const SgdConfig &config);

void sgd_step(MlpParams &params, const MlpGrads &grads, std::size_t step,
              const SgdConfig &config);

}  // namespace dannphone

#endif  // DANNPHONE_SGD_HPP_
