// src/sgd.cpp

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

#include "dannphone/sgd.hpp"

#include <cmath>

#include "dannphone/error.hpp"

namespace dannphone {

std::string_view lr_schedule_name(LrSchedule s) {
  return s == LrSchedule::kConstant ? "constant" : "inverse_decay";
}

LrSchedule parse_lr_schedule(std::string_view name) {
  if (name == "constant") return LrSchedule::kConstant;
  if (name == "inverse_decay") return LrSchedule::kInverseDecay;
  fail(ErrorKind::kConfig, "unknown learning-rate schedule '", name, "'");
}

void SgdConfig::validate() const {
  if (!(lr0 > 0.0) || !std::isfinite(lr0))
    fail(ErrorKind::kConfig, "sgd.lr0 must be positive, got ", lr0);
  if (alpha < 0.0 || beta < 0.0)
    fail(ErrorKind::kConfig, "sgd.alpha and sgd.beta must be >= 0");
  if (batch_size < 2 || batch_size % 2 != 0)
    fail(ErrorKind::kConfig, "sgd.batch_size must be even and >= 2, got ",
         batch_size);
  if (epochs == 0) fail(ErrorKind::kConfig, "sgd.epochs must be >= 1");
}

double learning_rate(const SgdConfig &config, std::size_t step) {
  if (config.schedule == LrSchedule::kConstant) return config.lr0;
  return config.lr0 /
         std::pow(1.0 + config.alpha * static_cast<double>(step), config.beta);
}

void sgd_step(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads, std::size_t step,
              const SgdConfig &config) {
  if (params.size() != grads.size())
    fail(ErrorKind::kDimension, "sgd_step: ", params.size(),
         " parameter blocks vs ", grads.size(), " gradient blocks");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != grads[i].size())
      fail(ErrorKind::kDimension, "sgd_step: block ", i, " has ",
           params[i].size(), " params vs ", grads[i].size(), " grads");
    for (double g : grads[i])
      if (!std::isfinite(g))
        fail(ErrorKind::kTraining, "non-finite gradient at step ", step);
  }
  const double lr = learning_rate(config, step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i];
    auto g = grads[i];
    for (std::size_t j = 0; j < p.size(); ++j) p[j] -= lr * g[j];
  }
}

void sgd_step(MlpParams &params, const MlpGrads &grads, std::size_t step,
              const SgdConfig &config) {
  const auto p = param_views(params);
  const auto g = grad_views(grads);
  sgd_step(p, g, step, config);
}

}  // namespace dannphone
