// dannphone/mlp.hpp

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

#ifndef DANNPHONE_MLP_HPP_
#define DANNPHONE_MLP_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dannphone/matrix.hpp"

namespace dannphone {

enum class Activation { kSigmoid, kRelu, kTanh, kIdentity };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

inline double sigmoid(double t) {
  // Split on sign so exp never overflows.
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// Fully connected net: input_dim -> hidden_dims... -> output_dim. Hidden
/// layers use `activation`; the output layer is linear (logits).
struct MlpSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims;
  Activation activation = Activation::kSigmoid;
  std::size_t output_dim = 0;

  /// [input, hidden..., output]
  std::vector<std::size_t> layer_dims() const;
  void validate() const;
  bool operator==(const MlpSpec &) const = default;
};

struct DenseLayer {
  RealMatrix weight;         // out x in
  std::vector<double> bias;  // out

  std::size_t in_dim() const { return weight.cols(); }
  std::size_t out_dim() const { return weight.rows(); }
  bool operator==(const DenseLayer &) const = default;
};

struct MlpParams {
  std::vector<DenseLayer> layers;
  bool operator==(const MlpParams &) const = default;
};

/// Uniform Glorot init in [-s, s], s = sqrt(6 / (fan_in + fan_out)); zero
/// biases. Layers are drawn in order from one stream seeded by `seed`.
MlpParams init_params(const MlpSpec &spec, std::uint64_t seed);

/// activation(x W^T + b), row-wise.
RealMatrix dense_forward(const RealMatrix &x, const DenseLayer &layer,
                         Activation activation);

struct DenseGrads {
  RealMatrix grad_weight;
  std::vector<double> grad_bias;
  RealMatrix grad_input;
};

/// Gradients of sum(upstream .* dense_forward(x)) w.r.t. W, b and x.
DenseGrads dense_backward(const RealMatrix &x, const DenseLayer &layer,
                          Activation activation, const RealMatrix &upstream);
/// Same, reusing the forward output instead of recomputing it.
DenseGrads dense_backward(const RealMatrix &x, const DenseLayer &layer,
                          Activation activation, const RealMatrix &upstream,
                          const RealMatrix &output, bool need_input_grad = true);

enum class OutputMode { kActivated, kLinear };

/// Layer inputs and outputs from a forward pass over a stack of layers.
/// values[0] is the input, values.back() the stack output.
struct MlpTrace {
  std::vector<RealMatrix> values;
  const RealMatrix &output() const { return values.back(); }
};

MlpTrace mlp_forward(const MlpParams &params, Activation activation,
                     const RealMatrix &x, OutputMode mode);

struct MlpGrads {
  std::vector<DenseLayer> layers;  // same shapes as the params
  RealMatrix grad_input;           // empty unless requested
};

MlpGrads mlp_backward(const MlpParams &params, Activation activation,
                      const MlpTrace &trace, const RealMatrix &grad_output,
                      OutputMode mode, bool need_input_grad = false);

/// Zero-valued gradient holder shaped like `params`.
MlpGrads zero_grads_like(const MlpParams &params);

/// Flat views over every parameter value, weights before biases per layer.
std::vector<std::span<double>> param_views(MlpParams &params);
std::vector<std::span<const double>> param_views(const MlpParams &params);
std::vector<std::span<const double>> grad_views(const MlpGrads &grads);

}  // namespace dannphone

#endif  // DANNPHONE_MLP_HPP_
