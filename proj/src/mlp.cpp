// src/mlp.cpp

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

#include "dannphone/mlp.hpp"

#include <cmath>

#include "dannphone/error.hpp"
#include "dannphone/rng.hpp"

namespace dannphone {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kIdentity: return "identity";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  fail(ErrorKind::kConfig, "unknown activation '", name, "'");
}

std::vector<std::size_t> MlpSpec::layer_dims() const {
  std::vector<std::size_t> dims{input_dim};
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(output_dim);
  return dims;
}

void MlpSpec::validate() const {
  for (std::size_t d : layer_dims())
    if (d == 0) fail(ErrorKind::kConfig, "network dimensions must be >= 1");
}

MlpParams init_params(const MlpSpec &spec, std::uint64_t seed) {
  spec.validate();
  const auto dims = spec.layer_dims();
  Rng rng(seed);
  MlpParams params;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t in = dims[l], out = dims[l + 1];
    const double s = std::sqrt(6.0 / static_cast<double>(in + out));
    DenseLayer layer{RealMatrix(out, in), std::vector<double>(out, 0.0)};
    for (double &w : layer.weight.data()) w = rng.uniform(-s, s);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

namespace {

double activate(Activation a, double t) {
  switch (a) {
    case Activation::kSigmoid: return sigmoid(t);
    case Activation::kRelu: return t > 0.0 ? t : 0.0;
    case Activation::kTanh: return std::tanh(t);
    case Activation::kIdentity: return t;
  }
  return t;
}

// Derivative expressed through the activation's output y.
double activation_slope(Activation a, double y) {
  switch (a) {
    case Activation::kSigmoid: return y * (1.0 - y);
    case Activation::kRelu: return y > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: return 1.0 - y * y;
    case Activation::kIdentity: return 1.0;
  }
  return 1.0;
}

void check_layer(const DenseLayer &layer) {
  if (layer.bias.size() != layer.out_dim())
    fail(ErrorKind::kDimension, "bias length ", layer.bias.size(),
         " does not match layer width ", layer.out_dim());
}

}  // namespace

RealMatrix dense_forward(const RealMatrix &x, const DenseLayer &layer,
                         Activation activation) {
  check_layer(layer);
  if (x.cols() != layer.in_dim())
    fail(ErrorKind::kDimension, "layer expects ", layer.in_dim(),
         " inputs, got ", x.cols());
  RealMatrix out = matmul_transposed(x, layer.weight);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c)
      row[c] = activate(activation, row[c] + layer.bias[c]);
  }
  return out;
}

DenseGrads dense_backward(const RealMatrix &x, const DenseLayer &layer,
                          Activation activation, const RealMatrix &upstream) {
  return dense_backward(x, layer, activation, upstream,
                        dense_forward(x, layer, activation), true);
}

DenseGrads dense_backward(const RealMatrix &x, const DenseLayer &layer,
                          Activation activation, const RealMatrix &upstream,
                          const RealMatrix &output, bool need_input_grad) {
  check_layer(layer);
  if (x.cols() != layer.in_dim() || upstream.rows() != x.rows() ||
      upstream.cols() != layer.out_dim() || output.rows() != upstream.rows() ||
      output.cols() != upstream.cols())
    fail(ErrorKind::kDimension, "dense_backward shape mismatch: x ", x.rows(),
         "x", x.cols(), ", layer ", layer.out_dim(), "x", layer.in_dim(),
         ", upstream ", upstream.rows(), "x", upstream.cols());

  // delta = upstream .* f'(pre-activation)
  RealMatrix delta = upstream;
  if (activation != Activation::kIdentity) {
    for (std::size_t i = 0; i < delta.size(); ++i)
      delta.data()[i] *= activation_slope(activation, output.data()[i]);
  }
  DenseGrads g;
  g.grad_weight = transposed_matmul(delta, x);
  g.grad_bias = column_sums(delta);
  if (need_input_grad) g.grad_input = matmul(delta, layer.weight);
  return g;
}

MlpTrace mlp_forward(const MlpParams &params, Activation activation,
                     const RealMatrix &x, OutputMode mode) {
  MlpTrace trace;
  trace.values.reserve(params.layers.size() + 1);
  trace.values.push_back(x);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const bool last = l + 1 == params.layers.size();
    const Activation a =
        last && mode == OutputMode::kLinear ? Activation::kIdentity : activation;
    trace.values.push_back(dense_forward(trace.values.back(), params.layers[l], a));
  }
  return trace;
}

MlpGrads mlp_backward(const MlpParams &params, Activation activation,
                      const MlpTrace &trace, const RealMatrix &grad_output,
                      OutputMode mode, bool need_input_grad) {
  const std::size_t n = params.layers.size();
  if (trace.values.size() != n + 1)
    fail(ErrorKind::kDimension, "trace does not match network depth");
  MlpGrads grads;
  grads.layers.resize(n);
  RealMatrix upstream = grad_output;
  for (std::size_t l = n; l-- > 0;) {
    const bool last = l + 1 == n;
    const Activation a =
        last && mode == OutputMode::kLinear ? Activation::kIdentity : activation;
    const bool want_input = l > 0 || need_input_grad;
    DenseGrads g = dense_backward(trace.values[l], params.layers[l], a, upstream,
                                  trace.values[l + 1], want_input);
    grads.layers[l] = DenseLayer{std::move(g.grad_weight), std::move(g.grad_bias)};
    upstream = std::move(g.grad_input);
  }
  if (need_input_grad) grads.grad_input = std::move(upstream);
  return grads;
}

MlpGrads zero_grads_like(const MlpParams &params) {
  MlpGrads g;
  for (const auto &layer : params.layers)
    g.layers.push_back(DenseLayer{RealMatrix(layer.out_dim(), layer.in_dim()),
                                  std::vector<double>(layer.out_dim(), 0.0)});
  return g;
}

std::vector<std::span<double>> param_views(MlpParams &params) {
  std::vector<std::span<double>> v;
  for (auto &layer : params.layers) {
    v.push_back(layer.weight.data());
    v.push_back(layer.bias);
  }
  return v;
}

std::vector<std::span<const double>> param_views(const MlpParams &params) {
  std::vector<std::span<const double>> v;
  for (const auto &layer : params.layers) {
    v.push_back(layer.weight.data());
    v.push_back(layer.bias);
  }
  return v;
}

std::vector<std::span<const double>> grad_views(const MlpGrads &grads) {
  std::vector<std::span<const double>> v;
  for (const auto &layer : grads.layers) {
    v.push_back(layer.weight.data());
    v.push_back(layer.bias);
  }
  return v;
}

}  // namespace dannphone
