// dannphone/dann.hpp

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

// Domain-adversarial network: a feature extractor shared by a label head
// (softmax over K classes, or L independent sigmoids) and a single logistic
// domain unit. Training looks for the saddle point of
//
//   E = mean_src L_y - lambda * (mean_src L_d + mean_tgt L_d),
//
// descending in the extractor and label head and ascending in the domain
// unit. The ascent is realized by a gradient-reversal layer between the
// extractor and the domain unit.

#ifndef DANNPHONE_DANN_HPP_
#define DANNPHONE_DANN_HPP_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "dannphone/losses.hpp"
#include "dannphone/matrix.hpp"
#include "dannphone/mlp.hpp"
#include "dannphone/sgd.hpp"

namespace dannphone {

enum class HeadKind { kSoftmaxSingleLabel, kSigmoidMultiLabel };

std::string_view head_kind_name(HeadKind k);
HeadKind parse_head_kind(std::string_view name);

/// Per-row supervision: class ids for a softmax head, or a 0/1 matrix for a
/// sigmoid head. Exactly one of the two is populated.
struct Labels {
  std::vector<std::size_t> classes;
  RealMatrix bits;

  static Labels single(std::vector<std::size_t> ids);
  static Labels multi(RealMatrix bits);
  bool is_multi() const { return !bits.empty(); }
  std::size_t size() const { return is_multi() ? bits.rows() : classes.size(); }
  Labels subset(std::span<const std::size_t> rows) const;
};

struct LabeledRows {
  RealMatrix x;
  Labels y;
};

struct DannSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims;  // at least one layer
  Activation activation = Activation::kSigmoid;
  HeadKind head_kind = HeadKind::kSoftmaxSingleLabel;
  std::size_t output_dim = 0;  // K classes or L labels

  std::size_t feature_dim() const { return hidden_dims.back(); }
  void validate() const;
  bool operator==(const DannSpec &) const = default;
};

struct DannParams {
  DannSpec spec;
  MlpParams feature_extractor;         // every layer uses spec.activation
  DenseLayer label_head;               // feature_dim -> output_dim, logits
  std::vector<double> domain_weight;   // u
  double domain_bias = 0.0;            // z

  bool operator==(const DannParams &) const = default;
};

/// Extractor and label head match init_params() of the equivalent plain
/// classifier MlpSpec under the same seed; the domain unit draws from its
/// own stream.
DannParams init_dann(const DannSpec &spec, std::uint64_t seed);

/// The plain classifier spec sharing the extractor and label head shapes.
MlpSpec classifier_spec(const DannSpec &spec);

enum class LambdaSchedule { kConstant, kRamp };

std::string_view lambda_schedule_name(LambdaSchedule s);
LambdaSchedule parse_lambda_schedule(std::string_view name);

struct AdvTrainConfig {
  SgdConfig sgd;
  double lambda = 0.1;
  LambdaSchedule lambda_schedule = LambdaSchedule::kConstant;
  double gamma = 10.0;  // ramp steepness
  // Step-size multiplier of the domain unit relative to the learning rate.
  double domain_lr_scale = 1.0;
  double clamp_eps = kProbEps;
  MultiLabelLoss multilabel_loss = MultiLabelLoss::kBce;

  void validate() const;
  bool operator==(const AdvTrainConfig &) const = default;
};

/// lambda at training progress in [0, 1]; ramp is 2 / (1 + exp(-gamma p)) - 1.
double lambda_at(const AdvTrainConfig &config, double progress);

/// Forward pass of the reversal layer: identity.
inline const RealMatrix &grad_reverse_forward(const RealMatrix &x) { return x; }
/// Backward pass of the reversal layer: -lambda * upstream.
RealMatrix grad_reverse(const RealMatrix &upstream, double lambda);

/// sigmoid(u . h + z) for every row of h.
std::vector<double> domain_head_forward(const RealMatrix &h,
                                        std::span<const double> u, double z);

/// Balanced adversarial batch; source rows carry domain label 0, target 1.
struct DomainBatch {
  RealMatrix source_x;
  Labels source_y;
  RealMatrix target_x;
};

struct DannGrads {
  MlpGrads feature_extractor;  // dE/d(W, b)
  DenseLayer label_head;       // dE/d(V, c)
  // d(-E)/d(u, z): a descent step on these is an ascent step on E.
  std::vector<double> domain_weight;
  double domain_bias = 0.0;
};

struct DannObjective {
  double value = 0.0;        // E
  double label_loss = 0.0;   // mean_src L_y
  double domain_loss = 0.0;  // mean_src L_d + mean_tgt L_d
  std::size_t degenerate_targets = 0;
  DannGrads grads;
};

DannObjective dann_objective(const DomainBatch &batch, const DannParams &params,
                             double lambda,
                             MultiLabelLoss multilabel_loss = MultiLabelLoss::kBce,
                             double clamp_eps = kProbEps);

/// Applies one SGD step with the gradients of dann_objective().
void dann_sgd_step(DannParams &params, const DannGrads &grads, std::size_t step,
                   const SgdConfig &config);

struct EpochRecord {
  std::size_t epoch = 0;
  double label_loss = 0.0;   // mean over the epoch's batches
  double domain_loss = 0.0;
  double domain_accuracy = 0.0;  // domain unit on the monitor split
  double lambda = 0.0;           // at the end of the epoch
  double learning_rate = 0.0;
  std::size_t degenerate_targets = 0;
};

/// Rows used to report domain-unit accuracy after every epoch.
struct DomainMonitor {
  RealMatrix source_x;
  RealMatrix target_x;
};

struct DannTrainResult {
  DannParams params;
  std::vector<EpochRecord> history;
};

/// Every step uses batch_size/2 source rows (reshuffled each epoch, the
/// remainder of an epoch dropped) and batch_size/2 target rows drawn from a
/// separately shuffled cycle. An epoch is one pass over the source rows.
/// Without a monitor, domain accuracy is measured on the training rows.
DannTrainResult train_dann(const LabeledRows &source, const RealMatrix &target,
                           const DannSpec &spec, const AdvTrainConfig &config,
                           const std::optional<DomainMonitor> &monitor = {});

struct ClassifierTrainResult {
  MlpParams params;
  std::vector<double> epoch_loss;  // mean per-row loss of each epoch
};

/// Plain supervised training with batches of sgd.batch_size rows, reshuffled
/// every epoch, remainder dropped.
ClassifierTrainResult train_classifier(
    const LabeledRows &rows, const MlpSpec &spec, HeadKind head,
    const SgdConfig &sgd, MultiLabelLoss multilabel_loss = MultiLabelLoss::kBce,
    double clamp_eps = kProbEps);

/// Source-only training of classifier_spec(spec) with the exact batching of
/// source rows that train_dann uses for the same config (batch_size/2 rows
/// per step). Shares train_dann's init and shuffle streams, so a lambda = 0
/// train_dann run reproduces it bit for bit.
ClassifierTrainResult train_source_classifier(const LabeledRows &source,
                                              const DannSpec &spec,
                                              const AdvTrainConfig &config);

/// Extractor output (the learned representation).
RealMatrix dann_features(const DannParams &params, const RealMatrix &x);

/// Softmax rows or independent sigmoids, per the head kind.
RealMatrix predict_label_probs(const DannParams &params, const RealMatrix &x);

/// Raw sigmoid scores of a 14-label phonetic head.
RealMatrix phonetic_scores(const DannParams &params, const RealMatrix &x);

/// Domain-unit probabilities of "target" for each row of x.
std::vector<double> predict_domain(const DannParams &params, const RealMatrix &x);

/// Softmax or sigmoid outputs of a plain classifier (linear last layer).
RealMatrix classifier_probs(const MlpParams &params, Activation activation,
                            HeadKind head, const RealMatrix &x);

std::vector<std::size_t> argmax_rows(const RealMatrix &m);

}  // namespace dannphone

#endif  // DANNPHONE_DANN_HPP_
