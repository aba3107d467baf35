// dannphone/pipeline.hpp

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

// Two-stage adaptation: a multi-label adversarial network on phonetic
// targets produces per-frame feature scores, the scores are appended to the
// acoustic features, and a phoneme classifier is trained on spliced windows
// of the result. Also evaluation, reverse cross-validation and baselines.

#ifndef DANNPHONE_PIPELINE_HPP_
#define DANNPHONE_PIPELINE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dannphone/dann.hpp"
#include "dannphone/dataset.hpp"
#include "dannphone/divergence.hpp"
#include "dannphone/features.hpp"
#include "dannphone/phonetics.hpp"

namespace dannphone {

/// [acoustic | scores], column order fixed.
RealMatrix append_scores(const RealMatrix &acoustic, const RealMatrix &scores);

/// Applies fn to every utterance block of x (the whole matrix when there are
/// no ranges) and stacks the results; fn must keep the row count.
RealMatrix per_utterance(const RealMatrix &x, const std::vector<FrameRange> &ranges,
                         const std::function<RealMatrix(const RealMatrix &)> &fn);

struct PhonemeDnnSpec {
  std::vector<std::size_t> hidden_dims{256};
  Activation activation = Activation::kSigmoid;
  bool operator==(const PhonemeDnnSpec &) const = default;
};

struct PhonemeModel {
  MlpParams params;
  Activation activation = Activation::kSigmoid;
  std::vector<double> epoch_loss;
};

/// Softmax phone classifier over n_phones; there is no domain head.
PhonemeModel train_phoneme_dnn(const RealMatrix &x, const std::vector<std::size_t> &phoneme_ids,
                               std::size_t n_phones, const PhonemeDnnSpec &spec,
                               const SgdConfig &sgd);

std::vector<std::size_t> predict_phonemes(const PhonemeModel &model, const RealMatrix &x);

struct EvalReport {
  std::size_t frames = 0;
  double frame_error_rate = 0.0;
  std::map<std::string, double> per_class_accuracy;  // phones seen in the reference
  std::optional<double> macro_f1_multilabel;
  std::optional<double> domain_classifier_accuracy;
  std::optional<double> proxy_a_distance;
  std::optional<double> approx_per;  // frame-collapse proxy, not a decoded PER

  void validate() const;
  bool operator==(const EvalReport &) const = default;
};

struct EvalInput {
  std::vector<std::size_t> predicted;
  const LabeledDataset *data = nullptr;    // needs phoneme ids
  const PhoneInventory *inventory = nullptr;
  const RealMatrix *phonetic_scores = nullptr;  // optional, for macro-F1
};

/// Frame error, per-class accuracy, macro-F1 of thresholded scores when both
/// scores and targets are present, and approx_per over utterances when the
/// inventory folds onto the 39-phone set.
EvalReport evaluate(const EvalInput &in);

/// Macro-averaged F1 over the columns of thresholded scores.
double macro_f1(const RealMatrix &scores, const RealMatrix &targets, double threshold = 0.5);

/// Collapses runs of equal predictions, drops silence ids, and returns the
/// edit distance to ref divided by the reference length.
double approx_per(const std::vector<std::size_t> &frame_preds,
                  const std::vector<std::size_t> &ref, std::optional<std::size_t> silence_id);

std::size_t edit_distance(const std::vector<std::size_t> &a, const std::vector<std::size_t> &b);

/// One point of the reverse cross-validation grid. Empty hidden dims keep
/// the base spec's.
struct RcvPoint {
  double lambda = 0.0;
  double lr0 = 0.1;
  std::vector<std::size_t> hidden_dims;
  bool operator==(const RcvPoint &) const = default;
};

struct RcvRow {
  RcvPoint point;
  double reverse_score = 0.0;  // accuracy of the reverse model on source validation
  bool degenerate = false;     // self-labels collapsed to one class
  DannParams forward;
};

struct RcvResult {
  std::size_t best = 0;
  std::vector<RcvRow> table;
};

inline constexpr double kRcvValidationFraction = 0.1;
inline constexpr double kRcvReverseLambda = 1.0;

/// Source is split 90/10 into train and validation. For each grid point a
/// forward model is trained source -> target, the target is self-labeled by
/// argmax (softmax head) or 0.5 thresholds (sigmoid head), a reverse model is
/// trained self-labeled target -> source and scored on the validation split.
/// Reverse models share the point's settings except lambda, which is
/// `reverse_lambda` for every point. The best reverse score wins; ties go to
/// the earliest grid point.
RcvResult reverse_cross_validation(const std::vector<RcvPoint> &grid, const LabeledRows &source,
                                   const RealMatrix &target, const DannSpec &base_spec,
                                   const AdvTrainConfig &base_config, std::uint64_t seed,
                                   double reverse_lambda = kRcvReverseLambda);

DannSpec with_point(const DannSpec &spec, const RcvPoint &p);
AdvTrainConfig with_point(const AdvTrainConfig &cfg, const RcvPoint &p);

/// Fraction of rows whose argmax (softmax) or thresholded bits (sigmoid)
/// match the labels; for bits, the mean over all entries.
double label_accuracy(const DannParams &params, const LabeledRows &rows);

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t context = 5;
  bool dann_spliced_input = true;
  // Phonetic-feature network; input_dim and output_dim are filled in.
  DannSpec dann_spec{0, {256}, Activation::kSigmoid, HeadKind::kSigmoidMultiLabel, 14};
  AdvTrainConfig dann;
  std::vector<RcvPoint> rcv_grid;  // empty: train dann as configured
  double rcv_reverse_lambda = kRcvReverseLambda;
  PhonemeDnnSpec phoneme_spec;
  SgdConfig phoneme_sgd;
  ProbeConfig probe;

  void validate() const;
  bool operator==(const ExperimentConfig &) const = default;
};

/// Static (pre-delta) features of every split with utterance ranges.
struct ExperimentData {
  LabeledDataset source_train;
  UnlabeledDataset target_train;
  LabeledDataset source_test;
  LabeledDataset target_test;
  PhoneInventory inventory;
};

struct ExperimentResult {
  EvalReport source_test;
  EvalReport target_test;
  std::optional<RcvResult> selection;
  DannParams dann;
  AdvTrainConfig dann_config;  // as trained, after any selection
  std::size_t dann_context = 0;  // splice width of the dann input
  PhonemeModel phoneme_model;
  NormStats norm;           // acoustic features after deltas
  NormStats score_norm;     // phonetic scores, before appending
  std::map<std::string, std::size_t> dims;  // stage -> width
};

struct DannStage {
  DannParams dann;
  AdvTrainConfig config;  // as trained
  std::optional<RcvResult> selection;
  NormStats norm;
  std::size_t context = 0;
  std::vector<EpochRecord> history;
};

/// Only the dann step: the phonetic network of the proposed flow
/// (multi-label head) or the phone network of the direct baseline (softmax
/// head). Same inputs and seeds as inside the full runs. With select_only
/// the grid search runs and nothing is retrained (dann stays empty).
DannStage train_dann_stage(const ExperimentConfig &cfg, const ExperimentData &data, HeadKind head,
                           bool select_only = false);

ExperimentResult run_adaptation_experiment(const ExperimentConfig &cfg,
                                           const ExperimentData &data);

/// Phoneme classifier on spliced acoustic features only, source trained.
ExperimentResult run_no_adaptation_baseline(const ExperimentConfig &cfg,
                                            const ExperimentData &data);

/// Single-label adversarial network over the phone inventory, applied
/// directly to spliced acoustic features.
ExperimentResult run_direct_dann_baseline(const ExperimentConfig &cfg,
                                          const ExperimentData &data);

/// Phone-level split of a synthetic or archived corpus, target train labels
/// removed.
ExperimentData experiment_data(const LabeledDataset &source_train, const LabeledDataset &source_test,
                               const LabeledDataset &target_train, const LabeledDataset &target_test,
                               PhoneInventory inventory);

}  // namespace dannphone

#endif  // DANNPHONE_PIPELINE_HPP_
