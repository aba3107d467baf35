// dannphone/losses.hpp

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

#ifndef DANNPHONE_LOSSES_HPP_
#define DANNPHONE_LOSSES_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dannphone {

/// Probabilities are clamped to [kProbEps, 1 - kProbEps] before any log.
inline constexpr double kProbEps = 1e-12;

/// Binary label vector; positives are the set bits, negatives the rest.
class MultiLabelTarget {
 public:
  MultiLabelTarget() = default;
  explicit MultiLabelTarget(std::vector<std::uint8_t> bits);
  /// From a real-valued row that must hold only exact 0.0 / 1.0 entries.
  static MultiLabelTarget from_reals(std::span<const double> row);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t l) const { return bits_[l] != 0; }
  const std::vector<std::uint8_t> &bits() const { return bits_; }
  std::vector<std::size_t> positives() const;
  std::vector<std::size_t> negatives() const;

 private:
  std::vector<std::uint8_t> bits_;
};

struct LossValue {
  double value = 0.0;
  std::vector<double> grad;
};

std::vector<double> softmax(std::span<const double> z);

/// -log p_y; grad is with respect to the logits that produced `probs`.
LossValue softmax_ce(std::span<const double> probs, std::size_t y,
                     double eps = kProbEps);

/// Summed binary cross-entropy; grad is with respect to pre-sigmoid logits.
LossValue bce_multilabel(std::span<const double> p, const MultiLabelTarget &y,
                         double eps = kProbEps);

/// sum_l (p_l - y_l)^2; grad is with respect to p.
LossValue squared_multilabel(std::span<const double> p,
                             const MultiLabelTarget &y);

/// Pairwise exponential ranking loss over positive x negative label pairs,
/// grad with respect to p. nullopt when the target has no positive or no
/// negative label, since the pair normalizer is undefined there.
std::optional<LossValue> pwe_loss(std::span<const double> p,
                                  const MultiLabelTarget &y);

/// d log(1/o) + (1-d) log(1/(1-o)); grad is with respect to the logit of o.
LossValue domain_loss(double o, int d, double eps = kProbEps);

enum class MultiLabelLoss { kBce, kSquared, kPwe };

std::string_view multilabel_loss_name(MultiLabelLoss k);
MultiLabelLoss parse_multilabel_loss(std::string_view name);

/// Loss of a sigmoid output layer with gradient taken through the sigmoid
/// (with respect to logits). `degenerate` is set for PWE targets without
/// both positives and negatives; value and grad are zero then.
struct SigmoidHeadLoss {
  LossValue loss;
  bool degenerate = false;
};
SigmoidHeadLoss sigmoid_head_loss(MultiLabelLoss kind, std::span<const double> p,
                                  const MultiLabelTarget &y,
                                  double eps = kProbEps);

}  // namespace dannphone

#endif  // DANNPHONE_LOSSES_HPP_
