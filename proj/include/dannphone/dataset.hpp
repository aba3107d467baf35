// dannphone/dataset.hpp

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

// Frame-level datasets. Targets are optional; a stage that needs one asks for
// a view that carries it and gets a data error if it is absent. Target-domain
// training data is handed over as an UnlabeledDataset, which has no label
// fields at all.

#ifndef DANNPHONE_DATASET_HPP_
#define DANNPHONE_DATASET_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dannphone/dann.hpp"
#include "dannphone/matrix.hpp"

namespace dannphone {

enum class Domain : std::uint8_t { kSource = 0, kTarget = 1 };

/// Half-open frame range [begin, end) of one utterance.
struct FrameRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const FrameRange &) const = default;
};

struct UnlabeledDataset {
  RealMatrix features;
  std::vector<FrameRange> utterances;
};

struct LabeledDataset {
  RealMatrix features;
  std::optional<std::vector<std::size_t>> phoneme_ids;
  std::optional<RealMatrix> multilabel_targets;
  std::vector<Domain> domain;
  std::vector<FrameRange> utterances;  // empty means one run of frames

  std::size_t size() const { return features.rows(); }
  /// Throws a data error when sizes or domain tags disagree.
  void validate() const;

  LabeledRows phoneme_rows() const;
  LabeledRows phonetic_rows() const;
  UnlabeledDataset unlabeled() const;

  /// Rows in the given order; utterance ranges are dropped.
  LabeledDataset subset(std::span<const std::size_t> rows) const;
  /// Same labels, different features (same row count).
  LabeledDataset with_features(RealMatrix features) const;

  bool operator==(const LabeledDataset &) const = default;
};

LabeledDataset concat(const LabeledDataset &a, const LabeledDataset &b);

}  // namespace dannphone

#endif  // DANNPHONE_DATASET_HPP_
