// src/dataset.cpp

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

#include "dannphone/dataset.hpp"

#include "dannphone/error.hpp"

namespace dannphone {

void LabeledDataset::validate() const {
  const std::size_t n = size();
  if (domain.size() != n)
    fail(ErrorKind::kData, "dataset has ", n, " frames but ", domain.size(),
         " domain tags");
  if (phoneme_ids && phoneme_ids->size() != n)
    fail(ErrorKind::kData, "dataset has ", n, " frames but ", phoneme_ids->size(),
         " phoneme ids");
  if (multilabel_targets && multilabel_targets->rows() != n)
    fail(ErrorKind::kData, "dataset has ", n, " frames but ",
         multilabel_targets->rows(), " multi-label rows");
  for (Domain d : domain)
    if (d != Domain::kSource && d != Domain::kTarget)
      fail(ErrorKind::kDomainLabel, "domain tag must be 0 or 1");
  std::size_t at = 0;
  for (const FrameRange &u : utterances) {
    if (u.begin != at || u.end <= u.begin || u.end > n)
      fail(ErrorKind::kData, "utterance ranges must tile the frames in order");
    at = u.end;
  }
  if (!utterances.empty() && at != n)
    fail(ErrorKind::kData, "utterance ranges cover ", at, " of ", n, " frames");
}

LabeledRows LabeledDataset::phoneme_rows() const {
  if (!phoneme_ids) fail(ErrorKind::kData, "dataset carries no phoneme ids");
  return {features, Labels::single(*phoneme_ids)};
}

LabeledRows LabeledDataset::phonetic_rows() const {
  if (!multilabel_targets) fail(ErrorKind::kData, "dataset carries no phonetic targets");
  return {features, Labels::multi(*multilabel_targets)};
}

UnlabeledDataset LabeledDataset::unlabeled() const { return {features, utterances}; }

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
  LabeledDataset out;
  out.features = gather_rows(features, rows);
  if (phoneme_ids) {
    std::vector<std::size_t> ids;
    ids.reserve(rows.size());
    for (std::size_t r : rows) ids.push_back(phoneme_ids->at(r));
    out.phoneme_ids = std::move(ids);
  }
  if (multilabel_targets) out.multilabel_targets = gather_rows(*multilabel_targets, rows);
  out.domain.reserve(rows.size());
  for (std::size_t r : rows) out.domain.push_back(domain.at(r));
  return out;
}

LabeledDataset LabeledDataset::with_features(RealMatrix f) const {
  if (f.rows() != size())
    fail(ErrorKind::kDimension, "replacement features have ", f.rows(),
         " rows, dataset has ", size());
  LabeledDataset out = *this;
  out.features = std::move(f);
  return out;
}

LabeledDataset concat(const LabeledDataset &a, const LabeledDataset &b) {
  if (a.size() == 0) return b;
  if (b.size() == 0) return a;
  if (a.phoneme_ids.has_value() != b.phoneme_ids.has_value() ||
      a.multilabel_targets.has_value() != b.multilabel_targets.has_value())
    fail(ErrorKind::kData, "cannot concatenate datasets with different targets");
  if (a.utterances.empty() != b.utterances.empty())
    fail(ErrorKind::kData, "cannot concatenate segmented and unsegmented datasets");
  LabeledDataset out;
  out.features = vconcat(a.features, b.features);
  if (a.phoneme_ids) {
    out.phoneme_ids = *a.phoneme_ids;
    out.phoneme_ids->insert(out.phoneme_ids->end(), b.phoneme_ids->begin(),
                            b.phoneme_ids->end());
  }
  if (a.multilabel_targets)
    out.multilabel_targets = vconcat(*a.multilabel_targets, *b.multilabel_targets);
  out.domain = a.domain;
  out.domain.insert(out.domain.end(), b.domain.begin(), b.domain.end());
  out.utterances = a.utterances;
  for (FrameRange u : b.utterances)
    out.utterances.push_back({u.begin + a.size(), u.end + a.size()});
  return out;
}

}  // namespace dannphone
