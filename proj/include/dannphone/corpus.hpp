// include/dannphone/corpus.hpp

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

// On-disk corpus layout shared by the synthetic generator and the extract
// command: <dir>/<split>.farc feature archives, <dir>/<split>.ali frame
// labels (one line per utterance: id, then one phone per frame) and an
// optional <dir>/phones.txt inventory, one symbol per line.

#ifndef DANNPHONE_CORPUS_HPP_
#define DANNPHONE_CORPUS_HPP_

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dannphone/dataset.hpp"
#include "dannphone/phonetics.hpp"
#include "dannphone/pipeline.hpp"

namespace dannphone {

inline constexpr std::array<std::string_view, 4> kSplitNames{"source_train", "source_test",
                                                             "target_train", "target_test"};

struct UtteranceLabels {
  std::string id;
  std::vector<std::string> phones;  // one per frame
  bool operator==(const UtteranceLabels &) const = default;
};

std::string encode_frame_labels(const std::vector<UtteranceLabels> &labels);
std::vector<UtteranceLabels> parse_frame_labels(std::string_view text,
                                                std::string_view origin = "<text>");

void write_phone_list(const std::filesystem::path &path, const PhoneInventory &inventory);
PhoneInventory read_phone_list(const std::filesystem::path &path);

/// Features and labels of one split. Utterance ids and frame counts of the
/// archive and the label file must agree.
LabeledDataset load_split(const std::filesystem::path &dir, std::string_view split,
                          const PhoneticFeatureTable &table, const PhoneInventory &inventory);

/// phones.txt when present, else every phone of the table.
PhoneInventory corpus_inventory(const std::filesystem::path &dir,
                                const PhoneticFeatureTable &table);

/// All four splits; target_train labels are dropped.
ExperimentData load_corpus(const std::filesystem::path &dir, const PhoneticFeatureTable &table);

}  // namespace dannphone

#endif  // DANNPHONE_CORPUS_HPP_
