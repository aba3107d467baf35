// src/corpus.cpp

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

#include "dannphone/corpus.hpp"

#include <sstream>

#include "dannphone/binio.hpp"
#include "dannphone/error.hpp"
#include "dannphone/features.hpp"

namespace dannphone {

std::string encode_frame_labels(const std::vector<UtteranceLabels> &labels) {
  std::string out;
  for (const UtteranceLabels &u : labels) {
    out += u.id;
    for (const std::string &p : u.phones) out += " " + p;
    out += "\n";
  }
  return out;
}

std::vector<UtteranceLabels> parse_frame_labels(std::string_view text, std::string_view origin) {
  std::vector<UtteranceLabels> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    UtteranceLabels u;
    if (!(fields >> u.id)) continue;
    for (std::string p; fields >> p;) u.phones.push_back(std::move(p));
    if (u.phones.empty())
      fail(ErrorKind::kParse, origin, ":", lineno, ": utterance ", u.id, " has no frames");
    out.push_back(std::move(u));
  }
  return out;
}

void write_phone_list(const std::filesystem::path &path, const PhoneInventory &inventory) {
  std::string out;
  for (const std::string &s : inventory.symbols()) out += s + "\n";
  write_file_bytes(path, out);
}

PhoneInventory read_phone_list(const std::filesystem::path &path) {
  std::istringstream in(read_file_bytes(path));
  std::vector<std::string> symbols;
  for (std::string s; in >> s;) symbols.push_back(std::move(s));
  if (symbols.empty()) fail(ErrorKind::kParse, path.string(), ": empty phone list");
  return PhoneInventory(std::move(symbols));
}

LabeledDataset load_split(const std::filesystem::path &dir, std::string_view split,
                          const PhoneticFeatureTable &table, const PhoneInventory &inventory) {
  const auto farc = dir / (std::string(split) + ".farc");
  const auto ali = dir / (std::string(split) + ".ali");
  const FeatureArchive archive = read_archive(farc);
  const auto labels = parse_frame_labels(read_file_bytes(ali), ali.string());
  if (archive.size() != labels.size())
    fail(ErrorKind::kAlignment, farc.string(), " has ", archive.size(), " utterances but ",
         ali.string(), " has ", labels.size());
  if (archive.empty()) fail(ErrorKind::kData, farc.string(), " is empty");
  LabeledDataset ds;
  std::vector<double> values;
  std::vector<std::size_t> ids;
  std::vector<double> bits;
  const std::size_t dim = archive.front().features.cols();
  for (std::size_t u = 0; u < archive.size(); ++u) {
    const ArchiveEntry &e = archive[u];
    if (e.id != labels[u].id)
      fail(ErrorKind::kAlignment, "utterance ", u, " is ", e.id, " in ", farc.string(),
           " but ", labels[u].id, " in ", ali.string());
    if (e.features.rows() != labels[u].phones.size())
      fail(ErrorKind::kAlignment, e.id, ": ", e.features.rows(), " frames but ",
           labels[u].phones.size(), " labels");
    if (e.features.cols() != dim)
      fail(ErrorKind::kDimension, e.id, " has ", e.features.cols(), " columns, expected ", dim);
    const std::size_t begin = ids.size();
    values.insert(values.end(), e.features.values().begin(), e.features.values().end());
    for (const std::string &p : labels[u].phones) {
      ids.push_back(inventory.id(p));
      const FeatureBits &b = phoneme_to_features(p, table);
      bits.insert(bits.end(), b.begin(), b.end());
    }
    ds.utterances.push_back({begin, ids.size()});
  }
  const std::size_t n = ids.size();
  ds.features = RealMatrix(n, dim, std::move(values));
  ds.multilabel_targets = RealMatrix(n, kNumPhoneticFeatures, std::move(bits));
  ds.phoneme_ids = std::move(ids);
  ds.domain.assign(n, split.starts_with("source") ? Domain::kSource : Domain::kTarget);
  ds.validate();
  return ds;
}

PhoneInventory corpus_inventory(const std::filesystem::path &dir,
                                const PhoneticFeatureTable &table) {
  const auto list = dir / "phones.txt";
  return std::filesystem::exists(list) ? read_phone_list(list) : PhoneInventory::from_table(table);
}

ExperimentData load_corpus(const std::filesystem::path &dir, const PhoneticFeatureTable &table) {
  const PhoneInventory inv = corpus_inventory(dir, table);
  return experiment_data(load_split(dir, kSplitNames[0], table, inv),
                         load_split(dir, kSplitNames[1], table, inv),
                         load_split(dir, kSplitNames[2], table, inv),
                         load_split(dir, kSplitNames[3], table, inv), inv);
}

}  // namespace dannphone
