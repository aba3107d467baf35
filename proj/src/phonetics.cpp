// src/phonetics.cpp

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

#include "dannphone/phonetics.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "dannphone/binio.hpp"
#include "dannphone/error.hpp"

#ifndef DANNPHONE_DATA_DIR
#define DANNPHONE_DATA_DIR "data"
#endif

namespace dannphone {

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace

void PhoneticFeatureTable::validate() const {
  if (phonemes.size() != entries.size())
    fail(ErrorKind::kValidation, "phone list and entries disagree");
  auto sil = entries.find(kSilencePhone);
  if (sil == entries.end())
    fail(ErrorKind::kValidation, "table has no '", kSilencePhone, "' row");
  for (const auto &[phone, bits] : entries) {
    std::size_t set = 0;
    for (std::uint8_t b : bits) set += b;
    if (set == 0) fail(ErrorKind::kValidation, "phone '", phone, "' has no feature set");
    if (phone == kSilencePhone) {
      if (set != 1 || !bits[kSilenceFeature])
        fail(ErrorKind::kValidation, "'", kSilencePhone,
             "' must set the silence feature and nothing else");
    } else if (bits[kSilenceFeature]) {
      fail(ErrorKind::kValidation, "phone '", phone, "' sets the silence feature");
    }
  }
}

PhoneticFeatureTable parse_spe_table(std::string_view text, std::string_view origin) {
  PhoneticFeatureTable table;
  bool have_header = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (!have_header) {
      if (tok.size() - 1 != kNumPhoneticFeatures)
        fail(ErrorKind::kSchema, origin, ":", lineno, ": header names ", tok.size() - 1,
             " features, expected ", kNumPhoneticFeatures);
      for (std::size_t f = 0; f < kNumPhoneticFeatures; ++f)
        if (tok[f + 1] != kPhoneticFeatureNames[f])
          fail(ErrorKind::kSchema, origin, ":", lineno, ": feature ", f + 1, " is '",
               tok[f + 1], "', expected '", kPhoneticFeatureNames[f], "'");
      have_header = true;
      continue;
    }
    if (tok.size() - 1 != kNumPhoneticFeatures)
      fail(ErrorKind::kSchema, origin, ":", lineno, ": phone '", tok[0], "' has ",
           tok.size() - 1, " values, expected ", kNumPhoneticFeatures);
    FeatureBits bits{};
    for (std::size_t f = 0; f < kNumPhoneticFeatures; ++f) {
      if (tok[f + 1] != "0" && tok[f + 1] != "1")
        fail(ErrorKind::kFormat, origin, ":", lineno, ": value '", tok[f + 1],
             "' is not 0 or 1");
      bits[f] = tok[f + 1] == "1";
    }
    if (!table.entries.emplace(tok[0], bits).second)
      fail(ErrorKind::kFormat, origin, ":", lineno, ": duplicate phone '", tok[0], "'");
    table.phonemes.push_back(tok[0]);
  }
  if (!have_header) fail(ErrorKind::kSchema, origin, ": missing feature header row");
  table.validate();
  return table;
}

PhoneticFeatureTable load_spe_table(const std::filesystem::path &path) {
  return parse_spe_table(read_file_bytes(path), path.string());
}

std::string serialize_spe_table(const PhoneticFeatureTable &table) {
  std::ostringstream os;
  os << "phone";
  for (auto name : kPhoneticFeatureNames) os << ' ' << name;
  os << '\n';
  for (const auto &phone : table.phonemes) {
    os << phone;
    for (std::uint8_t b : table.entries.at(phone)) os << ' ' << int(b);
    os << '\n';
  }
  return os.str();
}

std::filesystem::path default_spe_table_path() {
  if (const char *env = std::getenv("DANNPHONE_SPE_TABLE")) return env;
  return std::filesystem::path(DANNPHONE_DATA_DIR) / "spe_timit.txt";
}

const FeatureBits &phoneme_to_features(std::string_view phone,
                                       const PhoneticFeatureTable &table) {
  auto it = table.entries.find(phone);
  if (it == table.entries.end())
    fail(ErrorKind::kLookup, "phone '", phone, "' is not in the feature table");
  return it->second;
}

PhoneInventory::PhoneInventory(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (!index_.emplace(symbols_[i], i).second)
      fail(ErrorKind::kFormat, "duplicate phone '", symbols_[i], "' in inventory");
}

PhoneInventory PhoneInventory::from_table(const PhoneticFeatureTable &table) {
  return PhoneInventory(table.phonemes);
}

std::optional<std::size_t> PhoneInventory::find(std::string_view phone) const {
  auto it = index_.find(phone);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t PhoneInventory::id(std::string_view phone) const {
  if (auto i = find(phone)) return *i;
  fail(ErrorKind::kLookup, "phone '", phone, "' is not in the inventory");
}

void check_alignment(const std::vector<PhoneSegment> &segments) {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto &s = segments[i];
    if (!(s.start < s.end))
      fail(ErrorKind::kAlignment, "segment ", i, " ('", s.phoneme, "') has start ",
           s.start, " >= end ", s.end);
    if (i > 0 && s.start < segments[i - 1].end)
      fail(ErrorKind::kAlignment, "segment ", i, " ('", s.phoneme,
           "') starts before the previous one ends");
  }
}

std::string normalize_phone(std::string_view label) {
  if (label == "h#" || label == "pau" || label == "epi") return std::string(kSilencePhone);
  return std::string(label);
}

std::vector<PhoneSegment> read_alignment(const std::filesystem::path &path,
                                         std::optional<double> sample_rate) {
  const std::string text = read_file_bytes(path);
  std::istringstream in(text);
  std::string line;
  std::vector<PhoneSegment> segs;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 3)
      fail(ErrorKind::kParse, path.string(), ":", lineno, ": expected 'start end phone'");
    PhoneSegment s;
    try {
      std::size_t used = 0;
      s.start = std::stod(tok[0], &used);
      if (used != tok[0].size()) throw std::invalid_argument(tok[0]);
      s.end = std::stod(tok[1], &used);
      if (used != tok[1].size()) throw std::invalid_argument(tok[1]);
    } catch (const std::logic_error &) {
      fail(ErrorKind::kParse, path.string(), ":", lineno, ": bad time value");
    }
    if (sample_rate) {
      s.start /= *sample_rate;
      s.end /= *sample_rate;
    }
    s.phoneme = normalize_phone(tok[2]);
    segs.push_back(std::move(s));
  }
  check_alignment(segs);
  return segs;
}

FrameTargets frame_targets(const std::vector<PhoneSegment> &segments,
                           const std::vector<double> &frame_times,
                           const PhoneticFeatureTable &table,
                           const PhoneInventory &inventory) {
  check_alignment(segments);
  const FeatureBits &sil_bits = phoneme_to_features(kSilencePhone, table);
  const std::size_t sil_id = inventory.id(kSilencePhone);
  FrameTargets out{RealMatrix(frame_times.size(), kNumPhoneticFeatures),
                   std::vector<std::size_t>(frame_times.size())};
  for (std::size_t t = 0; t < frame_times.size(); ++t) {
    const double c = frame_times[t];
    auto it = std::upper_bound(segments.begin(), segments.end(), c,
                               [](double v, const PhoneSegment &s) { return v < s.start; });
    const FeatureBits *bits = &sil_bits;
    std::size_t id = sil_id;
    if (it != segments.begin()) {
      const PhoneSegment &s = *std::prev(it);
      if (c >= s.start && c < s.end) {
        bits = &phoneme_to_features(s.phoneme, table);
        id = inventory.id(s.phoneme);
      }
    }
    for (std::size_t f = 0; f < kNumPhoneticFeatures; ++f) out.bits(t, f) = (*bits)[f];
    out.phoneme_ids[t] = id;
  }
  return out;
}

std::optional<std::string> fold_timit_39(std::string_view phone) {
  static const std::map<std::string, std::string, std::less<>> kFold = {
      {"ao", "aa"},   {"ax", "ah"},   {"ax-h", "ah"}, {"axr", "er"},  {"hv", "hh"},
      {"ix", "ih"},   {"el", "l"},    {"em", "m"},    {"en", "n"},    {"nx", "n"},
      {"eng", "ng"},  {"zh", "sh"},   {"ux", "uw"},   {"pcl", "sil"}, {"tcl", "sil"},
      {"kcl", "sil"}, {"bcl", "sil"}, {"dcl", "sil"}, {"gcl", "sil"}, {"h#", "sil"},
      {"pau", "sil"}, {"epi", "sil"}};
  if (phone == "q") return std::nullopt;
  auto it = kFold.find(phone);
  return it == kFold.end() ? std::string(phone) : it->second;
}

PhoneFolding fold_inventory(const PhoneInventory &inventory) {
  std::vector<std::string> folded;
  std::map<std::string, std::size_t, std::less<>> seen;
  PhoneFolding out;
  for (const auto &sym : inventory.symbols()) {
    auto f = fold_timit_39(sym);
    if (!f) {
      out.map.push_back(std::nullopt);
      continue;
    }
    auto [it, fresh] = seen.emplace(*f, folded.size());
    if (fresh) folded.push_back(*f);
    out.map.push_back(it->second);
  }
  out.folded = PhoneInventory(std::move(folded));
  return out;
}

}  // namespace dannphone
