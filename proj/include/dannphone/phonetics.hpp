// dannphone/phonetics.hpp

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

// SPE phonetic-feature table and frame-level target construction.

#ifndef DANNPHONE_PHONETICS_HPP_
#define DANNPHONE_PHONETICS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dannphone/matrix.hpp"

namespace dannphone {

inline constexpr std::size_t kNumPhoneticFeatures = 14;
inline constexpr std::array<std::string_view, kNumPhoneticFeatures> kPhoneticFeatureNames = {
    "vocalic",  "consonantal", "high",  "back",       "low",   "anterior", "coronal",
    "round",    "tense",       "voice", "continuant", "nasal", "strident", "silence"};
inline constexpr std::size_t kSilenceFeature = kNumPhoneticFeatures - 1;
inline constexpr std::string_view kSilencePhone = "sil";

using FeatureBits = std::array<std::uint8_t, kNumPhoneticFeatures>;

struct PhoneticFeatureTable {
  std::vector<std::string> phonemes;  // file order
  std::map<std::string, FeatureBits, std::less<>> entries;

  /// Throws a validation error on a broken silence or nonzero invariant.
  void validate() const;
  bool contains(std::string_view phone) const { return entries.find(phone) != entries.end(); }
  bool operator==(const PhoneticFeatureTable &) const = default;
};

PhoneticFeatureTable parse_spe_table(std::string_view text, std::string_view origin = "<text>");
PhoneticFeatureTable load_spe_table(const std::filesystem::path &path);
std::string serialize_spe_table(const PhoneticFeatureTable &table);

/// The table file shipped with the sources, or DANNPHONE_SPE_TABLE if set.
std::filesystem::path default_spe_table_path();

const FeatureBits &phoneme_to_features(std::string_view phone,
                                       const PhoneticFeatureTable &table);

/// Dense phone ids for the phoneme classifier.
class PhoneInventory {
 public:
  PhoneInventory() = default;
  explicit PhoneInventory(std::vector<std::string> symbols);
  static PhoneInventory from_table(const PhoneticFeatureTable &table);

  std::size_t size() const { return symbols_.size(); }
  const std::string &symbol(std::size_t id) const { return symbols_.at(id); }
  const std::vector<std::string> &symbols() const { return symbols_; }
  std::optional<std::size_t> find(std::string_view phone) const;
  /// Throws a lookup error for unknown phones.
  std::size_t id(std::string_view phone) const;

  bool operator==(const PhoneInventory &other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct PhoneSegment {
  std::string phoneme;
  double start = 0.0;  // seconds
  double end = 0.0;

  bool operator==(const PhoneSegment &) const = default;
};

/// Alignment error unless every segment has start < end and segments are
/// sorted without overlap.
void check_alignment(const std::vector<PhoneSegment> &segments);

/// TIMIT boundary and pause labels (h#, pau, epi) become the silence phone.
std::string normalize_phone(std::string_view timit_label);

/// Reads "start end phone" lines. With a sample rate the times are sample
/// indices (TIMIT .phn); without one they are seconds.
std::vector<PhoneSegment> read_alignment(const std::filesystem::path &path,
                                         std::optional<double> sample_rate = {});

struct FrameTargets {
  RealMatrix bits;                       // T x 14
  std::vector<std::size_t> phoneme_ids;  // T, ids in the inventory
};

/// Each frame takes the segment containing its center, segments being
/// half-open [start, end); frames in gaps are silence.
FrameTargets frame_targets(const std::vector<PhoneSegment> &segments,
                           const std::vector<double> &frame_times,
                           const PhoneticFeatureTable &table,
                           const PhoneInventory &inventory);

/// Standard 61 -> 39 TIMIT folding applied to phone symbols (after
/// normalize_phone). Returns nullopt for phones that are deleted (q).
/// Symbols outside the TIMIT set fold to themselves.
std::optional<std::string> fold_timit_39(std::string_view phone);

/// Per-id folding onto a new inventory of folded symbols (first-seen order).
struct PhoneFolding {
  PhoneInventory folded;
  std::vector<std::optional<std::size_t>> map;  // original id -> folded id
};
PhoneFolding fold_inventory(const PhoneInventory &inventory);

}  // namespace dannphone

#endif  // DANNPHONE_PHONETICS_HPP_
