// tests/test_phonetics.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <set>

#include "dannphone/binio.hpp"
#include "dannphone/error.hpp"
#include "dannphone/phonetics.hpp"
#include "dannphone/rng.hpp"
#include "test_util.hpp"

using namespace dannphone;

namespace {

const PhoneticFeatureTable &shipped() {
  static const PhoneticFeatureTable t = load_spe_table(default_spe_table_path());
  return t;
}

ErrorKind kind_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kIo;
}

std::string header() {
  std::string h = "phone";
  for (auto n : kPhoneticFeatureNames) h += " " + std::string(n);
  return h + "\n";
}

}  // namespace

TEST_CASE("shipped table: silence row and invariants") {
  const auto &t = shipped();
  const FeatureBits &sil = phoneme_to_features("sil", t);
  for (std::size_t f = 0; f < kNumPhoneticFeatures; ++f)
    CHECK(sil[f] == (f == kSilenceFeature ? 1 : 0));
  for (const auto &[phone, bits] : t.entries) {
    std::size_t set = 0;
    for (auto b : bits) set += b;
    CHECK_MESSAGE(set > 0, phone);
    CHECK_MESSAGE((bits[kSilenceFeature] == 1) == (phone == "sil"), phone);
  }
  CHECK(t.phonemes.size() == 59);
}

TEST_CASE("shipped table: vowels are vocalic and not consonantal") {
  for (const char *v : {"iy", "ih", "eh", "ae", "aa", "ao", "ah", "uw", "uh", "ow", "ay", "oy"}) {
    const FeatureBits &b = phoneme_to_features(v, shipped());
    CHECK_MESSAGE(b[0] == 1, v);
    CHECK_MESSAGE(b[1] == 0, v);
  }
  CHECK(phoneme_to_features("s", shipped())[12] == 1);   // strident
  CHECK(phoneme_to_features("m", shipped())[11] == 1);   // nasal
}

TEST_CASE("unknown phone is a lookup error") {
  CHECK(kind_of([] { phoneme_to_features("zz", shipped()); }) == ErrorKind::kLookup);
  CHECK(kind_of([] { PhoneInventory::from_table(shipped()).id("zz"); }) == ErrorKind::kLookup);
}

TEST_CASE("table parsing errors") {
  std::string thirteen = "phone";
  for (std::size_t f = 0; f + 1 < kNumPhoneticFeatures; ++f)
    thirteen += " " + std::string(kPhoneticFeatureNames[f]);
  CHECK(kind_of([&] { parse_spe_table(thirteen + "\nsil 0 0 0 0 0 0 0 0 0 0 0 0 0\n"); }) ==
        ErrorKind::kSchema);
  CHECK(kind_of([] { parse_spe_table("sil 0 0 0 0 0 0 0 0 0 0 0 0 0 1\n"); }) ==
        ErrorKind::kSchema);
  CHECK(kind_of([] {
          parse_spe_table(header() + "x 1 0 0 0 0 0 0 0 0 0 0 0 0 0\n");
        }) == ErrorKind::kValidation);  // no sil row
  CHECK(kind_of([] {
          parse_spe_table(header() + "sil 0 0 0 0 0 0 0 0 0 0 0 0 0 1\nx 0 0 0 0 0 0 0 0 0 0 0 0 0 0\n");
        }) == ErrorKind::kValidation);  // all-zero row
  CHECK(kind_of([] {
          parse_spe_table(header() + "sil 0 0 0 0 0 0 0 0 0 0 0 0 0 1\nx 1 0 0 0 0 0 0 0 0 0 0 0 0 1\n");
        }) == ErrorKind::kValidation);  // silence bit outside sil
  CHECK(kind_of([] {
          parse_spe_table(header() + "sil 0 0 0 0 0 0 0 0 0 0 0 0 0 2\n");
        }) == ErrorKind::kFormat);
}

TEST_CASE("table serialization round-trips") {
  const auto &t = shipped();
  CHECK(parse_spe_table(serialize_spe_table(t)) == t);
  const auto dir = testing::temp_dir("phonetics_rt");
  write_file_bytes(dir / "t.txt", "# comment\n\n" + serialize_spe_table(t));
  CHECK(load_spe_table(dir / "t.txt") == t);
}

TEST_CASE("alignment reading and pause labels") {
  const auto dir = testing::temp_dir("phonetics_ali");
  write_file_bytes(dir / "a.phn", "0 1600 h#\n1600 3200 iy\n3200 4800 pau\n4800 6400 epi\n");
  const auto segs = read_alignment(dir / "a.phn", 16000.0);
  REQUIRE(segs.size() == 4);
  CHECK(segs[0].phoneme == "sil");
  CHECK(segs[1].phoneme == "iy");
  CHECK(segs[2].phoneme == "sil");
  CHECK(segs[3].phoneme == "sil");
  CHECK(segs[1].start == doctest::Approx(0.1));
  write_file_bytes(dir / "b.phn", "0 0.5 iy\n0.4 0.6 s\n");
  CHECK(kind_of([&] { read_alignment(dir / "b.phn"); }) == ErrorKind::kAlignment);
  write_file_bytes(dir / "c.phn", "0 x iy\n");
  CHECK(kind_of([&] { read_alignment(dir / "c.phn"); }) == ErrorKind::kParse);
}

TEST_CASE("frame targets: boundary belongs to the later segment, gaps are silence") {
  const auto &t = shipped();
  const auto inv = PhoneInventory::from_table(t);
  const std::vector<PhoneSegment> segs{{"iy", 0.0, 0.1}, {"s", 0.1, 0.2}, {"m", 0.3, 0.4}};
  const auto ft = frame_targets(segs, {0.05, 0.1, 0.25, 0.4, 0.35}, t, inv);
  CHECK(inv.symbol(ft.phoneme_ids[0]) == "iy");
  CHECK(inv.symbol(ft.phoneme_ids[1]) == "s");
  CHECK(inv.symbol(ft.phoneme_ids[2]) == "sil");
  CHECK(inv.symbol(ft.phoneme_ids[3]) == "sil");
  CHECK(inv.symbol(ft.phoneme_ids[4]) == "m");
  for (std::size_t r = 0; r < 5; ++r) {
    const FeatureBits &b = phoneme_to_features(inv.symbol(ft.phoneme_ids[r]), t);
    for (std::size_t f = 0; f < kNumPhoneticFeatures; ++f) CHECK(ft.bits(r, f) == b[f]);
    CHECK((ft.bits(r, kSilenceFeature) == 1.0) == (inv.symbol(ft.phoneme_ids[r]) == "sil"));
  }
}

TEST_CASE("frame targets match a brute-force interval search") {
  const auto &t = shipped();
  const auto inv = PhoneInventory::from_table(t);
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PhoneSegment> segs;
    double cursor = 0.0;
    for (int s = 0; s < 3; ++s) {
      const double start = cursor + (rng.uniform() < 0.3 ? 0.013 * rng.index(4) : 0.0);
      const double end = start + 0.005 + 0.2 * rng.uniform();
      segs.push_back({t.phonemes[rng.index(t.phonemes.size())], start, end});
      cursor = end;
    }
    std::vector<double> times;
    for (std::size_t f = 0; f < 80; ++f) times.push_back(0.0125 + 0.01 * f);
    const auto ft = frame_targets(segs, times, t, inv);
    for (std::size_t f = 0; f < times.size(); ++f) {
      std::string want = "sil";
      for (const auto &s : segs)
        if (times[f] >= s.start && times[f] < s.end) want = s.phoneme;
      CHECK(inv.symbol(ft.phoneme_ids[f]) == want);
    }
  }
}

TEST_CASE("timit folding to 39 classes") {
  const auto folding = fold_inventory(PhoneInventory::from_table(shipped()));
  CHECK(folding.folded.size() == 39);
  CHECK(!fold_timit_39("q"));
  CHECK(*fold_timit_39("ao") == "aa");
  CHECK(*fold_timit_39("pcl") == "sil");
  CHECK(*fold_timit_39("zh") == "sh");
  CHECK(*fold_timit_39("iy") == "iy");
  const auto inv = PhoneInventory::from_table(shipped());
  CHECK(!folding.map[inv.id("q")]);
  CHECK(folding.folded.symbol(*folding.map[inv.id("ix")]) == "ih");
}
