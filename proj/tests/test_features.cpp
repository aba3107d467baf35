// tests/test_features.cpp

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

#include <cmath>
#include <numbers>

#include "dannphone/binio.hpp"
#include "dannphone/error.hpp"
#include "dannphone/features.hpp"
#include "test_util.hpp"

using namespace dannphone;
using dannphone::testing::random_matrix;
using dannphone::testing::temp_dir;

namespace {

ErrorKind kind_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kIo;
}

// Minimal PCM header for hand-made files.
std::string wav_bytes(std::uint16_t channels, std::uint32_t rate, const std::vector<std::int16_t> &s) {
  std::string out = "RIFF";
  put_u32(out, 36 + 2 * s.size());
  out += "WAVEfmt ";
  put_u32(out, 16);
  out += std::string("\x01\x00", 2);
  out += std::string(reinterpret_cast<const char *>(&channels), 2);
  put_u32(out, rate);
  put_u32(out, rate * channels * 2);
  const std::uint16_t align = channels * 2, bits = 16;
  out += std::string(reinterpret_cast<const char *>(&align), 2);
  out += std::string(reinterpret_cast<const char *>(&bits), 2);
  out += "data";
  put_u32(out, 2 * s.size());
  for (std::int16_t v : s) out += std::string(reinterpret_cast<const char *>(&v), 2);
  return out;
}

Utterance tone(double hz, std::size_t n, double rate = 16000.0) {
  Utterance u{"tone", std::vector<double>(n), rate};
  for (std::size_t i = 0; i < n; ++i) u.samples[i] = 0.5 * std::sin(2 * std::numbers::pi * hz * i / rate);
  return u;
}

}  // namespace

TEST_CASE("wav: write then read") {
  const auto dir = temp_dir("features_wav");
  std::vector<double> one_second(16000, 0.1);
  write_wav(dir / "a.wav", one_second, 16000);
  const Utterance u = read_wav(dir / "a.wav");
  CHECK(u.samples.size() == 16000);
  CHECK(u.sample_rate == 16000.0);
  CHECK(u.id == "a");

  write_file_bytes(dir / "c.wav", wav_bytes(1, 16000, std::vector<std::int16_t>(100, 8192)));
  const Utterance c = read_wav(dir / "c.wav");
  for (double v : c.samples) CHECK(std::abs(v - 0.25) <= 1.0 / 32768);

  write_file_bytes(dir / "s.wav", wav_bytes(2, 16000, std::vector<std::int16_t>(100, 1)));
  CHECK(kind_of([&] { read_wav(dir / "s.wav"); }) == ErrorKind::kUnsupportedFormat);
  write_file_bytes(dir / "x.wav", "not a wav at all");
  CHECK(kind_of([&] { read_wav(dir / "x.wav"); }) == ErrorKind::kParse);
}

TEST_CASE("frame count and geometry") {
  FbankConfig cfg;
  CHECK(cfg.win_samples(16000) == 400);
  CHECK(cfg.hop_samples(16000) == 160);
  CHECK(frame_count(16000, 400, 160) == 98);
  CHECK(frame_count(399, 400, 160) == 0);
  CHECK(frame_count(400, 400, 160) == 1);
  const RealMatrix f = fbank(tone(440, 16000), cfg);
  CHECK(f.rows() == 98);
  CHECK(f.cols() == 23);
  for (double v : f.data()) CHECK(std::isfinite(v));
  const auto times = frame_center_times(3, cfg, 16000);
  CHECK(times[0] == doctest::Approx(0.0125));
  CHECK(times[2] == doctest::Approx(0.0325));
  CHECK(hz_to_mel(mel_to_hz(1234.5)) == doctest::Approx(1234.5));
  Utterance tiny{"t", std::vector<double>(100, 0.0), 16000};
  CHECK(kind_of([&] { fbank(tiny, cfg); }) == ErrorKind::kTooShort);
  FbankConfig bad;
  bad.hop_ms = 30;
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::kConfig);
}

TEST_CASE("silence hits the log floor") {
  FbankConfig cfg;
  Utterance z{"z", std::vector<double>(4000, 0.0), 16000};
  const RealMatrix f = fbank(z, cfg);
  for (double v : f.data()) CHECK(v == cfg.log_floor);
}

TEST_CASE("a pure tone peaks in the filter nearest its frequency") {
  FbankConfig cfg;
  const auto centers = mel_center_frequencies(cfg, 16000);
  REQUIRE(centers.size() == 23);
  std::size_t nearest = 0;
  for (std::size_t i = 0; i < centers.size(); ++i)
    if (std::abs(centers[i] - 1000) < std::abs(centers[nearest] - 1000)) nearest = i;
  const RealMatrix f = fbank(tone(1000, 8000), cfg);
  for (std::size_t t = 0; t < f.rows(); ++t) {
    std::size_t best = 0;
    for (std::size_t c = 0; c < f.cols(); ++c)
      if (f(t, c) > f(t, best)) best = c;
    CHECK(best == nearest);
  }
}

TEST_CASE("deltas") {
  RealMatrix c(10, 2);
  for (std::size_t t = 0; t < 10; ++t) {
    c(t, 0) = 3.0;
    c(t, 1) = double(t);
  }
  const RealMatrix d = add_deltas(c);
  REQUIRE(d.cols() == 6);
  for (std::size_t t = 0; t < 10; ++t) {
    CHECK(d(t, 0) == 3.0);
    CHECK(d(t, 1) == double(t));
    CHECK(d(t, 2) == 0.0);
    CHECK(d(t, 4) == 0.0);
  }
  for (std::size_t t = 2; t + 2 < 10; ++t) CHECK(d(t, 3) == doctest::Approx(1.0));
  for (std::size_t t = 4; t + 4 < 10; ++t) CHECK(d(t, 5) == doctest::Approx(0.0));
  Rng rng(2);
  CHECK(add_deltas(random_matrix(rng, 7, 23)).cols() == 69);
}

TEST_CASE("context splicing matches a gather") {
  Rng rng(3);
  const RealMatrix x = random_matrix(rng, 9, 69);
  const RealMatrix s = splice_context(x, 5);
  REQUIRE(s.cols() == 759);
  REQUIRE(s.rows() == 9);
  for (std::size_t t = 0; t < 9; ++t)
    for (std::size_t j = 0; j < 11; ++j) {
      const long src = std::clamp<long>(long(t) + long(j) - 5, 0, 8);
      for (std::size_t c = 0; c < 69; ++c) CHECK(s(t, j * 69 + c) == x(src, c));
    }
  const RealMatrix one = splice_context(random_matrix(rng, 1, 4), 2);
  CHECK(one.rows() == 1);
  CHECK(one.cols() == 20);
  CHECK(splice_context(x, 0) == x);
}

TEST_CASE("normalization") {
  Rng rng(4);
  RealMatrix x = random_matrix(rng, 500, 3, 4.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    x(r, 0) += 10.0;
    x(r, 2) = 7.0;
  }
  const NormStats s = normalize_fit(x);
  const RealMatrix y = normalize_apply(x, s);
  for (std::size_t c = 0; c < 2; ++c) {
    double m = 0, v = 0;
    for (std::size_t r = 0; r < y.rows(); ++r) m += y(r, c);
    m /= y.rows();
    for (std::size_t r = 0; r < y.rows(); ++r) v += (y(r, c) - m) * (y(r, c) - m);
    CHECK(std::abs(m) < 1e-10);
    CHECK(v / y.rows() == doctest::Approx(1.0));
  }
  for (std::size_t r = 0; r < y.rows(); ++r) CHECK(y(r, 2) == 0.0);
  CHECK(kind_of([&] { normalize_apply(RealMatrix(2, 4), s); }) == ErrorKind::kDimension);
  CHECK(kind_of([] { normalize_fit(RealMatrix(0, 3)); }) == ErrorKind::kData);
}

TEST_CASE("feature archive") {
  Rng rng(5);
  const FeatureArchive a{{"u1", random_matrix(rng, 4, 3)}, {"u2", random_matrix(rng, 1, 3)}};
  const std::string bytes = encode_archive(a);
  CHECK(bytes.substr(0, 4) == "FARC");
  CHECK(decode_archive(bytes) == a);
  const auto dir = temp_dir("features_farc");
  write_archive(dir / "a.farc", a);
  CHECK(read_archive(dir / "a.farc") == a);
  CHECK(read_file_bytes(dir / "a.farc") == bytes);
  CHECK(kind_of([&] { decode_archive("XXXX" + bytes.substr(4)); }) == ErrorKind::kFormat);
  CHECK(kind_of([&] { decode_archive(bytes.substr(0, bytes.size() - 3)); }) == ErrorKind::kParse);
  CHECK(kind_of([&] { decode_archive(bytes + "x"); }) == ErrorKind::kFormat);
}
