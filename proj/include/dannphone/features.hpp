// dannphone/features.hpp

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

// Acoustic frontend: WAV reading, log-mel filterbank, deltas, context
// splicing, global normalization and the binary feature archive.

#ifndef DANNPHONE_FEATURES_HPP_
#define DANNPHONE_FEATURES_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dannphone/matrix.hpp"

namespace dannphone {

struct Utterance {
  std::string id;
  std::vector<double> samples;  // in [-1, 1)
  double sample_rate = 0.0;
};

Utterance read_wav(const std::filesystem::path &path);
/// PCM 16-bit mono; samples are clipped to the 16-bit range.
void write_wav(const std::filesystem::path &path, const std::vector<double> &samples,
               int sample_rate);

enum class WindowKind { kHamming, kHann, kRectangular };

std::string_view window_kind_name(WindowKind w);
WindowKind parse_window_kind(std::string_view name);

struct FbankConfig {
  std::size_t n_filters = 23;
  double win_ms = 25.0;
  double hop_ms = 10.0;
  double preemphasis = 0.97;
  WindowKind window = WindowKind::kHamming;
  double mel_low = 20.0;   // Hz
  double mel_high = 0.0;   // Hz; 0 means Nyquist
  double log_floor = -23.025850929940457;  // ln(1e-10), smallest output value

  void validate() const;
  std::size_t win_samples(double sample_rate) const;
  std::size_t hop_samples(double sample_rate) const;
  bool operator==(const FbankConfig &) const = default;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// floor((n - win) / hop) + 1, or 0 when n < win.
std::size_t frame_count(std::size_t n_samples, std::size_t win, std::size_t hop);

/// Center frequencies (Hz) of the triangular filters.
std::vector<double> mel_center_frequencies(const FbankConfig &cfg, double sample_rate);

/// Frame-center times in seconds of a T-frame analysis.
std::vector<double> frame_center_times(std::size_t n_frames, const FbankConfig &cfg,
                                       double sample_rate);

/// T x n_filters log-mel energies.
RealMatrix fbank(const Utterance &u, const FbankConfig &cfg);

/// [static | delta | delta-delta] with the N=2 regression window and
/// replicated edge frames.
RealMatrix add_deltas(const RealMatrix &feat);

/// Row t is frames t-k .. t+k concatenated, edges replicated.
RealMatrix splice_context(const RealMatrix &feat, std::size_t k);

struct NormStats {
  std::vector<double> mean;
  std::vector<double> inv_std;
  bool operator==(const NormStats &) const = default;
};

inline constexpr double kVarianceFloor = 1e-8;

NormStats normalize_fit(const RealMatrix &feat);
RealMatrix normalize_apply(const RealMatrix &feat, const NormStats &stats);

struct ArchiveEntry {
  std::string id;
  RealMatrix features;
  bool operator==(const ArchiveEntry &) const = default;
};
using FeatureArchive = std::vector<ArchiveEntry>;

inline constexpr std::uint32_t kArchiveVersion = 1;

std::string encode_archive(const FeatureArchive &archive);
FeatureArchive decode_archive(std::string_view bytes, std::string_view origin = "<bytes>");
void write_archive(const std::filesystem::path &path, const FeatureArchive &archive);
FeatureArchive read_archive(const std::filesystem::path &path);

}  // namespace dannphone

#endif  // DANNPHONE_FEATURES_HPP_
