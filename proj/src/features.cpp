// src/features.cpp

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

#include "dannphone/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "dannphone/binio.hpp"
#include "dannphone/error.hpp"

namespace dannphone {

namespace {

std::uint32_t le32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + i])) << (8 * i);
  return v;
}

std::uint16_t le16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    (static_cast<unsigned char>(b[at + 1]) << 8));
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// FFTW planning is not thread-safe; execution with a private plan is.
std::mutex fftw_planner_mutex;

}  // namespace

Utterance read_wav(const std::filesystem::path &path) {
  const std::string bytes = read_file_bytes(path);
  const std::string origin = path.string();
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0)
    fail(ErrorKind::kParse, origin, ": not a RIFF/WAVE file");
  std::size_t pos = 12;
  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  while (pos + 8 <= bytes.size()) {
    const std::string_view id(bytes.data() + pos, 4);
    const std::uint32_t size = le32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + size > bytes.size())
        fail(ErrorKind::kParse, origin, ": truncated fmt chunk");
      const std::uint16_t format = le16(bytes, body);
      channels = le16(bytes, body + 2);
      rate = le32(bytes, body + 4);
      bits = le16(bytes, body + 14);
      if (format != 1)
        fail(ErrorKind::kUnsupportedFormat, origin, ": audio format ", format,
             " (only PCM is read)");
      if (channels != 1)
        fail(ErrorKind::kUnsupportedFormat, origin, ": ", channels,
             " channels (only mono is read)");
      if (bits != 16)
        fail(ErrorKind::kUnsupportedFormat, origin, ": ", bits,
             "-bit samples (only 16-bit is read)");
      if (rate == 0) fail(ErrorKind::kParse, origin, ": sample rate 0");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) fail(ErrorKind::kParse, origin, ": data chunk before fmt chunk");
      if (body + size > bytes.size())
        fail(ErrorKind::kParse, origin, ": data chunk declares ", size, " bytes, file has ",
             bytes.size() - body);
      if (size % 2 != 0) fail(ErrorKind::kParse, origin, ": odd data chunk size");
      Utterance u;
      u.id = path.stem().string();
      u.sample_rate = rate;
      u.samples.resize(size / 2);
      for (std::size_t i = 0; i < u.samples.size(); ++i)
        u.samples[i] = static_cast<std::int16_t>(le16(bytes, body + 2 * i)) / 32768.0;
      if (u.samples.empty()) fail(ErrorKind::kParse, origin, ": no samples");
      return u;
    }
    pos = body + size + (size & 1);
  }
  fail(ErrorKind::kParse, origin, have_fmt ? ": missing data chunk" : ": missing fmt chunk");
}

void write_wav(const std::filesystem::path &path, const std::vector<double> &samples,
               int sample_rate) {
  std::string out = "RIFF";
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  out.push_back(1), out.push_back(0);  // PCM
  out.push_back(1), out.push_back(0);  // mono
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate) * 2);
  out.push_back(2), out.push_back(0);
  out.push_back(16), out.push_back(0);
  out += "data";
  put_u32(out, data_bytes);
  for (double s : samples) {
    const double scaled = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    const auto v = static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled));
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
  }
  write_file_bytes(path, out);
}

std::string_view window_kind_name(WindowKind w) {
  switch (w) {
    case WindowKind::kHamming: return "hamming";
    case WindowKind::kHann: return "hann";
    case WindowKind::kRectangular: return "rectangular";
  }
  return "?";
}

WindowKind parse_window_kind(std::string_view name) {
  for (WindowKind w : {WindowKind::kHamming, WindowKind::kHann, WindowKind::kRectangular})
    if (window_kind_name(w) == name) return w;
  fail(ErrorKind::kConfig, "unknown window '", name, "'");
}

void FbankConfig::validate() const {
  if (n_filters < 1) fail(ErrorKind::kConfig, "fbank needs at least one filter");
  if (!(hop_ms > 0.0) || !(win_ms > hop_ms))
    fail(ErrorKind::kConfig, "fbank needs win_ms > hop_ms > 0, got ", win_ms, "/", hop_ms);
  if (preemphasis < 0.0 || preemphasis >= 1.0)
    fail(ErrorKind::kConfig, "preemphasis must lie in [0, 1)");
  if (mel_low < 0.0 || (mel_high != 0.0 && mel_high <= mel_low))
    fail(ErrorKind::kConfig, "mel range [", mel_low, ", ", mel_high, "] is empty");
  if (!std::isfinite(log_floor)) fail(ErrorKind::kConfig, "log_floor must be finite");
}

std::size_t FbankConfig::win_samples(double sr) const {
  return static_cast<std::size_t>(std::lround(win_ms * sr / 1000.0));
}
std::size_t FbankConfig::hop_samples(double sr) const {
  return static_cast<std::size_t>(std::lround(hop_ms * sr / 1000.0));
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::size_t frame_count(std::size_t n, std::size_t win, std::size_t hop) {
  if (win == 0 || hop == 0 || n < win) return 0;
  return (n - win) / hop + 1;
}

namespace {

struct MelBank {
  std::vector<double> edges_mel;  // n_filters + 2 points
  double high_hz = 0.0;
};

MelBank mel_bank(const FbankConfig &cfg, double sr) {
  const double nyquist = sr / 2.0;
  const double high = cfg.mel_high == 0.0 ? nyquist : cfg.mel_high;
  if (high > nyquist || cfg.mel_low >= high)
    fail(ErrorKind::kConfig, "mel range [", cfg.mel_low, ", ", high,
         "] does not fit below Nyquist ", nyquist);
  MelBank b;
  b.high_hz = high;
  const double lo = hz_to_mel(cfg.mel_low), hi = hz_to_mel(high);
  const std::size_t points = cfg.n_filters + 2;
  for (std::size_t i = 0; i < points; ++i)
    b.edges_mel.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                   static_cast<double>(points - 1));
  return b;
}

}  // namespace

std::vector<double> mel_center_frequencies(const FbankConfig &cfg, double sr) {
  const MelBank b = mel_bank(cfg, sr);
  std::vector<double> c;
  for (std::size_t m = 0; m < cfg.n_filters; ++m) c.push_back(mel_to_hz(b.edges_mel[m + 1]));
  return c;
}

std::vector<double> frame_center_times(std::size_t n_frames, const FbankConfig &cfg,
                                       double sr) {
  const auto win = static_cast<double>(cfg.win_samples(sr));
  const auto hop = static_cast<double>(cfg.hop_samples(sr));
  std::vector<double> t(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i)
    t[i] = (static_cast<double>(i) * hop + win / 2.0) / sr;
  return t;
}

RealMatrix fbank(const Utterance &u, const FbankConfig &cfg) {
  cfg.validate();
  if (!(u.sample_rate > 0.0)) fail(ErrorKind::kData, "utterance '", u.id, "' has no sample rate");
  const std::size_t win = cfg.win_samples(u.sample_rate);
  const std::size_t hop = cfg.hop_samples(u.sample_rate);
  if (hop == 0 || win <= hop)
    fail(ErrorKind::kConfig, "window of ", win, " and hop of ", hop, " samples");
  const std::size_t T = frame_count(u.samples.size(), win, hop);
  if (T == 0)
    fail(ErrorKind::kTooShort, "utterance '", u.id, "' has ", u.samples.size(),
         " samples, one window needs ", win);

  const std::size_t nfft = next_pow2(win);
  const std::size_t nbins = nfft / 2 + 1;
  std::vector<double> window(win, 1.0);
  for (std::size_t i = 0; i < win && win > 1; ++i) {
    const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(win - 1);
    if (cfg.window == WindowKind::kHamming) window[i] = 0.54 - 0.46 * std::cos(a);
    if (cfg.window == WindowKind::kHann) window[i] = 0.5 - 0.5 * std::cos(a);
  }

  // Filter weights over FFT bins, triangular in mel.
  const MelBank bank = mel_bank(cfg, u.sample_rate);
  RealMatrix weights(cfg.n_filters, nbins);
  for (std::size_t k = 0; k < nbins; ++k) {
    const double mel = hz_to_mel(static_cast<double>(k) * u.sample_rate /
                                 static_cast<double>(nfft));
    for (std::size_t m = 0; m < cfg.n_filters; ++m) {
      const double l = bank.edges_mel[m], c = bank.edges_mel[m + 1], r = bank.edges_mel[m + 2];
      if (mel > l && mel < r)
        weights(m, k) = mel <= c ? (mel - l) / (c - l) : (r - mel) / (r - c);
    }
  }

  double *in = fftw_alloc_real(nfft);
  fftw_complex *spec = fftw_alloc_complex(nbins);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in, spec, FFTW_ESTIMATE);
  }
  RealMatrix out(T, cfg.n_filters);
  std::vector<double> power(nbins);
  const double energy_floor = std::exp(cfg.log_floor);
  for (std::size_t t = 0; t < T; ++t) {
    const double *frame = u.samples.data() + t * hop;
    for (std::size_t i = 0; i < win; ++i) {
      const double prev = i > 0 ? frame[i - 1] : frame[0];
      in[i] = (frame[i] - cfg.preemphasis * prev) * window[i];
    }
    std::fill(in + win, in + nfft, 0.0);
    fftw_execute(plan);
    for (std::size_t k = 0; k < nbins; ++k) power[k] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    for (std::size_t m = 0; m < cfg.n_filters; ++m) {
      double e = 0.0;
      const auto w = weights.row(m);
      for (std::size_t k = 0; k < nbins; ++k) e += w[k] * power[k];
      out(t, m) = e > energy_floor ? std::log(e) : cfg.log_floor;
    }
  }
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(spec);
  return out;
}

RealMatrix add_deltas(const RealMatrix &feat) {
  const std::size_t T = feat.rows(), D = feat.cols();
  auto regress = [T, D](const RealMatrix &f) {
    RealMatrix d(T, D);
    const double denom = 2.0 * (1.0 + 4.0);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t n = 1; n <= 2; ++n) {
        const std::size_t ahead = std::min(t + n, T - 1);
        const std::size_t behind = t >= n ? t - n : 0;
        for (std::size_t j = 0; j < D; ++j)
          d(t, j) += static_cast<double>(n) * (f(ahead, j) - f(behind, j));
      }
      for (std::size_t j = 0; j < D; ++j) d(t, j) /= denom;
    }
    return d;
  };
  if (T == 0) return RealMatrix(0, 3 * D);
  const RealMatrix d1 = regress(feat);
  const RealMatrix d2 = regress(d1);
  return hconcat(hconcat(feat, d1), d2);
}

RealMatrix splice_context(const RealMatrix &feat, std::size_t k) {
  const std::size_t T = feat.rows(), D = feat.cols(), W = 2 * k + 1;
  RealMatrix out(T, D * W);
  for (std::size_t t = 0; t < T; ++t) {
    auto dst = out.row(t);
    for (std::size_t w = 0; w < W; ++w) {
      const long src = std::clamp(static_cast<long>(t) + static_cast<long>(w) - static_cast<long>(k),
                                  0L, static_cast<long>(T) - 1);
      const auto row = feat.row(static_cast<std::size_t>(src));
      std::copy(row.begin(), row.end(), dst.begin() + static_cast<long>(w * D));
    }
  }
  return out;
}

NormStats normalize_fit(const RealMatrix &feat) {
  if (feat.rows() == 0) fail(ErrorKind::kData, "cannot fit normalization on zero frames");
  const std::size_t D = feat.cols();
  const auto n = static_cast<double>(feat.rows());
  NormStats s{std::vector<double>(D, 0.0), std::vector<double>(D, 0.0)};
  for (std::size_t r = 0; r < feat.rows(); ++r)
    for (std::size_t j = 0; j < D; ++j) s.mean[j] += feat(r, j);
  for (double &m : s.mean) m /= n;
  std::vector<double> var(D, 0.0);
  for (std::size_t r = 0; r < feat.rows(); ++r)
    for (std::size_t j = 0; j < D; ++j) {
      const double c = feat(r, j) - s.mean[j];
      var[j] += c * c;
    }
  for (std::size_t j = 0; j < D; ++j)
    s.inv_std[j] = 1.0 / std::sqrt(std::max(var[j] / n, kVarianceFloor));
  return s;
}

RealMatrix normalize_apply(const RealMatrix &feat, const NormStats &stats) {
  if (feat.cols() != stats.mean.size() || stats.inv_std.size() != stats.mean.size())
    fail(ErrorKind::kDimension, "normalization stats have ", stats.mean.size(),
         " dims, features have ", feat.cols());
  RealMatrix out = feat;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t j = 0; j < row.size(); ++j)
      row[j] = (row[j] - stats.mean[j]) * stats.inv_std[j];
  }
  return out;
}

std::string encode_archive(const FeatureArchive &archive) {
  std::string out = "FARC";
  put_u32(out, kArchiveVersion);
  put_u64(out, archive.size());
  for (const auto &e : archive) {
    put_u32(out, static_cast<std::uint32_t>(e.id.size()));
    out += e.id;
    put_u64(out, e.features.rows());
    put_u64(out, e.features.cols());
    put_f64s(out, e.features.data());
  }
  return out;
}

FeatureArchive decode_archive(std::string_view bytes, std::string_view origin) {
  ByteReader r(bytes, origin);
  if (r.remaining() < 4 || r.bytes(4) != "FARC")
    fail(ErrorKind::kFormat, origin, ": not a feature archive");
  const std::uint32_t version = r.u32();
  if (version != kArchiveVersion)
    fail(ErrorKind::kFormat, origin, ": archive version ", version, ", expected ",
         kArchiveVersion);
  const std::uint64_t count = r.u64();
  FeatureArchive out;
  for (std::uint64_t i = 0; i < count; ++i) {
    ArchiveEntry e;
    e.id = std::string(r.bytes(r.u32()));
    const std::uint64_t T = r.u64(), D = r.u64();
    if (D != 0 && T > r.remaining() / 8 / D)
      fail(ErrorKind::kParse, origin, ": utterance '", e.id, "' declares ", T, "x", D,
           " values past the end of the file");
    e.features = RealMatrix(T, D);
    r.f64s(e.features.data());
    out.push_back(std::move(e));
  }
  if (!r.done()) fail(ErrorKind::kFormat, origin, ": trailing bytes after the last utterance");
  return out;
}

void write_archive(const std::filesystem::path &path, const FeatureArchive &archive) {
  write_file_bytes(path, encode_archive(archive));
}

FeatureArchive read_archive(const std::filesystem::path &path) {
  return decode_archive(read_file_bytes(path), path.string());
}

}  // namespace dannphone
