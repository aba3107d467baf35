// src/synth.cpp

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

#include "dannphone/synth.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

#include "dannphone/binio.hpp"
#include "dannphone/corpus.hpp"
#include "dannphone/error.hpp"
#include "dannphone/features.hpp"
#include "dannphone/rng.hpp"

namespace dannphone {

namespace {

using EMat = Eigen::MatrixXd;
using EVec = Eigen::VectorXd;

EMat to_eigen(const RealMatrix &m) {
  EMat e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

RealMatrix from_eigen(const EMat &e) {
  RealMatrix m(e.rows(), e.cols());
  for (Eigen::Index r = 0; r < e.rows(); ++r)
    for (Eigen::Index c = 0; c < e.cols(); ++c) m(r, c) = e(r, c);
  return m;
}

void check_transform(const DomainTransform &t, std::size_t dim) {
  if (!t.translation.empty() && t.translation.size() != dim)
    fail(ErrorKind::kConfig, "translation has ", t.translation.size(), " entries, dim is ", dim);
  const std::size_t planes = dim / 2;
  if (t.rotation_deg.size() > 1 && t.rotation_deg.size() != planes)
    fail(ErrorKind::kConfig, "rotation gives ", t.rotation_deg.size(), " angles for ", planes,
         " planes");
  if (t.noise_scale < 0.0) fail(ErrorKind::kConfig, "noise scale must be >= 0");
}

/// Random SPD matrix sigma^2 ((1 - a) I + a B B^T / d).
RealMatrix random_cov(Rng &rng, std::size_t d, double sigma, double a) {
  EMat b(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) b(i, j) = rng.normal();
  EMat cov = (1.0 - a) * EMat::Identity(d, d) + a * (b * b.transpose()) / static_cast<double>(d);
  return from_eigen(sigma * sigma * cov);
}

std::vector<double> sample_gaussian(Rng &rng, const std::vector<double> &mean,
                                    const EMat &chol_l) {
  const std::size_t d = mean.size();
  EVec z(d);
  for (std::size_t i = 0; i < d; ++i) z(i) = rng.normal();
  const EVec x = chol_l * z;
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = mean[i] + x(i);
  return out;
}

std::size_t pick(Rng &rng, const std::vector<double> &cumulative) {
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

}  // namespace

void SynthSpec::validate() const {
  if (n_classes < 2) fail(ErrorKind::kConfig, "synthetic spec needs K >= 2");
  if (dim < 1) fail(ErrorKind::kConfig, "synthetic spec needs dim >= 1");
  if (components_per_class < 1) fail(ErrorKind::kConfig, "components_per_class must be >= 1");
  if (!class_weights.empty()) {
    if (class_weights.size() != n_classes)
      fail(ErrorKind::kConfig, class_weights.size(), " class weights for ", n_classes, " classes");
    for (double w : class_weights)
      if (!(w > 0.0)) fail(ErrorKind::kConfig, "class weights must be positive");
  }
  if (!(sigma > 0.0)) fail(ErrorKind::kConfig, "sigma must be positive");
  if (anisotropy < 0.0 || anisotropy >= 1.0)
    fail(ErrorKind::kConfig, "anisotropy must lie in [0, 1)");
  if (frames_per_domain == 0) fail(ErrorKind::kConfig, "frames_per_domain must be positive");
  if (label_mode == LabelMode::kMultiLabel && phones.size() != n_classes)
    fail(ErrorKind::kConfig, "multi-label mode needs one phone per class");
  check_transform(transform, dim);
}

RealMatrix rotation_matrix(std::size_t dim, const std::vector<double> &angles_deg) {
  RealMatrix r(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) r(i, i) = 1.0;
  if (angles_deg.empty()) return r;
  for (std::size_t p = 0; p < dim / 2; ++p) {
    const double a = (angles_deg.size() == 1 ? angles_deg[0] : angles_deg.at(p)) * M_PI / 180.0;
    const std::size_t i = 2 * p, j = 2 * p + 1;
    r(i, i) = std::cos(a);
    r(i, j) = -std::sin(a);
    r(j, i) = std::sin(a);
    r(j, j) = std::cos(a);
  }
  return r;
}

RealMatrix apply_transform(const RealMatrix &x, const DomainTransform &t, Rng *rng) {
  check_transform(t, x.cols());
  RealMatrix out = matmul_transposed(x, rotation_matrix(x.cols(), t.rotation_deg));
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) {
      if (!t.translation.empty()) out(r, c) += t.translation[c];
      if (t.noise_scale > 0.0 && rng) out(r, c) += t.noise_scale * rng->normal();
    }
  return out;
}

std::vector<MixtureComponent> domain_mixture(const SynthSpec &spec, Domain domain) {
  spec.validate();
  Rng rng(derive_seed(spec.geometry_seed, "mixture"));
  const std::size_t d = spec.dim;
  double total = 0.0;
  for (std::size_t k = 0; k < spec.n_classes; ++k)
    total += spec.class_weights.empty() ? 1.0 : spec.class_weights[k];
  std::vector<MixtureComponent> comps;
  for (std::size_t k = 0; k < spec.n_classes; ++k) {
    std::vector<double> center(d);
    for (double &c : center) c = spec.class_spread * rng.normal();
    const double wk = (spec.class_weights.empty() ? 1.0 : spec.class_weights[k]) / total;
    for (std::size_t m = 0; m < spec.components_per_class; ++m) {
      MixtureComponent c;
      c.label = k;
      c.weight = wk / static_cast<double>(spec.components_per_class);
      c.mean = center;
      for (double &v : c.mean) v += spec.component_spread * rng.normal();
      c.cov = random_cov(rng, d, spec.sigma, spec.anisotropy);
      comps.push_back(std::move(c));
    }
  }
  if (domain == Domain::kTarget) {
    const EMat r = to_eigen(rotation_matrix(d, spec.transform.rotation_deg));
    const double n2 = spec.transform.noise_scale * spec.transform.noise_scale;
    for (auto &c : comps) {
      EVec mu = Eigen::Map<const EVec>(c.mean.data(), static_cast<Eigen::Index>(d));
      EVec moved = r * mu;
      for (std::size_t i = 0; i < d; ++i)
        c.mean[i] = moved(i) + (spec.transform.translation.empty() ? 0.0
                                                                   : spec.transform.translation[i]);
      c.cov = from_eigen(r * to_eigen(c.cov) * r.transpose() + n2 * EMat::Identity(d, d));
    }
  }
  return comps;
}

std::pair<LabeledDataset, LabeledDataset> gen_domains(const SynthSpec &spec,
                                                      const PhoneticFeatureTable *table) {
  spec.validate();
  if (spec.label_mode == LabelMode::kMultiLabel) {
    if (!table) fail(ErrorKind::kConfig, "multi-label synthetic data needs a feature table");
    for (const auto &p : spec.phones) phoneme_to_features(p, *table);
  }
  const auto comps = domain_mixture(spec, Domain::kSource);
  std::vector<double> cumulative;
  std::vector<EMat> chol;
  double acc = 0.0;
  for (const auto &c : comps) {
    acc += c.weight;
    cumulative.push_back(acc);
    chol.push_back(Eigen::LLT<EMat>(to_eigen(c.cov)).matrixL());
  }
  auto draw = [&](std::string_view stream, Domain dom) {
    Rng rng(derive_seed(spec.seed, stream));
    LabeledDataset ds;
    ds.features = RealMatrix(spec.frames_per_domain, spec.dim);
    std::vector<std::size_t> ids(spec.frames_per_domain);
    for (std::size_t i = 0; i < spec.frames_per_domain; ++i) {
      const std::size_t c = pick(rng, cumulative);
      const auto x = sample_gaussian(rng, comps[c].mean, chol[c]);
      std::copy(x.begin(), x.end(), ds.features.row(i).begin());
      ids[i] = comps[c].label;
    }
    if (dom == Domain::kTarget) ds.features = apply_transform(ds.features, spec.transform, &rng);
    if (spec.label_mode == LabelMode::kMultiLabel) {
      RealMatrix bits(ids.size(), kNumPhoneticFeatures);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto &fb = phoneme_to_features(spec.phones[ids[i]], *table);
        for (std::size_t f = 0; f < kNumPhoneticFeatures; ++f) bits(i, f) = fb[f];
      }
      ds.multilabel_targets = std::move(bits);
    }
    ds.phoneme_ids = std::move(ids);
    ds.domain.assign(spec.frames_per_domain, dom);
    return ds;
  };
  return {draw("source", Domain::kSource), draw("target", Domain::kTarget)};
}

RealMatrix bayes_oracle(const SynthSpec &spec, const RealMatrix &x, Domain domain) {
  if (x.cols() != spec.dim)
    fail(ErrorKind::kDimension, "oracle expects ", spec.dim, " columns, got ", x.cols());
  const auto comps = domain_mixture(spec, domain);
  struct Prepared {
    Eigen::LLT<EMat> llt;
    EVec mean;
    double log_norm;
  };
  std::vector<Prepared> prep;
  for (const auto &c : comps) {
    Prepared p{Eigen::LLT<EMat>(to_eigen(c.cov)),
               Eigen::Map<const EVec>(c.mean.data(), static_cast<Eigen::Index>(spec.dim)), 0.0};
    const EMat l = p.llt.matrixL();
    p.log_norm = std::log(c.weight) - l.diagonal().array().log().sum();
    prep.push_back(std::move(p));
  }
  RealMatrix post(x.rows(), spec.n_classes);
  std::vector<double> logp(comps.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const EVec xr = Eigen::Map<const EVec>(x.row(r).data(), static_cast<Eigen::Index>(spec.dim));
    double best = -INFINITY;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const EVec diff = xr - prep[c].mean;
      const EVec w = prep[c].llt.matrixL().solve(diff);
      logp[c] = prep[c].log_norm - 0.5 * w.squaredNorm();
      best = std::max(best, logp[c]);
    }
    double z = 0.0;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const double e = std::exp(logp[c] - best);
      post(r, comps[c].label) += e;
      z += e;
    }
    for (std::size_t k = 0; k < spec.n_classes; ++k) post(r, k) /= z;
  }
  return post;
}

SynthSpec standard_synth_spec(std::uint64_t seed) {
  SynthSpec s;
  s.n_classes = 5;
  s.dim = 10;
  s.components_per_class = 2;
  s.class_spread = 2.0;
  s.component_spread = 0.5;
  s.sigma = 1.0;
  s.anisotropy = 0.3;
  s.transform.rotation_deg = {30.0};
  s.transform.translation.assign(s.dim, 2.0 * s.sigma);
  s.frames_per_domain = 2000;
  s.geometry_seed = 20240607;
  s.seed = seed;
  return s;
}

void SynthPhoneticsSpec::validate(const PhoneticFeatureTable &table) const {
  if (phones.size() < 2) fail(ErrorKind::kConfig, "synthetic inventory needs >= 2 phones");
  std::set<FeatureBits> seen;
  bool has_sil = false;
  for (const auto &p : phones) {
    if (!seen.insert(phoneme_to_features(p, table)).second)
      fail(ErrorKind::kConfig, "synthetic phone '", p, "' repeats another phone's features");
    has_sil = has_sil || p == kSilencePhone;
  }
  if (!has_sil) fail(ErrorKind::kConfig, "synthetic inventory must contain '", kSilencePhone, "'");
  if (dim < 1 || train_utterances == 0 || test_utterances == 0)
    fail(ErrorKind::kConfig, "synthetic corpus needs dim and utterance counts >= 1");
  if (segments_min < 1 || segments_max < segments_min || frames_min < 1 ||
      frames_max < frames_min)
    fail(ErrorKind::kConfig, "segment and frame ranges must be non-empty");
  if (smoothing < 0.0 || smoothing >= 1.0)
    fail(ErrorKind::kConfig, "smoothing must lie in [0, 1)");
  if (silence_prob < 0.0 || silence_prob > 1.0)
    fail(ErrorKind::kConfig, "silence_prob must lie in [0, 1]");
  check_transform(transform, dim);
}

SynthPhoneticsCorpus gen_synth_phonetics(const SynthPhoneticsSpec &spec,
                                         const PhoneticFeatureTable &table) {
  spec.validate(table);
  SynthPhoneticsCorpus corpus;
  corpus.inventory = PhoneInventory(spec.phones);
  const std::size_t d = spec.dim;

  Rng geo(derive_seed(spec.geometry_seed, "emitters"));
  RealMatrix loadings(kNumPhoneticFeatures, d);
  for (double &v : loadings.data()) v = spec.feature_scale * geo.normal();
  RealMatrix means(spec.phones.size(), d);
  for (std::size_t p = 0; p < spec.phones.size(); ++p) {
    const auto &bits = phoneme_to_features(spec.phones[p], table);
    for (std::size_t j = 0; j < d; ++j) {
      double m = spec.phone_scale * geo.normal();
      for (std::size_t f = 0; f < kNumPhoneticFeatures; ++f) m += bits[f] * loadings(f, j);
      means(p, j) = m;
    }
  }
  const std::size_t sil = corpus.inventory.id(kSilencePhone);
  std::vector<std::size_t> speech;
  for (std::size_t p = 0; p < spec.phones.size(); ++p)
    if (p != sil) speech.push_back(p);

  auto render = [&](std::string_view stream, std::size_t n_utts, Domain dom,
                    std::vector<std::string> &ids) {
    Rng rng(derive_seed(spec.seed, stream));
    std::vector<std::size_t> frame_phones;
    std::vector<FrameRange> ranges;
    for (std::size_t u = 0; u < n_utts; ++u) {
      const std::size_t begin = frame_phones.size();
      auto segment = [&](std::size_t phone) {
        const std::size_t len = spec.frames_min + rng.index(spec.frames_max - spec.frames_min + 1);
        frame_phones.insert(frame_phones.end(), len, phone);
      };
      segment(sil);
      const std::size_t n_seg =
          spec.segments_min + rng.index(spec.segments_max - spec.segments_min + 1);
      for (std::size_t s = 0; s < n_seg; ++s) {
        segment(speech[rng.index(speech.size())]);
        if (s + 1 < n_seg && rng.uniform() < spec.silence_prob) segment(sil);
      }
      segment(sil);
      ranges.push_back({begin, frame_phones.size()});
      ids.push_back(std::string(stream) + "_" + std::to_string(u));
    }
    LabeledDataset ds;
    ds.features = RealMatrix(frame_phones.size(), d);
    const double innovation = std::sqrt(1.0 - spec.smoothing * spec.smoothing) * spec.sigma;
    std::vector<double> noise(d);
    for (const FrameRange &r : ranges) {
      for (double &e : noise) e = spec.sigma * rng.normal();
      for (std::size_t t = r.begin; t < r.end; ++t) {
        if (t > r.begin)
          for (double &e : noise) e = spec.smoothing * e + innovation * rng.normal();
        for (std::size_t j = 0; j < d; ++j)
          ds.features(t, j) = means(frame_phones[t], j) + noise[j];
      }
    }
    if (dom == Domain::kTarget) ds.features = apply_transform(ds.features, spec.transform, &rng);
    RealMatrix bits(frame_phones.size(), kNumPhoneticFeatures);
    for (std::size_t t = 0; t < frame_phones.size(); ++t) {
      const auto &fb = phoneme_to_features(spec.phones[frame_phones[t]], table);
      for (std::size_t f = 0; f < kNumPhoneticFeatures; ++f) bits(t, f) = fb[f];
    }
    ds.multilabel_targets = std::move(bits);
    ds.phoneme_ids = std::move(frame_phones);
    ds.domain.assign(ds.size(), dom);
    ds.utterances = std::move(ranges);
    return ds;
  };
  corpus.source_train = render("source-train", spec.train_utterances, Domain::kSource,
                               corpus.source_train_ids);
  corpus.source_test = render("source-test", spec.test_utterances, Domain::kSource,
                              corpus.source_test_ids);
  corpus.target_train = render("target-train", spec.train_utterances, Domain::kTarget,
                               corpus.target_train_ids);
  corpus.target_test = render("target-test", spec.test_utterances, Domain::kTarget,
                              corpus.target_test_ids);
  return corpus;
}

SynthPhoneticsSpec standard_phonetics_spec(std::uint64_t seed) {
  SynthPhoneticsSpec s;
  s.phones = {"sil", "iy", "ih", "eh", "ae", "aa", "ao", "ah", "uw", "uh", "ow", "l",
              "r",   "w",  "y",  "hh", "m",  "n",  "ng", "p",  "b",  "t",  "d",  "k",
              "g",   "f",  "v",  "th", "dh", "s",  "z",  "sh", "ch", "jh"};
  s.dim = 23;
  s.transform.rotation_deg = {30.0};
  s.transform.translation.assign(s.dim, 1.0);
  s.geometry_seed = 20240611;
  s.seed = seed;
  return s;
}

void write_synth_corpus(const SynthPhoneticsCorpus &corpus, const std::filesystem::path &dir) {
  auto write_split = [&](const std::string &name, const LabeledDataset &ds,
                         const std::vector<std::string> &ids) {
    FeatureArchive archive;
    std::vector<UtteranceLabels> labels;
    for (std::size_t u = 0; u < ds.utterances.size(); ++u) {
      const FrameRange r = ds.utterances[u];
      std::vector<std::size_t> rows(r.end - r.begin);
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = r.begin + i;
      archive.push_back({ids.at(u), gather_rows(ds.features, rows)});
      UtteranceLabels l{ids[u], {}};
      for (std::size_t t = r.begin; t < r.end; ++t)
        l.phones.push_back(corpus.inventory.symbol(ds.phoneme_ids->at(t)));
      labels.push_back(std::move(l));
    }
    write_archive(dir / (name + ".farc"), archive);
    write_file_bytes(dir / (name + ".ali"), encode_frame_labels(labels));
  };
  write_phone_list(dir / "phones.txt", corpus.inventory);
  write_split("source_train", corpus.source_train, corpus.source_train_ids);
  write_split("source_test", corpus.source_test, corpus.source_test_ids);
  write_split("target_train", corpus.target_train, corpus.target_train_ids);
  write_split("target_test", corpus.target_test, corpus.target_test_ids);
}

}  // namespace dannphone
