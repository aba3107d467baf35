// tests/test_synth.cpp

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

#include "dannphone/dann.hpp"
#include "dannphone/divergence.hpp"
#include "dannphone/error.hpp"
#include "dannphone/phonetics.hpp"
#include "dannphone/synth.hpp"

using namespace dannphone;

namespace {

SynthSpec identity_spec(std::uint64_t seed) {
  SynthSpec s = standard_synth_spec(seed);
  s.transform = {};
  return s;
}

}  // namespace

TEST_CASE("proxy A-distance: identical domains vs a 5 sigma shift") {
  {
    auto [src, tgt] = gen_domains(identity_spec(1));
    CHECK(proxy_a_distance(src.features, tgt.features) <= 0.3);
  }
  SynthSpec s = identity_spec(1);
  s.transform.translation.assign(s.dim, 5.0 * s.sigma);
  auto [src, tgt] = gen_domains(s);
  CHECK(proxy_a_distance(src.features, tgt.features) >= 1.5);
}

TEST_CASE("generation is deterministic per seed") {
  const auto a = gen_domains(standard_synth_spec(4));
  const auto b = gen_domains(standard_synth_spec(4));
  CHECK(a.first.features == b.first.features);
  CHECK(a.second.features == b.second.features);
  CHECK(*a.first.phoneme_ids == *b.first.phoneme_ids);
  const auto c = gen_domains(standard_synth_spec(5));
  CHECK(!(a.first.features == c.first.features));
  CHECK(a.first.size() == 2000);
  CHECK(a.second.size() == 2000);
  for (Domain d : a.second.domain) CHECK(d == Domain::kTarget);
}

TEST_CASE("rotation matrices are orthogonal") {
  const RealMatrix r = rotation_matrix(5, {30.0});
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      double dot = 0;
      for (std::size_t k = 0; k < 5; ++k) dot += r(i, k) * r(j, k);
      CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0));
    }
}

TEST_CASE("bayes oracle is a posterior and beats chance in both domains") {
  const SynthSpec s = standard_synth_spec(2);
  const auto [src, tgt] = gen_domains(s);
  for (const auto &[ds, dom] : {std::pair{&src, Domain::kSource}, std::pair{&tgt, Domain::kTarget}}) {
    const RealMatrix p = bayes_oracle(s, ds->features, dom);
    REQUIRE(p.rows() == ds->size());
    REQUIRE(p.cols() == s.n_classes);
    for (std::size_t r = 0; r < p.rows(); ++r) {
      double sum = 0;
      for (std::size_t c = 0; c < p.cols(); ++c) {
        CHECK(p(r, c) >= 0.0);
        sum += p(r, c);
      }
      CHECK(sum == doctest::Approx(1.0));
    }
    const auto pred = argmax_rows(p);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == (*ds->phoneme_ids)[i];
    CHECK(double(hit) / pred.size() > 0.6);
  }
}

TEST_CASE("label marginals follow the mixture weights") {
  SynthSpec s = standard_synth_spec(9);
  s.class_weights = {0.4, 0.3, 0.15, 0.1, 0.05};
  s.frames_per_domain = 5000;
  const auto [src, tgt] = gen_domains(s);
  for (Domain dom : {Domain::kSource, Domain::kTarget}) {
    std::vector<double> p(s.n_classes, 0.0);
    for (const auto &c : domain_mixture(s, dom)) p[c.label] += c.weight;
    const auto &ids = *(dom == Domain::kSource ? src : tgt).phoneme_ids;
    std::vector<double> count(s.n_classes, 0.0);
    for (std::size_t y : ids) count[y] += 1;
    const double n = ids.size();
    for (std::size_t k = 0; k < s.n_classes; ++k) {
      CHECK(p[k] == doctest::Approx(s.class_weights[k]));
      CHECK(std::abs(count[k] - n * p[k]) <= 3.0 * std::sqrt(n * p[k] * (1 - p[k])));
    }
  }
}

TEST_CASE("synth-phonetics corpus uses the table") {
  const PhoneticFeatureTable table = load_spe_table(default_spe_table_path());
  SynthPhoneticsSpec spec = standard_phonetics_spec(3);
  spec.train_utterances = 5;
  spec.test_utterances = 3;
  const auto c = gen_synth_phonetics(spec, table);
  const auto c2 = gen_synth_phonetics(spec, table);
  CHECK(c.source_train.features == c2.source_train.features);
  CHECK(c.inventory.size() == spec.phones.size());
  for (const LabeledDataset *ds : {&c.source_train, &c.source_test, &c.target_train, &c.target_test}) {
    REQUIRE(ds->multilabel_targets);
    CHECK(ds->features.cols() == 23);
    for (std::size_t r = 0; r < ds->size(); ++r) {
      const FeatureBits &b = phoneme_to_features(c.inventory.symbol((*ds->phoneme_ids)[r]), table);
      for (std::size_t f = 0; f < kNumPhoneticFeatures; ++f)
        CHECK((*ds->multilabel_targets)(r, f) == b[f]);
    }
  }
  CHECK(c.source_train_ids.size() == 5);
  SynthPhoneticsSpec dup = spec;
  dup.phones = {"sil", "iy", "iy"};
  CHECK_THROWS_AS(gen_synth_phonetics(dup, table), Error);
}
