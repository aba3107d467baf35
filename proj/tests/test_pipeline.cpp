// tests/test_pipeline.cpp

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
#include <bit>
#include <tuple>

#include "dannphone/error.hpp"
#include "dannphone/pipeline.hpp"
#include "dannphone/synth.hpp"
#include "test_util.hpp"

using namespace dannphone;
using dannphone::testing::random_matrix;

namespace {

LabeledDataset frames_with(const std::vector<std::size_t> &ids) {
  LabeledDataset d;
  d.features = RealMatrix(ids.size(), 1);
  d.phoneme_ids = ids;
  d.domain.assign(ids.size(), Domain::kSource);
  return d;
}

PhoneInventory timit39() {
  return fold_inventory(PhoneInventory::from_table(load_spe_table(default_spe_table_path()))).folded;
}

struct SmallRcv {
  LabeledDataset src, tgt;
  DannSpec spec{10, {8}, Activation::kTanh, HeadKind::kSoftmaxSingleLabel, 5};
  AdvTrainConfig cfg;
  SmallRcv() {
    SynthSpec s = standard_synth_spec(6);
    s.frames_per_domain = 300;
    std::tie(src, tgt) = gen_domains(s);
    cfg.sgd.epochs = 3;
    cfg.sgd.lr0 = 0.05;
  }
};

}  // namespace

TEST_CASE("append_scores keeps acoustic columns and indexes scores after them") {
  Rng rng(1);
  const RealMatrix a = random_matrix(rng, 12, 69);
  const RealMatrix s = random_matrix(rng, 12, 14);
  const RealMatrix x = append_scores(a, s);
  REQUIRE(x.cols() == 83);
  for (std::size_t r = 0; r < 12; ++r) {
    for (std::size_t c = 0; c < 69; ++c) CHECK(std::bit_cast<std::uint64_t>(x(r, c)) == std::bit_cast<std::uint64_t>(a(r, c)));
    for (std::size_t c = 0; c < 14; ++c) CHECK(x(r, 69 + c) == s(r, c));
  }
  CHECK_THROWS_AS(append_scores(a, random_matrix(rng, 11, 14)), Error);
}

TEST_CASE("per_utterance applies blockwise") {
  Rng rng(2);
  const RealMatrix x = random_matrix(rng, 10, 3);
  const std::vector<FrameRange> r{{0, 4}, {4, 10}};
  std::vector<std::size_t> sizes;
  const RealMatrix y = per_utterance(x, r, [&](const RealMatrix &b) {
    sizes.push_back(b.rows());
    return b;
  });
  CHECK(y == x);
  CHECK(sizes == std::vector<std::size_t>{4, 6});
}

TEST_CASE("phoneme dnn training loss decreases") {
  SynthSpec s = standard_synth_spec(3);
  s.frames_per_domain = 200;
  const auto [src, tgt] = gen_domains(s);
  SgdConfig sgd;
  sgd.lr0 = 0.05;
  sgd.epochs = 5;
  sgd.batch_size = 20;
  sgd.seed = 4;
  const PhonemeModel m =
      train_phoneme_dnn(src.features, *src.phoneme_ids, 5, {{32}, Activation::kTanh}, sgd);
  REQUIRE(m.epoch_loss.size() == 5);
  for (std::size_t e = 1; e < 5; ++e) CHECK(m.epoch_loss[e] < m.epoch_loss[e - 1]);
  CHECK(predict_phonemes(m, src.features).size() == 200);
  CHECK_THROWS_AS(
      train_phoneme_dnn(src.features, std::vector<std::size_t>(200, 7), 5, {{4}, Activation::kTanh}, sgd),
      Error);
}

TEST_CASE("evaluate: perfect and random predictions") {
  const PhoneInventory inv = timit39();
  REQUIRE(inv.size() == 39);
  Rng rng(5);
  std::vector<std::size_t> ref(20000);
  for (auto &r : ref) r = rng.index(39);
  const LabeledDataset d = frames_with(ref);
  const EvalReport perfect = evaluate({ref, &d, &inv, nullptr});
  CHECK(perfect.frame_error_rate == 0.0);
  REQUIRE(perfect.approx_per);
  CHECK(*perfect.approx_per == 0.0);
  for (const auto &[k, v] : perfect.per_class_accuracy) CHECK(v == 1.0);
  std::vector<std::size_t> guess(ref.size());
  for (auto &g : guess) g = rng.index(39);
  const EvalReport random = evaluate({guess, &d, &inv, nullptr});
  CHECK(std::abs(random.frame_error_rate - (1.0 - 1.0 / 39)) <= 0.02);
  CHECK_THROWS_AS(evaluate({std::vector<std::size_t>(3), &d, &inv, nullptr}), Error);
}

TEST_CASE("macro F1 matches precision/recall by brute force") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.index(30), l = 1 + rng.index(6);
    RealMatrix s(n, l), y(n, l);
    for (double &v : s.data()) v = rng.uniform();
    for (double &v : y.data()) v = rng.uniform() < 0.3 ? 1.0 : 0.0;
    double sum = 0;
    for (std::size_t j = 0; j < l; ++j) {
      double tp = 0, pp = 0, ap = 0;
      for (std::size_t i = 0; i < n; ++i) {
        tp += (s(i, j) >= 0.5) * y(i, j);
        pp += s(i, j) >= 0.5;
        ap += y(i, j);
      }
      if (pp == 0 && ap == 0) {
        sum += 1;
      } else if (tp > 0) {
        const double p = tp / pp, r = tp / ap;
        sum += 2 * p * r / (p + r);
      }
    }
    CHECK(macro_f1(s, y) == doctest::Approx(sum / l).epsilon(1e-12));
  }
}

TEST_CASE("approx_per") {
  CHECK(approx_per({1, 1, 2, 2, 0, 3, 3}, {1, 2, 3}, 0) == 0.0);
  CHECK(approx_per({1, 1, 1}, {0, 1, 2, 0}, 0) == doctest::Approx(0.5));
  CHECK(approx_per({4}, {1, 2}, std::nullopt) == doctest::Approx(1.0));
  CHECK(edit_distance({1, 2, 3}, {1, 3}) == 1);
  CHECK(edit_distance({}, {5, 5}) == 2);
  try {
    approx_per({1}, {0, 0}, 0);
    FAIL("expected a metric error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kMetric);
  }
}

TEST_CASE("rcv: a singleton grid selects its point") {
  SmallRcv f;
  const RcvPoint only{0.7, 0.03, {6}};
  const RcvResult r = reverse_cross_validation({only}, f.src.phoneme_rows(), f.tgt.features, f.spec,
                                               f.cfg, 9);
  CHECK(r.best == 0);
  REQUIRE(r.table.size() == 1);
  CHECK(r.table[0].point == only);
  CHECK(r.table[0].forward.spec.hidden_dims == std::vector<std::size_t>{6});
  CHECK(with_point(f.cfg, only).lambda == 0.7);
  CHECK(with_point(f.cfg, only).sgd.lr0 == 0.03);
}

TEST_CASE("rcv is deterministic and ties go to the first point") {
  SmallRcv f;
  const std::vector<RcvPoint> grid{{0.0, 0.05, {}}, {1.0, 0.05, {}}, {0.0, 0.05, {}}};
  const RcvResult a = reverse_cross_validation(grid, f.src.phoneme_rows(), f.tgt.features, f.spec,
                                               f.cfg, 3);
  const RcvResult b = reverse_cross_validation(grid, f.src.phoneme_rows(), f.tgt.features, f.spec,
                                               f.cfg, 3);
  REQUIRE(a.table.size() == 3);
  CHECK(a.best == b.best);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.table[i].reverse_score == b.table[i].reverse_score);
    CHECK(a.table[i].forward == b.table[i].forward);
  }
  CHECK(a.table[0].reverse_score == a.table[2].reverse_score);
  CHECK(a.best != 2);
  for (const RcvRow &row : a.table) CHECK(row.reverse_score <= a.table[a.best].reverse_score);
}

TEST_CASE("experiment config validation") {
  ExperimentConfig c;
  c.validate();
  c.rcv_reverse_lambda = -1;
  CHECK_THROWS_AS(c.validate(), Error);
}
