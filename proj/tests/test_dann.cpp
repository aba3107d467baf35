// tests/test_dann.cpp

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
#include <cstring>

#include "dannphone/dann.hpp"
#include "dannphone/error.hpp"
#include "test_util.hpp"

using namespace dannphone;
using dannphone::testing::kGradTol;
using dannphone::testing::numeric_gradient;
using dannphone::testing::random_matrix;
using dannphone::testing::relative_error;

namespace {

DannParams random_params(Rng &rng, const DannSpec &spec, std::uint64_t seed) {
  DannParams p = init_dann(spec, seed);
  for (auto &layer : p.feature_extractor.layers)
    for (double &v : layer.bias) v = 0.3 * rng.normal();
  for (double &v : p.label_head.bias) v = 0.3 * rng.normal();
  p.domain_bias = 0.2 * rng.normal();
  for (double &v : p.domain_weight) v = rng.normal();
  return p;
}

DomainBatch random_batch(Rng &rng, const DannSpec &spec, std::size_t n) {
  DomainBatch b;
  b.source_x = random_matrix(rng, n, spec.input_dim);
  b.target_x = random_matrix(rng, n, spec.input_dim, 1.3);
  if (spec.head_kind == HeadKind::kSoftmaxSingleLabel) {
    std::vector<std::size_t> ids(n);
    for (auto &c : ids) c = rng.index(spec.output_dim);
    b.source_y = Labels::single(ids);
  } else {
    RealMatrix bits(n, spec.output_dim);
    for (double &v : bits.data()) v = rng.uniform() < 0.4 ? 1.0 : 0.0;
    b.source_y = Labels::multi(bits);
  }
  return b;
}

bool same_bytes(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

LabeledRows two_blobs(Rng &rng, std::size_t n, double shift) {
  LabeledRows rows{RealMatrix(n, 2), Labels::single(std::vector<std::size_t>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % 2;
    rows.y.classes[i] = c;
    rows.x(i, 0) = (c ? 1.5 : -1.5) + rng.normal() + shift;
    rows.x(i, 1) = rng.normal() + shift;
  }
  return rows;
}

}  // namespace

TEST_CASE("gradient reversal layer") {
  const RealMatrix x{{1.5, -2.0}, {0.0, 3.0}};
  CHECK(grad_reverse_forward(x) == x);
  CHECK(&grad_reverse_forward(x) == &x);
  const RealMatrix g = grad_reverse(RealMatrix{{2.0, -4.0}}, 0.5);
  CHECK(g(0, 0) == -1.0);
  CHECK(g(0, 1) == 2.0);
  const RealMatrix zero = grad_reverse(x, 0.0);
  for (double v : zero.data()) CHECK(v == 0.0);
}

TEST_CASE("domain unit forward") {
  const RealMatrix h{{1.0, 0.0}, {0.3, -0.7}};
  for (double o : domain_head_forward(h, std::vector<double>{0, 0}, 0.0)) CHECK(o == 0.5);
  CHECK(domain_head_forward(RealMatrix{{1.0, 0.0}}, std::vector<double>{1, 1}, -1.0)[0] ==
        0.5);
  CHECK_THROWS_AS(domain_head_forward(h, std::vector<double>{1}, 0.0), Error);

  Rng rng(2);
  const RealMatrix hr = random_matrix(rng, 5, 4);
  const DenseLayer unit{random_matrix(rng, 1, 4), {0.4}};
  const auto o = domain_head_forward(hr, unit.weight.row(0), unit.bias[0]);
  const RealMatrix ref = dense_forward(hr, unit, Activation::kSigmoid);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(o[i] - ref(i, 0)) <= 1e-12);
}

TEST_CASE("dann_objective gradients match finite differences") {
  Rng rng(31);
  int instances = 0;
  for (HeadKind kind : {HeadKind::kSoftmaxSingleLabel, HeadKind::kSigmoidMultiLabel}) {
    for (int trial = 0; trial < 10; ++trial) {
      DannSpec spec;
      spec.input_dim = 1 + rng.index(5);
      spec.hidden_dims = trial % 3 == 0 ? std::vector<std::size_t>{3, 2}
                                        : std::vector<std::size_t>{3};
      spec.activation = trial % 2 ? Activation::kTanh : Activation::kSigmoid;
      spec.head_kind = kind;
      spec.output_dim = 2 + rng.index(4);
      DannParams p = random_params(rng, spec, 7 + trial);
      DomainBatch batch = random_batch(rng, spec, 2);  // 4 rows in total
      const double lambda = 0.1 + rng.uniform();
      const MultiLabelLoss loss = MultiLabelLoss::kBce;
      auto energy = [&] { return dann_objective(batch, p, lambda, loss).value; };
      auto neg_energy = [&] { return -energy(); };
      const DannObjective obj = dann_objective(batch, p, lambda, loss);
      for (std::size_t l = 0; l < p.feature_extractor.layers.size(); ++l) {
        auto &layer = p.feature_extractor.layers[l];
        CHECK(relative_error(obj.grads.feature_extractor.layers[l].weight.data(),
                             numeric_gradient(energy, layer.weight.data())) <= kGradTol);
        CHECK(relative_error(obj.grads.feature_extractor.layers[l].bias,
                             numeric_gradient(energy, layer.bias)) <= kGradTol);
      }
      CHECK(relative_error(obj.grads.label_head.weight.data(),
                           numeric_gradient(energy, p.label_head.weight.data())) <=
            kGradTol);
      CHECK(relative_error(obj.grads.label_head.bias,
                           numeric_gradient(energy, p.label_head.bias)) <= kGradTol);
      // Ascent parameters are reported as gradients of -E.
      CHECK(relative_error(obj.grads.domain_weight,
                           numeric_gradient(neg_energy, p.domain_weight)) <= kGradTol);
      CHECK(relative_error(std::vector<double>{obj.grads.domain_bias},
                           numeric_gradient(neg_energy, std::span<double>(&p.domain_bias, 1))) <=
            kGradTol);
      ++instances;
    }
  }
  CHECK(instances == 20);
}

TEST_CASE("all-0.5 outputs give E = ln 2 - 2 lambda ln 2") {
  DannSpec spec{3, {4}, Activation::kSigmoid, HeadKind::kSoftmaxSingleLabel, 2};
  DannParams p = init_dann(spec, 1);
  p.label_head.weight.set_zero();
  std::fill(p.domain_weight.begin(), p.domain_weight.end(), 0.0);
  Rng rng(3);
  DomainBatch batch = random_batch(rng, spec, 1);
  for (double lambda : {0.0, 0.25, 1.0}) {
    const double e = dann_objective(batch, p, lambda).value;
    CHECK(std::abs(e - (std::log(2.0) - 2.0 * lambda * std::log(2.0))) <= 1e-12);
  }
}

TEST_CASE("lambda = 0 objective is the plain source loss, no extractor signal from the domain unit") {
  DannSpec spec{4, {5}, Activation::kSigmoid, HeadKind::kSoftmaxSingleLabel, 3};
  Rng rng(4);
  DannParams p = random_params(rng, spec, 5);
  DomainBatch batch = random_batch(rng, spec, 3);
  const DannObjective zero = dann_objective(batch, p, 0.0);
  CHECK(zero.value == zero.label_loss);
  DannParams other = p;
  for (double &u : other.domain_weight) u *= -3.0;
  other.domain_bias = 2.0;
  const DannObjective moved = dann_objective(batch, other, 0.0);
  for (std::size_t l = 0; l < zero.grads.feature_extractor.layers.size(); ++l)
    CHECK(zero.grads.feature_extractor.layers[l] == moved.grads.feature_extractor.layers[l]);
  CHECK(zero.domain_loss != moved.domain_loss);
}

TEST_CASE("unbalanced or empty batches are rejected") {
  DannSpec spec{2, {3}, Activation::kSigmoid, HeadKind::kSoftmaxSingleLabel, 2};
  Rng rng(5);
  DannParams p = init_dann(spec, 1);
  DomainBatch batch = random_batch(rng, spec, 3);
  batch.target_x = random_matrix(rng, 2, 2);
  try {
    dann_objective(batch, p, 0.1);
    FAIL("expected a batch error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kBatch);
  }
  DomainBatch wrong_head = random_batch(rng, spec, 2);
  wrong_head.source_y = Labels::multi(RealMatrix(2, 2, 1.0));
  CHECK_THROWS_AS(dann_objective(wrong_head, p, 0.1), Error);
}

TEST_CASE("one step descends in the extractor and ascends in the domain unit") {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    DannSpec spec{3, {4}, Activation::kSigmoid, HeadKind::kSoftmaxSingleLabel, 3};
    DannParams p = random_params(rng, spec, 50 + trial);
    DomainBatch batch = random_batch(rng, spec, 4);
    const double lambda = 0.5;
    const DannObjective obj = dann_objective(batch, p, lambda);
    SgdConfig sgd;
    sgd.lr0 = 1e-3;

    // Descent step on (W, b, V, c) with (u, z) frozen lowers E.
    DannParams descend = p;
    DannGrads only_min = obj.grads;
    std::fill(only_min.domain_weight.begin(), only_min.domain_weight.end(), 0.0);
    only_min.domain_bias = 0.0;
    dann_sgd_step(descend, only_min, 0, sgd);
    CHECK(dann_objective(batch, descend, lambda).value < obj.value);

    // The update applied to (u, z) raises E, and its direction agrees in sign
    // with the finite-difference gradient of E.
    DannParams ascend = p;
    DannGrads only_max = obj.grads;
    only_max.feature_extractor = zero_grads_like(p.feature_extractor);
    only_max.label_head.weight.set_zero();
    std::fill(only_max.label_head.bias.begin(), only_max.label_head.bias.end(), 0.0);
    dann_sgd_step(ascend, only_max, 0, sgd);
    CHECK(dann_objective(batch, ascend, lambda).value > obj.value);
    auto energy = [&] { return dann_objective(batch, p, lambda).value; };
    const auto fd = numeric_gradient(energy, p.domain_weight);
    for (std::size_t j = 0; j < fd.size(); ++j) {
      const double applied = ascend.domain_weight[j] - p.domain_weight[j];
      if (std::abs(fd[j]) > 1e-9) CHECK((applied > 0) == (fd[j] > 0));
    }
  }
}

TEST_CASE("lambda = 0 training reproduces source-only training bit for bit") {
  Rng rng(7);
  const LabeledRows source = two_blobs(rng, 120, 0.0);
  const LabeledRows target = two_blobs(rng, 90, 2.0);
  DannSpec spec{2, {6}, Activation::kSigmoid, HeadKind::kSoftmaxSingleLabel, 2};
  AdvTrainConfig cfg;
  cfg.lambda = 0.0;
  cfg.sgd.batch_size = 16;
  cfg.sgd.epochs = 5;
  cfg.sgd.lr0 = 0.2;
  cfg.sgd.seed = 99;
  cfg.sgd.schedule = LrSchedule::kInverseDecay;
  cfg.sgd.alpha = 0.01;
  cfg.sgd.beta = 0.75;
  const DannTrainResult dann = train_dann(source, target.x, spec, cfg);
  const ClassifierTrainResult plain = train_source_classifier(source, spec, cfg);
  REQUIRE(plain.params.layers.size() == 2);
  const auto &fe = dann.params.feature_extractor.layers[0];
  CHECK(same_bytes(fe.weight.data(), plain.params.layers[0].weight.data()));
  CHECK(same_bytes(fe.bias, plain.params.layers[0].bias));
  CHECK(same_bytes(dann.params.label_head.weight.data(),
                   plain.params.layers[1].weight.data()));
  CHECK(same_bytes(dann.params.label_head.bias, plain.params.layers[1].bias));
  // And a nonzero lambda really changes the extractor.
  cfg.lambda = 0.5;
  const DannTrainResult adv = train_dann(source, target.x, spec, cfg);
  CHECK_FALSE(same_bytes(adv.params.feature_extractor.layers[0].weight.data(),
                         fe.weight.data()));
}

TEST_CASE("training is deterministic per seed and records every epoch") {
  Rng rng(8);
  const LabeledRows source = two_blobs(rng, 100, 0.0);
  const LabeledRows target = two_blobs(rng, 100, 1.0);
  DannSpec spec{2, {5}, Activation::kSigmoid, HeadKind::kSoftmaxSingleLabel, 2};
  AdvTrainConfig cfg;
  cfg.lambda = 0.3;
  cfg.lambda_schedule = LambdaSchedule::kRamp;
  cfg.sgd.batch_size = 20;
  cfg.sgd.epochs = 4;
  cfg.sgd.seed = 3;
  const DannTrainResult a = train_dann(source, target.x, spec, cfg);
  const DannTrainResult b = train_dann(source, target.x, spec, cfg);
  CHECK(a.params == b.params);
  REQUIRE(a.history.size() == 4);
  for (std::size_t e = 0; e < 4; ++e) {
    CHECK(a.history[e].epoch == e);
    CHECK(a.history[e].label_loss == b.history[e].label_loss);
    CHECK(a.history[e].domain_accuracy >= 0.0);
    CHECK(a.history[e].domain_accuracy <= 1.0);
  }
  CHECK(a.history[3].lambda > a.history[0].lambda);
  cfg.sgd.seed = 4;
  CHECK_FALSE(train_dann(source, target.x, spec, cfg).params == a.params);
}

TEST_CASE("train_dann input errors") {
  Rng rng(9);
  const LabeledRows source = two_blobs(rng, 40, 0.0);
  DannSpec spec{2, {3}, Activation::kSigmoid, HeadKind::kSoftmaxSingleLabel, 2};
  AdvTrainConfig cfg;
  cfg.sgd.batch_size = 8;
  cfg.sgd.epochs = 1;
  auto kind_of = [](auto &&fn) {
    try {
      fn();
    } catch (const Error &e) {
      return e.kind();
    }
    return ErrorKind::kIo;
  };
  CHECK(kind_of([&] { train_dann(source, RealMatrix(0, 2), spec, cfg); }) ==
        ErrorKind::kData);
  CHECK(kind_of([&] { train_dann(LabeledRows{}, source.x, spec, cfg); }) ==
        ErrorKind::kData);
  CHECK(kind_of([&] { train_dann(source, RealMatrix(10, 3), spec, cfg); }) ==
        ErrorKind::kDimension);
  DannSpec linear = spec;
  linear.activation = Activation::kIdentity;
  cfg.sgd.lr0 = 1e150;
  cfg.sgd.epochs = 30;
  const ErrorKind k = kind_of([&] { train_dann(source, source.x, linear, cfg); });
  CHECK(k == ErrorKind::kTraining);
}

TEST_CASE("prediction heads") {
  DannSpec multi{4, {3}, Activation::kSigmoid, HeadKind::kSigmoidMultiLabel, 14};
  DannParams p = init_dann(multi, 2);
  p.label_head.weight.set_zero();
  Rng rng(10);
  const RealMatrix x = random_matrix(rng, 6, 4);
  const RealMatrix half = predict_label_probs(p, x);
  for (double v : half.data()) CHECK(v == 0.5);

  DannSpec single{4, {3}, Activation::kSigmoid, HeadKind::kSoftmaxSingleLabel, 5};
  DannParams q = init_dann(single, 2);
  q.label_head.weight.set_zero();
  const RealMatrix fifth = predict_label_probs(q, x);
  for (double v : fifth.data()) CHECK(std::abs(v - 0.2) <= 1e-15);

  // Composition oracle: extractor then dense head then softmax.
  DannParams r = random_params(rng, single, 11);
  const RealMatrix probs = predict_label_probs(r, x);
  const RealMatrix h = dense_forward(x, r.feature_extractor.layers[0], Activation::kSigmoid);
  const RealMatrix z = dense_forward(h, r.label_head, Activation::kIdentity);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto ref = softmax(z.row(i));
    double sum = 0.0;
    for (std::size_t c = 0; c < 5; ++c) {
      CHECK(std::abs(probs(i, c) - ref[c]) <= 1e-12);
      sum += probs(i, c);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("phonetic scores") {
  Rng rng(12);
  DannSpec multi{4, {6}, Activation::kSigmoid, HeadKind::kSigmoidMultiLabel, 14};
  DannParams p = random_params(rng, multi, 3);
  const RealMatrix x = random_matrix(rng, 8, 4, 3.0);
  const RealMatrix s = phonetic_scores(p, x);
  CHECK(s == predict_label_probs(p, x));
  for (double v : s.data()) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  DannSpec single = multi;
  single.head_kind = HeadKind::kSoftmaxSingleLabel;
  CHECK_THROWS_AS(phonetic_scores(init_dann(single, 1), x), Error);
  DannSpec narrow = multi;
  narrow.output_dim = 13;
  CHECK_THROWS_AS(phonetic_scores(init_dann(narrow, 1), x), Error);
}
