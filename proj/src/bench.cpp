// src/bench.cpp

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

#include "dannphone/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "dannphone/binio.hpp"
#include "dannphone/corpus.hpp"
#include "dannphone/divergence.hpp"
#include "dannphone/error.hpp"
#include "dannphone/features.hpp"
#include "dannphone/gradcheck.hpp"
#include "dannphone/losses.hpp"
#include "dannphone/model_io.hpp"
#include "dannphone/phonetics.hpp"
#include "dannphone/rng.hpp"
#include "dannphone/synth.hpp"

namespace dannphone {

namespace {

// Tolerances and budgets of the acceptance criteria.
constexpr std::size_t kGradInstances = 100;  // per gradient family
constexpr double kGradBudgetSeconds = 60.0;
constexpr double kClosedFormTol = 1e-12;
constexpr double kMinAccuracyGain = 0.05;
constexpr double kProbeLow = 0.50, kProbeHigh = 0.65;
constexpr double kBaselineProbeMin = 0.90;
constexpr double kSynthBudgetSeconds = 300.0;
constexpr double kPipelineBudgetSeconds = 600.0;
constexpr std::size_t kPerInstances = 1000;
constexpr std::size_t kPerMaxFrames = 20;
constexpr double kRcvMaxShortfall = 0.02;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class... Args>
std::string format(const char *fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string list(const std::vector<double> &v, const char *fmt = "%.3f") {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + format(fmt, x);
  return s;
}

std::vector<std::uint64_t> seeds_of(const BenchOptions &o) {
  std::vector<std::uint64_t> s(o.n_seeds);
  std::iota(s.begin(), s.end(), o.seed);
  return s;
}

double accuracy(const DannParams &p, const LabeledDataset &d) {
  const auto pred = argmax_rows(predict_label_probs(p, d.features));
  const auto &ref = *d.phoneme_ids;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == ref[i];
  return static_cast<double>(ok) / static_cast<double>(pred.size());
}

RealMatrix random_matrix(Rng &rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  RealMatrix m(rows, cols);
  for (double &v : m.data()) v = scale * rng.normal();
  return m;
}

std::vector<double> random_vector(Rng &rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double &x : v) x = scale * rng.normal();
  return v;
}

MultiLabelTarget random_target(Rng &rng, std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (auto &b : bits) b = rng.uniform() < 0.4;
  return MultiLabelTarget(bits);
}

std::vector<double> sigmoids(std::span<const double> z) {
  std::vector<double> p(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) p[i] = sigmoid(z[i]);
  return p;
}

double sum_product(const RealMatrix &a, const RealMatrix &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

// Largest relative error per gradient family.
struct GradTally {
  std::vector<std::pair<std::string, double>> worst;
  void add(const std::string &family, double err) {
    for (auto &[name, w] : worst)
      if (name == family) {
        w = std::max(w, err);
        return;
      }
    worst.emplace_back(family, err);
  }
};

void grad_losses(Rng &rng, GradTally &t) {
  for (std::size_t i = 0; i < kGradInstances; ++i) {
    auto z = random_vector(rng, 2 + rng.index(7), 2.0);
    const std::size_t y = rng.index(z.size());
    auto f = [&] { return softmax_ce(softmax(z), y).value; };
    t.add("softmax_ce", relative_error(softmax_ce(softmax(z), y).grad, numeric_gradient(f, z)));
  }
  for (std::size_t i = 0; i < kGradInstances; ++i) {
    auto z = random_vector(rng, 1 + rng.index(8), 2.0);
    const MultiLabelTarget y = random_target(rng, z.size());
    auto f = [&] { return bce_multilabel(sigmoids(z), y).value; };
    t.add("bce", relative_error(bce_multilabel(sigmoids(z), y).grad, numeric_gradient(f, z)));
  }
  for (std::size_t i = 0; i < kGradInstances; ++i) {
    auto p = random_vector(rng, 1 + rng.index(8));
    const MultiLabelTarget y = random_target(rng, p.size());
    auto f = [&] { return squared_multilabel(p, y).value; };
    t.add("squared", relative_error(squared_multilabel(p, y).grad, numeric_gradient(f, p)));
  }
  for (std::size_t done = 0; done < kGradInstances;) {
    auto p = random_vector(rng, 2 + rng.index(7));
    const MultiLabelTarget y = random_target(rng, p.size());
    if (y.positives().empty() || y.negatives().empty()) continue;
    ++done;
    auto f = [&] { return pwe_loss(p, y)->value; };
    t.add("pwe", relative_error(pwe_loss(p, y)->grad, numeric_gradient(f, p)));
  }
  for (MultiLabelLoss kind : {MultiLabelLoss::kBce, MultiLabelLoss::kSquared, MultiLabelLoss::kPwe}) {
    for (std::size_t done = 0; done < kGradInstances;) {
      auto z = random_vector(rng, 2 + rng.index(7), 1.5);
      const MultiLabelTarget y = random_target(rng, z.size());
      if (kind == MultiLabelLoss::kPwe && (y.positives().empty() || y.negatives().empty()))
        continue;
      ++done;
      auto f = [&] { return sigmoid_head_loss(kind, sigmoids(z), y).loss.value; };
      t.add("sigmoid_head_" + std::string(multilabel_loss_name(kind)),
            relative_error(sigmoid_head_loss(kind, sigmoids(z), y).loss.grad,
                           numeric_gradient(f, z)));
    }
  }
  for (std::size_t i = 0; i < kGradInstances; ++i) {
    std::vector<double> z{2.0 * rng.normal()};
    const int d = static_cast<int>(rng.index(2));
    auto f = [&] { return domain_loss(sigmoid(z[0]), d).value; };
    t.add("domain_loss",
          relative_error(domain_loss(sigmoid(z[0]), d).grad, numeric_gradient(f, z)));
  }
}

void grad_layers(Rng &rng, GradTally &t) {
  const Activation acts[] = {Activation::kSigmoid, Activation::kTanh, Activation::kRelu,
                             Activation::kIdentity};
  for (std::size_t i = 0; i < kGradInstances; ++i) {
    const Activation act = acts[i % 4];
    RealMatrix x = random_matrix(rng, 1 + rng.index(4), 1 + rng.index(8));
    DenseLayer layer{random_matrix(rng, 1 + rng.index(8), x.cols(), 0.7),
                     random_vector(rng, 0, 0.3)};
    layer.bias = random_vector(rng, layer.weight.rows(), 0.3);
    const RealMatrix up = random_matrix(rng, x.rows(), layer.weight.rows());
    auto f = [&] { return sum_product(dense_forward(x, layer, act), up); };
    const DenseGrads g = dense_backward(x, layer, act, up);
    const std::string fam = "dense_" + std::string(activation_name(act));
    t.add(fam, relative_error(g.grad_weight.data(), numeric_gradient(f, layer.weight.data())));
    t.add(fam, relative_error(g.grad_bias, numeric_gradient(f, layer.bias)));
    t.add(fam, relative_error(g.grad_input.data(), numeric_gradient(f, x.data())));
  }
  for (std::size_t i = 0; i < kGradInstances; ++i) {
    const MlpSpec spec{1 + rng.index(6), {1 + rng.index(6), 1 + rng.index(6)},
                       i % 2 ? Activation::kTanh : Activation::kSigmoid, 1 + rng.index(5)};
    MlpParams p = init_params(spec, 1000 + i);
    for (auto &l : p.layers)
      for (double &v : l.bias) v = 0.2 * rng.normal();
    RealMatrix x = random_matrix(rng, 3, spec.input_dim);
    const RealMatrix up = random_matrix(rng, 3, spec.output_dim);
    auto f = [&] {
      return sum_product(mlp_forward(p, spec.activation, x, OutputMode::kLinear).output(), up);
    };
    const MlpGrads g = mlp_backward(p, spec.activation,
                                    mlp_forward(p, spec.activation, x, OutputMode::kLinear), up,
                                    OutputMode::kLinear, true);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      t.add("mlp", relative_error(g.layers[l].weight.data(),
                                  numeric_gradient(f, p.layers[l].weight.data())));
      t.add("mlp", relative_error(g.layers[l].bias, numeric_gradient(f, p.layers[l].bias)));
    }
    t.add("mlp", relative_error(g.grad_input.data(), numeric_gradient(f, x.data())));
  }
}

void grad_dann(Rng &rng, GradTally &t) {
  const MultiLabelLoss losses[] = {MultiLabelLoss::kBce, MultiLabelLoss::kSquared,
                                   MultiLabelLoss::kPwe};
  for (std::size_t i = 0; i < kGradInstances; ++i) {
    DannSpec spec;
    spec.input_dim = 1 + rng.index(5);
    spec.hidden_dims = i % 3 == 0 ? std::vector<std::size_t>{3, 2} : std::vector<std::size_t>{3};
    spec.activation = i % 2 ? Activation::kTanh : Activation::kSigmoid;
    spec.head_kind = i % 2 ? HeadKind::kSigmoidMultiLabel : HeadKind::kSoftmaxSingleLabel;
    spec.output_dim = 2 + rng.index(4);
    DannParams p = init_dann(spec, 500 + i);
    for (auto &l : p.feature_extractor.layers)
      for (double &v : l.bias) v = 0.3 * rng.normal();
    for (double &v : p.label_head.bias) v = 0.3 * rng.normal();
    for (double &v : p.domain_weight) v = rng.normal();
    p.domain_bias = 0.2 * rng.normal();
    DomainBatch b;
    b.source_x = random_matrix(rng, 2, spec.input_dim);
    b.target_x = random_matrix(rng, 2, spec.input_dim, 1.3);
    if (spec.head_kind == HeadKind::kSoftmaxSingleLabel) {
      b.source_y = Labels::single({rng.index(spec.output_dim), rng.index(spec.output_dim)});
    } else {
      RealMatrix bits(2, spec.output_dim);
      for (double &v : bits.data()) v = rng.uniform() < 0.4;
      b.source_y = Labels::multi(bits);
    }
    const double lambda = 0.1 + rng.uniform();
    const MultiLabelLoss loss = losses[(i / 2) % 3];
    auto e = [&] { return dann_objective(b, p, lambda, loss).value; };
    auto neg = [&] { return -e(); };
    const DannObjective obj = dann_objective(b, p, lambda, loss);
    for (std::size_t l = 0; l < p.feature_extractor.layers.size(); ++l) {
      auto &layer = p.feature_extractor.layers[l];
      t.add("dann_extractor", relative_error(obj.grads.feature_extractor.layers[l].weight.data(),
                                             numeric_gradient(e, layer.weight.data())));
      t.add("dann_extractor", relative_error(obj.grads.feature_extractor.layers[l].bias,
                                             numeric_gradient(e, layer.bias)));
    }
    t.add("dann_label_head", relative_error(obj.grads.label_head.weight.data(),
                                            numeric_gradient(e, p.label_head.weight.data())));
    t.add("dann_label_head",
          relative_error(obj.grads.label_head.bias, numeric_gradient(e, p.label_head.bias)));
    t.add("dann_domain_unit",
          relative_error(obj.grads.domain_weight, numeric_gradient(neg, p.domain_weight)));
    t.add("dann_domain_unit",
          relative_error(std::vector<double>{obj.grads.domain_bias},
                         numeric_gradient(neg, std::span<double>(&p.domain_bias, 1))));
  }
}

CriterionResult ac2(const BenchOptions &o) {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(o.seed, "ac2-gradients"));
  GradTally t;
  grad_losses(rng, t);
  grad_layers(rng, t);
  grad_dann(rng, t);
  const double secs = seconds_since(t0);
  double worst = 0.0;
  std::string worst_family;
  for (const auto &[name, w] : t.worst)
    if (w >= worst) worst = w, worst_family = name;
  CriterionResult r{2, "gradient suite", worst <= kGradTol && secs < kGradBudgetSeconds, "", secs};
  r.detail = format("%zu families x %zu instances, max relative error %.2e (%s) <= %.0e, budget %.0f s",
                    t.worst.size(), kGradInstances, worst, worst_family.c_str(), kGradTol,
                    kGradBudgetSeconds);
  return r;
}

CriterionResult ac3(const BenchOptions &) {
  double worst = 0.0;
  for (std::size_t k = 2; k <= 10; ++k) {
    const std::vector<double> u(k, 1.0 / static_cast<double>(k));
    for (std::size_t y = 0; y < k; ++y)
      worst = std::max(worst, std::abs(softmax_ce(u, y).value - std::log(static_cast<double>(k))));
  }
  const std::vector<double> half(kNumPhoneticFeatures, 0.5);
  Rng rng(3);
  for (int i = 0; i < 20; ++i)
    worst = std::max(worst, std::abs(bce_multilabel(half, random_target(rng, half.size())).value -
                                     14.0 * std::log(2.0)));
  worst = std::max(worst, std::abs(domain_loss(0.5, 0).value - std::log(2.0)));
  for (double s : {-1.0, 0.0, 0.3, 0.7}) {
    const std::vector<double> eq(6, s);
    worst = std::max(worst, std::abs(pwe_loss(eq, MultiLabelTarget({1, 0, 1, 0, 0, 1}))->value - 1.0));
  }
  return {3, "closed-form loss values", worst <= kClosedFormTol,
          format("max |error| %.2e <= %.0e over softmax_ce ln K (K=2..10), BCE 14 ln 2, domain ln 2, PWE 1",
                 worst, kClosedFormTol),
          0.0};
}

bool same_bits(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](double x, double y) {
           return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
         });
}

CriterionResult ac4(const BenchOptions &o) {
  const auto t0 = Clock::now();
  SynthDannSetup setup = synth_dann_setup();
  setup.config.lambda = 0.0;
  setup.config.sgd.epochs = 10;
  std::size_t matched = 0;
  const auto seeds = seeds_of(o);
  for (std::uint64_t seed : seeds) {
    const SynthBenchDomains d = synth_bench_domains(seed);
    AdvTrainConfig cfg = setup.config;
    cfg.sgd.seed = derive_seed(seed, "synth-dann");
    const DannParams dann = train_dann(d.source.phoneme_rows(), d.target.features, setup.spec, cfg).params;
    const MlpParams plain = train_source_classifier(d.source.phoneme_rows(), setup.spec, cfg).params;
    bool same = plain.layers.size() == dann.feature_extractor.layers.size() + 1;
    for (std::size_t l = 0; same && l < dann.feature_extractor.layers.size(); ++l)
      same = same_bits(dann.feature_extractor.layers[l].weight.data(), plain.layers[l].weight.data()) &&
             same_bits(dann.feature_extractor.layers[l].bias, plain.layers[l].bias);
    same = same && same_bits(dann.label_head.weight.data(), plain.layers.back().weight.data()) &&
           same_bits(dann.label_head.bias, plain.layers.back().bias);
    matched += same;
  }
  return {4, "lambda = 0 reduction", matched == seeds.size(),
          format("%zu/%zu seeds bit-identical to source-only training (10 epochs)", matched,
                 seeds.size()),
          seconds_since(t0)};
}

CriterionResult ac5(const BenchOptions &o) {
  const auto t0 = Clock::now();
  const SynthDannSetup setup = synth_dann_setup();
  std::vector<double> gain, base_acc, dann_acc, base_probe, dann_probe;
  for (std::uint64_t seed : seeds_of(o)) {
    const SynthBenchDomains d = synth_bench_domains(seed);
    AdvTrainConfig cfg = setup.config;
    cfg.sgd.seed = derive_seed(seed, "synth-dann");
    ProbeConfig probe;
    probe.seed = seed;
    const DannParams adapted = train_dann(d.source.phoneme_rows(), d.target.features, setup.spec, cfg).params;
    cfg.lambda = 0.0;
    const DannParams baseline = train_dann(d.source.phoneme_rows(), d.target.features, setup.spec, cfg).params;
    dann_acc.push_back(accuracy(adapted, d.target_test));
    base_acc.push_back(accuracy(baseline, d.target_test));
    gain.push_back(dann_acc.back() - base_acc.back());
    dann_probe.push_back(domain_probe(dann_features(adapted, d.source_test.features),
                                      dann_features(adapted, d.target_test.features), probe)
                             .heldout_accuracy);
    base_probe.push_back(domain_probe(dann_features(baseline, d.source_test.features),
                                      dann_features(baseline, d.target_test.features), probe)
                             .heldout_accuracy);
  }
  const double secs = seconds_since(t0);
  const double g = median(gain), dp = median(dann_probe), bp = median(base_probe);
  const bool pass = g >= kMinAccuracyGain && dp >= kProbeLow && dp <= kProbeHigh &&
                    bp >= kBaselineProbeMin && secs < kSynthBudgetSeconds;
  return {5, "synthetic adaptation", pass,
          format("median target accuracy %.3f vs %.3f at lambda 0 (gain %+.3f >= %.2f); "
                 "median probe %.3f in [%.2f, %.2f] vs %.3f >= %.2f; budget %.0f s",
                 median(dann_acc), median(base_acc), g, kMinAccuracyGain, dp, kProbeLow,
                 kProbeHigh, bp, kBaselineProbeMin, kSynthBudgetSeconds) +
              "; per seed gain [" + list(gain) + "] probe [" + list(dann_probe) + "] baseline probe [" +
              list(base_probe) + "]",
          secs};
}

CriterionResult ac6(const BenchOptions &o) {
  const auto t0 = Clock::now();
  const PhoneticFeatureTable table = load_spe_table(default_spe_table_path());
  std::vector<double> prop_t, noad_t, prop_s, direct_s;
  for (std::uint64_t seed : seeds_of(o)) {
    const SynthPhoneticsCorpus c = gen_synth_phonetics(standard_phonetics_spec(seed), table);
    const ExperimentData d = experiment_data(c.source_train, c.source_test, c.target_train,
                                             c.target_test, c.inventory);
    const ExperimentConfig cfg = synth_pipeline_config(seed);
    const ExperimentResult prop = run_adaptation_experiment(cfg, d);
    const ExperimentResult noad = run_no_adaptation_baseline(cfg, d);
    const ExperimentResult direct = run_direct_dann_baseline(cfg, d);
    prop_t.push_back(prop.target_test.frame_error_rate);
    prop_s.push_back(prop.source_test.frame_error_rate);
    noad_t.push_back(noad.target_test.frame_error_rate);
    direct_s.push_back(direct.source_test.frame_error_rate);
  }
  const double secs = seconds_since(t0);
  const bool a = median(prop_t) < median(noad_t), b = median(prop_s) <= median(direct_s);
  return {6, "full pipeline ordering", a && b && secs < kPipelineBudgetSeconds,
          format("(a) median target error %.3f < %.3f no adaptation: %s; (b) median source error "
                 "%.3f <= %.3f direct dann: %s; budget %.0f s",
                 median(prop_t), median(noad_t), a ? "yes" : "no", median(prop_s), median(direct_s),
                 b ? "yes" : "no", kPipelineBudgetSeconds) +
              "; per seed target [" + list(prop_t) + "] vs [" + list(noad_t) + "], source [" +
              list(prop_s) + "] vs [" + list(direct_s) + "]",
          secs};
}

CriterionResult ac7(const BenchOptions &o) {
  const auto t0 = Clock::now();
  const PhoneticFeatureTable table = load_spe_table(default_spe_table_path());
  SynthPhoneticsSpec spec = standard_phonetics_spec(o.seed);
  spec.train_utterances = 10;
  spec.test_utterances = 5;
  const SynthPhoneticsCorpus c = gen_synth_phonetics(spec, table);
  ExperimentConfig cfg = synth_pipeline_config(o.seed);
  cfg.dann.sgd.epochs = 2;
  cfg.phoneme_sgd.epochs = 2;
  const ExperimentResult r = run_adaptation_experiment(
      cfg, experiment_data(c.source_train, c.source_test, c.target_train, c.target_test, c.inventory));
  const std::vector<std::pair<std::string, std::size_t>> want{
      {"static", 23}, {"deltas", 69}, {"dann_input", 759}, {"scores", 14}, {"appended", 83}, {"spliced", 913}};
  bool pass = true;
  std::string got;
  for (const auto &[stage, dim] : want) {
    const auto it = r.dims.find(stage);
    const std::size_t have = it == r.dims.end() ? 0 : it->second;
    pass = pass && have == dim;
    got += (got.empty() ? "" : " -> ") + stage + " " + std::to_string(have);
  }
  pass = pass && r.phoneme_model.params.layers.front().in_dim() == 913;
  return {7, "dimension contract", pass, got, seconds_since(t0)};
}

// Independent oracle: full-table Levenshtein over collapsed, silence-free
// sequences.
double per_oracle(const std::vector<std::size_t> &frames, const std::vector<std::size_t> &ref,
                  std::optional<std::size_t> sil) {
  std::vector<std::size_t> hyp(frames);
  hyp.erase(std::unique(hyp.begin(), hyp.end()), hyp.end());
  std::vector<std::size_t> r(ref);
  if (sil) {
    hyp.erase(std::remove(hyp.begin(), hyp.end(), *sil), hyp.end());
    r.erase(std::remove(r.begin(), r.end(), *sil), r.end());
  }
  std::vector<std::vector<std::size_t>> dp(hyp.size() + 1, std::vector<std::size_t>(r.size() + 1));
  for (std::size_t i = 0; i <= hyp.size(); ++i) dp[i][0] = i;
  for (std::size_t j = 0; j <= r.size(); ++j) dp[0][j] = j;
  for (std::size_t i = 1; i <= hyp.size(); ++i)
    for (std::size_t j = 1; j <= r.size(); ++j)
      dp[i][j] = std::min({dp[i - 1][j] + 1, dp[i][j - 1] + 1,
                           dp[i - 1][j - 1] + (hyp[i - 1] == r[j - 1] ? 0 : 1)});
  return static_cast<double>(dp[hyp.size()][r.size()]) / static_cast<double>(r.size());
}

CriterionResult ac8(const BenchOptions &o) {
  Rng rng(derive_seed(o.seed, "ac8-per"));
  std::size_t agree = 0;
  for (std::size_t i = 0; i < kPerInstances; ++i) {
    const std::size_t alphabet = 2 + rng.index(5);
    std::optional<std::size_t> sil;
    if (rng.uniform() < 0.8) sil = 0;
    std::vector<std::size_t> frames(1 + rng.index(kPerMaxFrames));
    for (auto &f : frames) f = rng.index(alphabet);
    std::vector<std::size_t> ref(1 + rng.index(10));
    for (auto &p : ref) p = 1 + rng.index(alphabet - 1);
    if (sil && rng.uniform() < 0.3) ref.insert(ref.begin(), *sil);
    agree += approx_per(frames, ref, sil) == per_oracle(frames, ref, sil);
  }
  return {8, "approx_per vs edit-distance oracle", agree == kPerInstances,
          format("%zu/%zu random instances (T <= %zu) equal exactly", agree, kPerInstances,
                 kPerMaxFrames),
          0.0};
}

CriterionResult ac9(const BenchOptions &o) {
  const auto t0 = Clock::now();
  const SynthDannSetup setup = synth_dann_setup();
  std::vector<double> shortfall, chosen;
  for (std::uint64_t seed : seeds_of(o)) {
    const SynthBenchDomains d = synth_bench_domains(seed);
    const RcvResult r = reverse_cross_validation(synth_rcv_grid(), d.source.phoneme_rows(),
                                                 d.target.features, setup.spec, setup.config,
                                                 derive_seed(seed, "synth-rcv"));
    double best = 0.0;
    for (const RcvRow &row : r.table) best = std::max(best, accuracy(row.forward, d.target_test));
    shortfall.push_back(best - accuracy(r.table[r.best].forward, d.target_test));
    chosen.push_back(r.table[r.best].point.lambda);
  }
  const double m = median(shortfall);
  return {9, "reverse cross-validation vs oracle selection", m <= kRcvMaxShortfall,
          format("median shortfall %.3f <= %.2f; chosen lambda [", m, kRcvMaxShortfall) +
              list(chosen, "%g") + "], shortfall [" + list(shortfall) + "]",
          seconds_since(t0)};
}

// Everything one small pipeline run writes, keyed by file name.
std::vector<std::pair<std::string, std::string>> pipeline_artifacts(const std::filesystem::path &dir,
                                                                    std::uint64_t seed) {
  const PhoneticFeatureTable table = load_spe_table(default_spe_table_path());
  SynthPhoneticsSpec spec = standard_phonetics_spec(seed);
  spec.train_utterances = 8;
  spec.test_utterances = 4;
  const SynthPhoneticsCorpus c = gen_synth_phonetics(spec, table);
  write_synth_corpus(c, dir / "corpus");
  const ExperimentData d = load_corpus(dir / "corpus", table);
  ExperimentConfig cfg = synth_pipeline_config(seed);
  cfg.dann_spec.hidden_dims = {16};
  cfg.phoneme_spec.hidden_dims = {16};
  cfg.dann.sgd.epochs = 2;
  cfg.phoneme_sgd.epochs = 2;
  cfg.rcv_grid = {{0.0, 0.05, {}}, {1.0, 0.05, {}}};
  const ExperimentResult r = run_adaptation_experiment(cfg, d);
  write_experiment_artifacts(dir / "run", r, cfg, "pipeline");
  const DannModel m = load_dann_model(dir / "run" / "dann");
  write_archive(dir / "run" / "target_test.scores.farc",
                score_archive(m, read_archive(dir / "corpus" / "target_test.farc")));
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto &sub : {"corpus", "run"}) {
    std::vector<std::filesystem::path> paths;
    for (const auto &e : std::filesystem::directory_iterator(dir / sub)) paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (const auto &p : paths)
      files.emplace_back(std::string(sub) + "/" + p.filename().string(), read_file_bytes(p));
  }
  return files;
}

CriterionResult ac10(const BenchOptions &o) {
  const auto t0 = Clock::now();
  const std::filesystem::path root =
      (o.work_dir.empty() ? std::filesystem::temp_directory_path() : o.work_dir) /
      ("dannphone-ac10-" + std::to_string(o.seed));
  std::filesystem::remove_all(root);
  const auto a = pipeline_artifacts(root / "a", o.seed);
  const auto b = pipeline_artifacts(root / "b", o.seed);
  std::filesystem::remove_all(root);
  std::size_t same = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) same += a[i] == b[i];
  return {10, "determinism", a.size() == b.size() && same == a.size() && !a.empty(),
          format("%zu/%zu artifacts byte-identical across two runs (corpus, models, scores, report)",
                 same, a.size()),
          seconds_since(t0)};
}

}  // namespace

SynthDannSetup synth_dann_setup() {
  SynthDannSetup s;
  s.spec = {10, {32, 12}, Activation::kTanh, HeadKind::kSoftmaxSingleLabel, 5};
  s.config.lambda = 1.0;
  s.config.sgd.lr0 = 0.05;
  s.config.sgd.schedule = LrSchedule::kInverseDecay;
  s.config.sgd.alpha = 0.001;
  s.config.sgd.beta = 0.75;
  s.config.sgd.batch_size = 64;
  s.config.sgd.epochs = 100;
  return s;
}

std::vector<RcvPoint> synth_rcv_grid() {
  return {{0.0, 0.05, {}}, {0.3, 0.05, {}}, {1.0, 0.05, {}}, {2.0, 0.05, {}}};
}

ExperimentConfig synth_pipeline_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.seed = seed;
  c.context = 5;
  c.dann_spliced_input = true;
  c.dann_spec.hidden_dims = {64};
  c.dann_spec.activation = Activation::kTanh;
  c.dann.lambda = 1.0;
  c.dann.sgd.lr0 = 0.05;
  c.dann.sgd.schedule = LrSchedule::kInverseDecay;
  c.dann.sgd.alpha = 0.001;
  c.dann.sgd.beta = 0.75;
  c.dann.sgd.batch_size = 64;
  c.dann.sgd.epochs = 20;
  c.phoneme_spec.hidden_dims = {128};
  c.phoneme_spec.activation = Activation::kTanh;
  c.phoneme_sgd = c.dann.sgd;
  return c;
}

SynthBenchDomains synth_bench_domains(std::uint64_t seed) {
  const SynthSpec train = standard_synth_spec(seed);
  SynthSpec test = train;
  test.seed = derive_seed(seed, "test");
  auto [src, tgt] = gen_domains(train);
  auto [src_test, tgt_test] = gen_domains(test);
  const NormStats norm = normalize_fit(vconcat(src.features, tgt.features));
  auto n = [&](const LabeledDataset &d) { return d.with_features(normalize_apply(d.features, norm)); };
  return {n(src), n(tgt), n(src_test), n(tgt_test)};
}

CriterionResult run_criterion(int id, const BenchOptions &o) {
  using Check = CriterionResult (*)(const BenchOptions &);
  static constexpr Check kChecks[] = {ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10};
  if (id < kFirstCriterion || id > kLastCriterion)
    fail(ErrorKind::kConfig, "no acceptance criterion ", id);
  const auto t0 = Clock::now();
  CriterionResult r = kChecks[id - kFirstCriterion](o);
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CriterionResult> run_acceptance(
    const BenchOptions &options, const std::function<void(const CriterionResult &)> &on_result) {
  if (options.n_seeds == 0) fail(ErrorKind::kConfig, "acceptance needs at least one seed");
  std::vector<int> ids = options.only;
  if (ids.empty())
    for (int i = kFirstCriterion; i <= kLastCriterion; ++i) ids.push_back(i);
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id, options));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_criterion(const CriterionResult &r) {
  return "AC" + std::to_string(r.id) + (r.pass ? " PASS " : " FAIL ") + r.title + ": " + r.detail +
         format(" [%.1f s]", r.seconds);
}

Json bench_report(const std::vector<CriterionResult> &results, const BenchOptions &options) {
  Json list = Json::array();
  for (const CriterionResult &r : results) {
    list.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
  }
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "synth_bench";
  j["seed"] = options.seed;
  j["seeds"] = options.n_seeds;
  j["criteria"] = list;
  j["all_pass"] = std::all_of(results.begin(), results.end(), [](const auto &r) { return r.pass; });
  return j;
}

}  // namespace dannphone
