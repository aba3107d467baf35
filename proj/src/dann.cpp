// src/dann.cpp

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

#include "dannphone/dann.hpp"

#include <algorithm>
#include <cmath>

#include "dannphone/error.hpp"
#include "dannphone/rng.hpp"

namespace dannphone {

std::string_view head_kind_name(HeadKind k) {
  return k == HeadKind::kSoftmaxSingleLabel ? "softmax_single_label"
                                            : "sigmoid_multi_label";
}

HeadKind parse_head_kind(std::string_view name) {
  if (name == "softmax_single_label") return HeadKind::kSoftmaxSingleLabel;
  if (name == "sigmoid_multi_label") return HeadKind::kSigmoidMultiLabel;
  fail(ErrorKind::kConfig, "unknown head kind '", name, "'");
}

std::string_view lambda_schedule_name(LambdaSchedule s) {
  return s == LambdaSchedule::kConstant ? "constant" : "ramp";
}

LambdaSchedule parse_lambda_schedule(std::string_view name) {
  if (name == "constant") return LambdaSchedule::kConstant;
  if (name == "ramp") return LambdaSchedule::kRamp;
  fail(ErrorKind::kConfig, "unknown lambda schedule '", name, "'");
}

Labels Labels::single(std::vector<std::size_t> ids) {
  Labels l;
  l.classes = std::move(ids);
  return l;
}

Labels Labels::multi(RealMatrix bits) {
  Labels l;
  l.bits = std::move(bits);
  return l;
}

Labels Labels::subset(std::span<const std::size_t> rows) const {
  if (is_multi()) return multi(gather_rows(bits, rows));
  std::vector<std::size_t> ids;
  ids.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= classes.size())
      fail(ErrorKind::kIndex, "label row ", r, " out of ", classes.size());
    ids.push_back(classes[r]);
  }
  return single(std::move(ids));
}

void DannSpec::validate() const {
  if (hidden_dims.empty())
    fail(ErrorKind::kConfig, "feature extractor needs at least one hidden layer");
  classifier_spec(*this).validate();
}

MlpSpec classifier_spec(const DannSpec &spec) {
  return MlpSpec{spec.input_dim, spec.hidden_dims, spec.activation,
                 spec.output_dim};
}

DannParams init_dann(const DannSpec &spec, std::uint64_t seed) {
  spec.validate();
  MlpParams full = init_params(classifier_spec(spec), derive_seed(seed, "init"));
  DannParams p;
  p.spec = spec;
  p.label_head = std::move(full.layers.back());
  full.layers.pop_back();
  p.feature_extractor = std::move(full);
  const std::size_t d = spec.feature_dim();
  const double s = std::sqrt(6.0 / static_cast<double>(d + 1));
  Rng rng(derive_seed(seed, "domain-init"));
  p.domain_weight.resize(d);
  for (double &w : p.domain_weight) w = rng.uniform(-s, s);
  p.domain_bias = 0.0;
  return p;
}

void AdvTrainConfig::validate() const {
  sgd.validate();
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    fail(ErrorKind::kConfig, "lambda must be >= 0, got ", lambda);
  if (gamma < 0.0) fail(ErrorKind::kConfig, "gamma must be >= 0");
  if (!(domain_lr_scale > 0.0) || !std::isfinite(domain_lr_scale))
    fail(ErrorKind::kConfig, "domain_lr_scale must be positive");
  if (!(clamp_eps > 0.0 && clamp_eps < 0.5))
    fail(ErrorKind::kConfig, "clamp_eps must lie in (0, 0.5)");
}

double lambda_at(const AdvTrainConfig &config, double progress) {
  if (config.lambda_schedule == LambdaSchedule::kConstant) return config.lambda;
  return config.lambda * (2.0 / (1.0 + std::exp(-config.gamma * progress)) - 1.0);
}

RealMatrix grad_reverse(const RealMatrix &upstream, double lambda) {
  RealMatrix out = upstream;
  for (double &v : out.data()) v *= -lambda;
  return out;
}

std::vector<double> domain_head_forward(const RealMatrix &h,
                                        std::span<const double> u, double z) {
  if (h.cols() != u.size())
    fail(ErrorKind::kDimension, "domain unit expects ", u.size(),
         " features, got ", h.cols());
  std::vector<double> o(h.rows());
  for (std::size_t r = 0; r < h.rows(); ++r) {
    double a = 0.0;
    const auto row = h.row(r);
    for (std::size_t j = 0; j < u.size(); ++j) a += row[j] * u[j];
    o[r] = sigmoid(a + z);
  }
  return o;
}

namespace {

struct HeadLoss {
  double total = 0.0;  // summed over rows
  RealMatrix grad;     // d(total / rows) / d logits
  std::size_t degenerate = 0;
};

HeadLoss head_loss(HeadKind kind, const RealMatrix &logits, const Labels &y,
                   MultiLabelLoss multilabel_loss, double eps) {
  const std::size_t n = logits.rows();
  if (y.size() != n)
    fail(ErrorKind::kDimension, n, " rows but ", y.size(), " labels");
  const bool multi = kind == HeadKind::kSigmoidMultiLabel;
  if (multi != y.is_multi() && n > 0)
    fail(ErrorKind::kConfig, "head kind ", head_kind_name(kind),
         " does not match the label shape");
  if (multi && y.bits.cols() != logits.cols())
    fail(ErrorKind::kDimension, "head has ", logits.cols(), " labels, targets ",
         y.bits.cols());
  HeadLoss out;
  out.grad = RealMatrix(n, logits.cols());
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<double> p(logits.cols());
  for (std::size_t r = 0; r < n; ++r) {
    LossValue lv;
    if (!multi) {
      lv = softmax_ce(softmax(logits.row(r)), y.classes[r], eps);
    } else {
      const auto z = logits.row(r);
      for (std::size_t l = 0; l < p.size(); ++l) p[l] = sigmoid(z[l]);
      auto hl = sigmoid_head_loss(multilabel_loss, p,
                                  MultiLabelTarget::from_reals(y.bits.row(r)), eps);
      out.degenerate += hl.degenerate;
      lv = std::move(hl.loss);
    }
    out.total += lv.value;
    auto g = out.grad.row(r);
    for (std::size_t c = 0; c < g.size(); ++c) g[c] = lv.grad[c] * scale;
  }
  return out;
}

void add_into(MlpGrads &acc, const MlpGrads &g) {
  for (std::size_t l = 0; l < acc.layers.size(); ++l) {
    auto a = acc.layers[l].weight.data();
    auto b = g.layers[l].weight.data();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    for (std::size_t i = 0; i < acc.layers[l].bias.size(); ++i)
      acc.layers[l].bias[i] += g.layers[l].bias[i];
  }
}

void check_input(const RealMatrix &x, std::size_t dim, std::string_view what) {
  if (x.cols() != dim)
    fail(ErrorKind::kDimension, what, " has ", x.cols(), " columns, network expects ",
         dim);
}

}  // namespace

DannObjective dann_objective(const DomainBatch &batch, const DannParams &params,
                             double lambda, MultiLabelLoss multilabel_loss,
                             double clamp_eps) {
  const std::size_t n = batch.source_x.rows();
  const std::size_t nt = batch.target_x.rows();
  if (n == 0 || n != nt)
    fail(ErrorKind::kBatch, "adversarial batch must be balanced and non-empty: ",
         n, " source vs ", nt, " target rows");
  const auto &spec = params.spec;
  check_input(batch.source_x, spec.input_dim, "source batch");
  check_input(batch.target_x, spec.input_dim, "target batch");

  const MlpTrace src = mlp_forward(params.feature_extractor, spec.activation,
                                   batch.source_x, OutputMode::kActivated);
  const MlpTrace tgt = mlp_forward(params.feature_extractor, spec.activation,
                                   batch.target_x, OutputMode::kActivated);
  const RealMatrix &hs = src.output();
  const RealMatrix &ht = tgt.output();

  DannObjective obj;
  const RealMatrix logits =
      dense_forward(hs, params.label_head, Activation::kIdentity);
  HeadLoss hl = head_loss(spec.head_kind, logits, batch.source_y, multilabel_loss,
                          clamp_eps);
  obj.label_loss = hl.total / static_cast<double>(n);
  obj.degenerate_targets = hl.degenerate;
  DenseGrads head = dense_backward(hs, params.label_head, Activation::kIdentity,
                                   hl.grad, logits, true);

  // Domain term D = mean_src L_d(o, 0) + mean_tgt L_d(o, 1) and its logit
  // gradients dD/dlogit = (o - d) / n.
  const auto os = domain_head_forward(grad_reverse_forward(hs), params.domain_weight,
                                      params.domain_bias);
  const auto ot = domain_head_forward(grad_reverse_forward(ht), params.domain_weight,
                                      params.domain_bias);
  double ds = 0.0, dt = 0.0;
  std::vector<double> gs(n), gt(nt);
  for (std::size_t i = 0; i < n; ++i) {
    const LossValue l = domain_loss(os[i], 0, clamp_eps);
    ds += l.value;
    gs[i] = l.grad[0] / static_cast<double>(n);
  }
  for (std::size_t i = 0; i < nt; ++i) {
    const LossValue l = domain_loss(ot[i], 1, clamp_eps);
    dt += l.value;
    gt[i] = l.grad[0] / static_cast<double>(nt);
  }
  obj.domain_loss = ds / static_cast<double>(n) + dt / static_cast<double>(nt);
  obj.value = obj.label_loss - lambda * obj.domain_loss;
  if (!std::isfinite(obj.value))
    fail(ErrorKind::kTraining, "non-finite objective");

  const std::size_t d = spec.feature_dim();
  std::vector<double> gu(d, 0.0);
  double gz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto h = hs.row(i);
    for (std::size_t j = 0; j < d; ++j) gu[j] += gs[i] * h[j];
    gz += gs[i];
  }
  for (std::size_t i = 0; i < nt; ++i) {
    const auto h = ht.row(i);
    for (std::size_t j = 0; j < d; ++j) gu[j] += gt[i] * h[j];
    gz += gt[i];
  }
  obj.grads.domain_weight.resize(d);
  for (std::size_t j = 0; j < d; ++j) obj.grads.domain_weight[j] = lambda * gu[j];
  obj.grads.domain_bias = lambda * gz;
  obj.grads.label_head =
      DenseLayer{std::move(head.grad_weight), std::move(head.grad_bias)};

  RealMatrix grad_hs = std::move(head.grad_input);
  if (lambda == 0.0) {
    obj.grads.feature_extractor =
        mlp_backward(params.feature_extractor, spec.activation, src, grad_hs,
                     OutputMode::kActivated);
    return obj;
  }
  // dD/dh = dD/dlogit * u, then through the reversal layer.
  RealMatrix dom_s(n, d), dom_t(nt, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) dom_s(i, j) = gs[i] * params.domain_weight[j];
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < d; ++j) dom_t(i, j) = gt[i] * params.domain_weight[j];
  const RealMatrix rev_s = grad_reverse(dom_s, lambda);
  for (std::size_t i = 0; i < grad_hs.size(); ++i)
    grad_hs.data()[i] += rev_s.data()[i];
  obj.grads.feature_extractor = mlp_backward(
      params.feature_extractor, spec.activation, src, grad_hs, OutputMode::kActivated);
  add_into(obj.grads.feature_extractor,
           mlp_backward(params.feature_extractor, spec.activation, tgt,
                        grad_reverse(dom_t, lambda), OutputMode::kActivated));
  return obj;
}

void dann_sgd_step(DannParams &params, const DannGrads &grads, std::size_t step,
                   const SgdConfig &config) {
  auto pv = param_views(params.feature_extractor);
  auto gv = grad_views(grads.feature_extractor);
  pv.push_back(params.label_head.weight.data());
  pv.push_back(params.label_head.bias);
  gv.push_back(grads.label_head.weight.data());
  gv.push_back(grads.label_head.bias);
  pv.push_back(params.domain_weight);
  gv.push_back(grads.domain_weight);
  pv.push_back(std::span<double>(&params.domain_bias, 1));
  gv.push_back(std::span<const double>(&grads.domain_bias, 1));
  sgd_step(pv, gv, step, config);
}

namespace {

double domain_accuracy(const DannParams &params, const RealMatrix &src,
                       const RealMatrix &tgt) {
  const auto os = predict_domain(params, src);
  const auto ot = predict_domain(params, tgt);
  std::size_t correct = 0;
  for (double o : os) correct += o < 0.5;
  for (double o : ot) correct += o >= 0.5;
  const std::size_t total = os.size() + ot.size();
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

ClassifierTrainResult train_classifier_rows(const LabeledRows &rows,
                                            const MlpSpec &spec, HeadKind head,
                                            const SgdConfig &sgd,
                                            std::size_t rows_per_batch,
                                            MultiLabelLoss multilabel_loss,
                                            double eps) {
  spec.validate();
  const std::size_t n = rows.x.rows();
  if (n == 0) fail(ErrorKind::kData, "training set is empty");
  check_input(rows.x, spec.input_dim, "training set");
  if (rows.y.size() != n)
    fail(ErrorKind::kData, n, " training rows but ", rows.y.size(), " labels");
  if (!rows.y.is_multi())
    for (std::size_t c : rows.y.classes)
      if (c >= spec.output_dim)
        fail(ErrorKind::kIndex, "label id ", c, " out of range for ",
             spec.output_dim, " classes");
  if (n < rows_per_batch)
    fail(ErrorKind::kData, "training set of ", n, " rows is smaller than a batch of ",
         rows_per_batch);

  ClassifierTrainResult result;
  result.params = init_params(spec, derive_seed(sgd.seed, "init"));
  Rng rng(derive_seed(sgd.seed, "source-batches"));
  const std::size_t steps = n / rows_per_batch;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < sgd.epochs; ++epoch) {
    const auto perm = rng.permutation(n);
    double total = 0.0;
    for (std::size_t s = 0; s < steps; ++s, ++step) {
      std::span<const std::size_t> idx(perm.data() + s * rows_per_batch,
                                       rows_per_batch);
      const MlpTrace trace = mlp_forward(result.params, spec.activation,
                                         gather_rows(rows.x, idx), OutputMode::kLinear);
      HeadLoss hl = head_loss(head, trace.output(), rows.y.subset(idx),
                              multilabel_loss, eps);
      if (!std::isfinite(hl.total))
        fail(ErrorKind::kTraining, "non-finite loss in epoch ", epoch);
      total += hl.total;
      const MlpGrads grads = mlp_backward(result.params, spec.activation, trace,
                                          hl.grad, OutputMode::kLinear);
      try {
        sgd_step(result.params, grads, step, sgd);
      } catch (const Error &e) {
        fail(e.kind(), "epoch ", epoch, ": ", e.what());
      }
    }
    result.epoch_loss.push_back(total /
                                static_cast<double>(steps * rows_per_batch));
  }
  return result;
}

}  // namespace

DannTrainResult train_dann(const LabeledRows &source, const RealMatrix &target,
                           const DannSpec &spec, const AdvTrainConfig &config,
                           const std::optional<DomainMonitor> &monitor) {
  spec.validate();
  config.validate();
  const std::size_t ns = source.x.rows();
  const std::size_t nt = target.rows();
  if (ns == 0) fail(ErrorKind::kData, "source domain is empty");
  if (nt == 0) fail(ErrorKind::kData, "target domain is empty");
  if (source.y.size() != ns)
    fail(ErrorKind::kData, ns, " source rows but ", source.y.size(), " labels");
  check_input(source.x, spec.input_dim, "source set");
  check_input(target, spec.input_dim, "target set");
  const std::size_t half = config.sgd.batch_size / 2;
  if (ns < half)
    fail(ErrorKind::kData, "source set of ", ns, " rows is smaller than half a batch");

  DannTrainResult result;
  result.params = init_dann(spec, config.sgd.seed);
  Rng src_rng(derive_seed(config.sgd.seed, "source-batches"));
  Rng tgt_rng(derive_seed(config.sgd.seed, "target-batches"));
  std::vector<std::size_t> tgt_perm = tgt_rng.permutation(nt);
  std::size_t tgt_pos = 0;

  const std::size_t steps = ns / half;
  const std::size_t total_steps = steps * config.sgd.epochs;
  std::size_t step = 0;
  std::vector<std::size_t> tidx(half);
  for (std::size_t epoch = 0; epoch < config.sgd.epochs; ++epoch) {
    const auto perm = src_rng.permutation(ns);
    EpochRecord rec;
    rec.epoch = epoch;
    double lambda = 0.0;
    for (std::size_t s = 0; s < steps; ++s, ++step) {
      std::span<const std::size_t> sidx(perm.data() + s * half, half);
      for (std::size_t i = 0; i < half; ++i) {
        if (tgt_pos == nt) {
          tgt_perm = tgt_rng.permutation(nt);
          tgt_pos = 0;
        }
        tidx[i] = tgt_perm[tgt_pos++];
      }
      DomainBatch batch{gather_rows(source.x, sidx), source.y.subset(sidx),
                        gather_rows(target, tidx)};
      lambda = lambda_at(config, static_cast<double>(step) /
                                     static_cast<double>(total_steps));
      try {
        DannObjective obj =
            dann_objective(batch, result.params, lambda,
                           config.multilabel_loss, config.clamp_eps);
        rec.label_loss += obj.label_loss;
        rec.domain_loss += obj.domain_loss;
        rec.degenerate_targets += obj.degenerate_targets;
        for (double &g : obj.grads.domain_weight) g *= config.domain_lr_scale;
        obj.grads.domain_bias *= config.domain_lr_scale;
        dann_sgd_step(result.params, obj.grads, step, config.sgd);
      } catch (const Error &e) {
        if (e.kind() != ErrorKind::kTraining) throw;
        fail(ErrorKind::kTraining, "diverged in epoch ", epoch, ": ", e.what());
      }
    }
    rec.label_loss /= static_cast<double>(steps);
    rec.domain_loss /= static_cast<double>(steps);
    rec.lambda = lambda;
    rec.learning_rate = learning_rate(config.sgd, step - 1);
    rec.domain_accuracy =
        monitor ? domain_accuracy(result.params, monitor->source_x, monitor->target_x)
                : domain_accuracy(result.params, source.x, target);
    result.history.push_back(rec);
  }
  return result;
}

ClassifierTrainResult train_classifier(const LabeledRows &rows,
                                       const MlpSpec &spec, HeadKind head,
                                       const SgdConfig &sgd,
                                       MultiLabelLoss multilabel_loss,
                                       double clamp_eps) {
  sgd.validate();
  return train_classifier_rows(rows, spec, head, sgd, sgd.batch_size,
                               multilabel_loss, clamp_eps);
}

ClassifierTrainResult train_source_classifier(const LabeledRows &source,
                                              const DannSpec &spec,
                                              const AdvTrainConfig &config) {
  spec.validate();
  config.validate();
  return train_classifier_rows(source, classifier_spec(spec), spec.head_kind,
                               config.sgd, config.sgd.batch_size / 2,
                               config.multilabel_loss, config.clamp_eps);
}

RealMatrix dann_features(const DannParams &params, const RealMatrix &x) {
  check_input(x, params.spec.input_dim, "input");
  return mlp_forward(params.feature_extractor, params.spec.activation, x,
                     OutputMode::kActivated)
      .output();
}

namespace {
RealMatrix probs_from_logits(RealMatrix logits, HeadKind head) {
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    if (head == HeadKind::kSoftmaxSingleLabel) {
      const auto p = softmax(row);
      std::copy(p.begin(), p.end(), row.begin());
    } else {
      for (double &v : row) v = sigmoid(v);
    }
  }
  return logits;
}
}  // namespace

RealMatrix predict_label_probs(const DannParams &params, const RealMatrix &x) {
  return probs_from_logits(
      dense_forward(dann_features(params, x), params.label_head, Activation::kIdentity),
      params.spec.head_kind);
}

RealMatrix phonetic_scores(const DannParams &params, const RealMatrix &x) {
  if (params.spec.head_kind != HeadKind::kSigmoidMultiLabel ||
      params.spec.output_dim != 14)
    fail(ErrorKind::kConfig,
         "phonetic scores need a 14-label sigmoid head, model has ",
         head_kind_name(params.spec.head_kind), " with ", params.spec.output_dim,
         " outputs");
  return predict_label_probs(params, x);
}

std::vector<double> predict_domain(const DannParams &params, const RealMatrix &x) {
  return domain_head_forward(dann_features(params, x), params.domain_weight,
                             params.domain_bias);
}

RealMatrix classifier_probs(const MlpParams &params, Activation activation,
                            HeadKind head, const RealMatrix &x) {
  if (params.layers.empty()) fail(ErrorKind::kConfig, "empty network");
  check_input(x, params.layers.front().in_dim(), "input");
  return probs_from_logits(
      mlp_forward(params, activation, x, OutputMode::kLinear).output(), head);
}

std::vector<std::size_t> argmax_rows(const RealMatrix &m) {
  std::vector<std::size_t> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    out[r] = static_cast<std::size_t>(
        std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

}  // namespace dannphone
