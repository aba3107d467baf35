// src/pipeline.cpp

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

#include "dannphone/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "dannphone/error.hpp"
#include "dannphone/rng.hpp"

namespace dannphone {

RealMatrix append_scores(const RealMatrix &acoustic, const RealMatrix &scores) {
  if (acoustic.rows() != scores.rows())
    fail(ErrorKind::kDimension, "cannot append ", scores.rows(), " score rows to ",
         acoustic.rows(), " acoustic rows");
  return hconcat(acoustic, scores);
}

RealMatrix per_utterance(const RealMatrix &x, const std::vector<FrameRange> &ranges,
                         const std::function<RealMatrix(const RealMatrix &)> &fn) {
  if (ranges.empty()) return fn(x);
  RealMatrix out;
  std::vector<double> data;
  std::size_t cols = 0;
  for (const FrameRange &r : ranges) {
    if (r.end > x.rows() || r.begin >= r.end)
      fail(ErrorKind::kData, "utterance range [", r.begin, ", ", r.end, ") outside ",
           x.rows(), " frames");
    std::vector<std::size_t> rows(r.end - r.begin);
    std::iota(rows.begin(), rows.end(), r.begin);
    const RealMatrix block = fn(gather_rows(x, rows));
    if (block.rows() != rows.size())
      fail(ErrorKind::kDimension, "per-utterance transform changed the frame count");
    if (data.empty()) cols = block.cols();
    data.insert(data.end(), block.values().begin(), block.values().end());
  }
  return RealMatrix(x.rows(), cols, std::move(data));
}

PhonemeModel train_phoneme_dnn(const RealMatrix &x, const std::vector<std::size_t> &ids,
                               std::size_t n_phones, const PhonemeDnnSpec &spec,
                               const SgdConfig &sgd) {
  if (ids.size() != x.rows())
    fail(ErrorKind::kData, x.rows(), " frames but ", ids.size(), " phone ids");
  for (std::size_t id : ids)
    if (id >= n_phones)
      fail(ErrorKind::kIndex, "phone id ", id, " out of range for ", n_phones, " phones");
  const MlpSpec mlp{x.cols(), spec.hidden_dims, spec.activation, n_phones};
  ClassifierTrainResult r =
      train_classifier({x, Labels::single(ids)}, mlp, HeadKind::kSoftmaxSingleLabel, sgd);
  return {std::move(r.params), spec.activation, std::move(r.epoch_loss)};
}

std::vector<std::size_t> predict_phonemes(const PhonemeModel &model, const RealMatrix &x) {
  return argmax_rows(
      classifier_probs(model.params, model.activation, HeadKind::kSoftmaxSingleLabel, x));
}

void EvalReport::validate() const {
  auto rate = [](std::string_view name, double v) {
    if (!(v >= 0.0 && v <= 1.0))
      fail(ErrorKind::kEvaluation, name, " = ", v, " is not a rate in [0, 1]");
  };
  rate("frame_error_rate", frame_error_rate);
  for (const auto &[k, v] : per_class_accuracy) rate("per_class_accuracy", v);
  if (macro_f1_multilabel) rate("macro_f1_multilabel", *macro_f1_multilabel);
  if (domain_classifier_accuracy) rate("domain_classifier_accuracy", *domain_classifier_accuracy);
  if (proxy_a_distance && !(*proxy_a_distance >= 0.0 && *proxy_a_distance <= 2.0))
    fail(ErrorKind::kEvaluation, "proxy_a_distance = ", *proxy_a_distance, " outside [0, 2]");
  if (approx_per && !(*approx_per >= 0.0))
    fail(ErrorKind::kEvaluation, "approx_per = ", *approx_per, " is negative");
}

double macro_f1(const RealMatrix &scores, const RealMatrix &targets, double threshold) {
  if (scores.rows() != targets.rows() || scores.cols() != targets.cols())
    fail(ErrorKind::kDimension, "macro_f1 shapes differ");
  if (scores.cols() == 0) fail(ErrorKind::kMetric, "macro_f1 needs at least one label");
  double sum = 0.0;
  for (std::size_t j = 0; j < scores.cols(); ++j) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.rows(); ++i) {
      const bool p = scores(i, j) >= threshold, y = targets(i, j) > 0.5;
      tp += p && y;
      fp += p && !y;
      fn += !p && y;
    }
    // A label absent from both prediction and reference counts as perfect.
    const std::size_t denom = 2 * tp + fp + fn;
    sum += denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  }
  return sum / static_cast<double>(scores.cols());
}

std::size_t edit_distance(const std::vector<std::size_t> &a, const std::vector<std::size_t> &b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace {

std::vector<std::size_t> collapse(const std::vector<std::size_t> &frames,
                                  std::optional<std::size_t> silence) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0 && frames[i] == frames[i - 1]) continue;
    out.push_back(frames[i]);
  }
  if (silence) std::erase(out, *silence);
  return out;
}

}  // namespace

double approx_per(const std::vector<std::size_t> &frame_preds, const std::vector<std::size_t> &ref,
                  std::optional<std::size_t> silence_id) {
  std::vector<std::size_t> r = ref;
  if (silence_id) std::erase(r, *silence_id);
  if (r.empty()) fail(ErrorKind::kMetric, "approx_per needs a non-empty reference");
  return static_cast<double>(edit_distance(collapse(frame_preds, silence_id), r)) /
         static_cast<double>(r.size());
}

EvalReport evaluate(const EvalInput &in) {
  if (!in.data) fail(ErrorKind::kEvaluation, "nothing to evaluate");
  const LabeledDataset &data = *in.data;
  if (!data.phoneme_ids) fail(ErrorKind::kEvaluation, "evaluation data has no phone labels");
  const auto &ref = *data.phoneme_ids;
  if (in.predicted.size() != ref.size())
    fail(ErrorKind::kDimension, in.predicted.size(), " predictions for ", ref.size(), " frames");
  if (ref.empty()) fail(ErrorKind::kEvaluation, "evaluation data is empty");
  EvalReport rep;
  rep.frames = ref.size();
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> per;  // id -> (correct, total)
  std::size_t errors = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const bool ok = in.predicted[i] == ref[i];
    errors += !ok;
    auto &c = per[ref[i]];
    c.first += ok;
    ++c.second;
  }
  rep.frame_error_rate = static_cast<double>(errors) / static_cast<double>(ref.size());
  for (const auto &[id, c] : per) {
    const std::string name = in.inventory && id < in.inventory->size()
                                 ? in.inventory->symbol(id)
                                 : std::to_string(id);
    rep.per_class_accuracy[name] = static_cast<double>(c.first) / static_cast<double>(c.second);
  }
  if (in.phonetic_scores && data.multilabel_targets)
    rep.macro_f1_multilabel = macro_f1(*in.phonetic_scores, *data.multilabel_targets);

  if (in.inventory) {
    const PhoneFolding fold = fold_inventory(*in.inventory);
    const auto sil = fold.folded.find(kSilencePhone);
    std::vector<FrameRange> utts = data.utterances;
    if (utts.empty()) utts.push_back({0, ref.size()});
    std::size_t edits = 0, ref_len = 0;
    for (const FrameRange &u : utts) {
      std::vector<std::size_t> hyp_frames, ref_frames;
      for (std::size_t t = u.begin; t < u.end; ++t) {
        const auto r = ref[t] < fold.map.size() ? fold.map[ref[t]] : std::nullopt;
        if (!r) continue;
        ref_frames.push_back(*r);
        const auto p = in.predicted[t] < fold.map.size() ? fold.map[in.predicted[t]]
                                                         : std::nullopt;
        if (p) hyp_frames.push_back(*p);
      }
      const auto r_seq = collapse(ref_frames, sil);
      edits += edit_distance(collapse(hyp_frames, sil), r_seq);
      ref_len += r_seq.size();
    }
    if (ref_len > 0) rep.approx_per = static_cast<double>(edits) / static_cast<double>(ref_len);
  }
  rep.validate();
  return rep;
}

DannSpec with_point(const DannSpec &spec, const RcvPoint &p) {
  DannSpec s = spec;
  if (!p.hidden_dims.empty()) s.hidden_dims = p.hidden_dims;
  return s;
}

AdvTrainConfig with_point(const AdvTrainConfig &cfg, const RcvPoint &p) {
  AdvTrainConfig c = cfg;
  c.lambda = p.lambda;
  c.sgd.lr0 = p.lr0;
  return c;
}

double label_accuracy(const DannParams &params, const LabeledRows &rows) {
  const RealMatrix probs = predict_label_probs(params, rows.x);
  if (rows.y.size() != probs.rows())
    fail(ErrorKind::kData, probs.rows(), " rows but ", rows.y.size(), " labels");
  if (probs.rows() == 0) fail(ErrorKind::kEvaluation, "no rows to score");
  if (!rows.y.is_multi()) {
    const auto pred = argmax_rows(probs);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == rows.y.classes[i];
    return static_cast<double>(ok) / static_cast<double>(pred.size());
  }
  std::size_t ok = 0;
  for (std::size_t i = 0; i < probs.size(); ++i)
    ok += (probs.data()[i] >= 0.5) == (rows.y.bits.data()[i] > 0.5);
  return static_cast<double>(ok) / static_cast<double>(probs.size());
}

namespace {

/// Self-labels from a trained model; nullopt when they collapse to one class.
std::optional<Labels> self_label(const DannParams &params, const RealMatrix &x) {
  const RealMatrix probs = predict_label_probs(params, x);
  if (params.spec.head_kind == HeadKind::kSoftmaxSingleLabel) {
    auto ids = argmax_rows(probs);
    if (std::set<std::size_t>(ids.begin(), ids.end()).size() < 2) return std::nullopt;
    return Labels::single(std::move(ids));
  }
  RealMatrix bits(probs.rows(), probs.cols());
  for (std::size_t i = 0; i < probs.size(); ++i) bits.data()[i] = probs.data()[i] >= 0.5;
  bool varied = false;
  for (std::size_t r = 1; r < bits.rows() && !varied; ++r)
    varied = !std::equal(bits.row(r).begin(), bits.row(r).end(), bits.row(0).begin());
  if (!varied) return std::nullopt;
  return Labels::multi(std::move(bits));
}

}  // namespace

RcvResult reverse_cross_validation(const std::vector<RcvPoint> &grid, const LabeledRows &source,
                                   const RealMatrix &target, const DannSpec &base_spec,
                                   const AdvTrainConfig &base_config, std::uint64_t seed,
                                   double reverse_lambda) {
  if (grid.empty()) fail(ErrorKind::kConfig, "reverse cross-validation grid is empty");
  if (!(reverse_lambda >= 0.0)) fail(ErrorKind::kConfig, "reverse lambda must be >= 0");
  const std::size_t n = source.x.rows();
  if (source.y.size() != n) fail(ErrorKind::kData, n, " source rows but ", source.y.size(), " labels");
  const auto n_val = static_cast<std::size_t>(std::llround(kRcvValidationFraction * static_cast<double>(n)));
  if (n_val == 0 || n_val == n)
    fail(ErrorKind::kInsufficientData, "source set of ", n, " rows is too small to hold out ",
         "a validation split");
  Rng rng(derive_seed(seed, "rcv-split"));
  const auto perm = rng.permutation(n);
  const std::vector<std::size_t> val_idx(perm.begin(), perm.begin() + static_cast<long>(n_val));
  const std::vector<std::size_t> train_idx(perm.begin() + static_cast<long>(n_val), perm.end());
  const LabeledRows train{gather_rows(source.x, train_idx), source.y.subset(train_idx)};
  const LabeledRows val{gather_rows(source.x, val_idx), source.y.subset(val_idx)};

  RcvResult result;
  for (const RcvPoint &p : grid) {
    const DannSpec spec = with_point(base_spec, p);
    AdvTrainConfig cfg = with_point(base_config, p);
    RcvRow row;
    row.point = p;
    cfg.sgd.seed = derive_seed(seed, "rcv-forward");
    row.forward = train_dann(train, target, spec, cfg).params;
    if (auto labels = self_label(row.forward, target)) {
      cfg.sgd.seed = derive_seed(seed, "rcv-reverse");
      cfg.lambda = reverse_lambda;
      const DannParams reverse = train_dann({target, std::move(*labels)}, train.x, spec, cfg).params;
      row.reverse_score = label_accuracy(reverse, val);
    } else {
      row.degenerate = true;
    }
    result.table.push_back(std::move(row));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < result.table.size(); ++i) {
    const RcvRow &r = result.table[i];
    if (!r.degenerate && r.reverse_score > best) {
      best = r.reverse_score;
      result.best = i;
    }
  }
  return result;
}

void ExperimentConfig::validate() const {
  if (dann_spec.hidden_dims.empty())
    fail(ErrorKind::kConfig, "dann.hidden_dims needs at least one layer");
  if (phoneme_spec.hidden_dims.empty())
    fail(ErrorKind::kConfig, "phoneme_dnn.hidden_dims needs at least one layer");
  dann.validate();
  phoneme_sgd.validate();
  if (!(rcv_reverse_lambda >= 0.0)) fail(ErrorKind::kConfig, "rcv.reverse_lambda must be >= 0");
  for (const RcvPoint &p : rcv_grid) {
    if (!(p.lambda >= 0.0)) fail(ErrorKind::kConfig, "rcv grid lambda must be >= 0");
    if (!(p.lr0 > 0.0)) fail(ErrorKind::kConfig, "rcv grid lr0 must be positive");
  }
}

ExperimentData experiment_data(const LabeledDataset &source_train, const LabeledDataset &source_test,
                               const LabeledDataset &target_train, const LabeledDataset &target_test,
                               PhoneInventory inventory) {
  return {source_train, target_train.unlabeled(), source_test, target_test, std::move(inventory)};
}

namespace {

// The four splits after deltas and normalization.
struct Acoustic {
  RealMatrix source_train, target_train, source_test, target_test;
  NormStats norm;
  std::size_t static_dim = 0;
};

Acoustic acoustic_features(const ExperimentData &d) {
  Acoustic a;
  a.static_dim = d.source_train.features.cols();
  with_stage("deltas", [&] {
    a.source_train = per_utterance(d.source_train.features, d.source_train.utterances, add_deltas);
    a.target_train = per_utterance(d.target_train.features, d.target_train.utterances, add_deltas);
    a.source_test = per_utterance(d.source_test.features, d.source_test.utterances, add_deltas);
    a.target_test = per_utterance(d.target_test.features, d.target_test.utterances, add_deltas);
  });
  with_stage("normalize", [&] {
    a.norm = normalize_fit(vconcat(a.source_train, a.target_train));
    a.source_train = normalize_apply(a.source_train, a.norm);
    a.target_train = normalize_apply(a.target_train, a.norm);
    a.source_test = normalize_apply(a.source_test, a.norm);
    a.target_test = normalize_apply(a.target_test, a.norm);
  });
  return a;
}

RealMatrix splice(const RealMatrix &x, const std::vector<FrameRange> &utts, std::size_t k) {
  return per_utterance(x, utts, [k](const RealMatrix &m) { return splice_context(m, k); });
}

void check_data(const ExperimentData &d) {
  d.source_train.validate();
  d.source_test.validate();
  d.target_test.validate();
  if (!d.source_train.phoneme_ids) fail(ErrorKind::kData, "source train split has no phone ids");
  if (d.inventory.size() == 0) fail(ErrorKind::kData, "experiment has an empty phone inventory");
}

// Applies the rcv selection (when a grid is configured) to spec and adv.
void select_point(const ExperimentConfig &cfg, const LabeledRows &source, const RealMatrix &target,
                  DannSpec &spec, AdvTrainConfig &adv, std::string_view stream,
                  std::optional<RcvResult> &selection) {
  if (cfg.rcv_grid.empty()) return;
  selection = with_stage("rcv", [&] {
    return reverse_cross_validation(cfg.rcv_grid, source, target, spec, adv,
                                    derive_seed(cfg.seed, std::string(stream) + "-rcv"),
                                    cfg.rcv_reverse_lambda);
  });
  const RcvPoint &p = selection->table[selection->best].point;
  spec = with_point(spec, p);
  adv = with_point(adv, p);
}

DannTrainResult train_selected(const ExperimentConfig &cfg, const LabeledRows &source,
                               const RealMatrix &target, DannSpec spec, std::string_view stream,
                               std::optional<RcvResult> &selection, AdvTrainConfig &used) {
  AdvTrainConfig adv = cfg.dann;
  select_point(cfg, source, target, spec, adv, stream, selection);
  adv.sgd.seed = derive_seed(cfg.seed, stream);
  used = adv;
  return train_dann(source, target, spec, adv);
}

ProbeConfig seeded_probe(const ExperimentConfig &cfg) {
  ProbeConfig p = cfg.probe;
  p.seed = cfg.seed;
  return p;
}

EvalReport evaluate_split(const PhonemeModel &model, const RealMatrix &x,
                          const LabeledDataset &data, const PhoneInventory &inv,
                          const RealMatrix *scores) {
  return evaluate({predict_phonemes(model, x), &data, &inv, scores});
}

}  // namespace

DannStage train_dann_stage(const ExperimentConfig &cfg, const ExperimentData &d, HeadKind head,
                           bool select_only) {
  cfg.validate();
  check_data(d);
  const bool multi = head == HeadKind::kSigmoidMultiLabel;
  if (multi && !d.source_train.multilabel_targets)
    fail(ErrorKind::kData, "source train split has no phonetic targets");
  DannStage out;
  const Acoustic a = acoustic_features(d);
  out.norm = a.norm;
  out.context = !multi || cfg.dann_spliced_input ? cfg.context : 0;
  const RealMatrix in_st = out.context ? splice(a.source_train, d.source_train.utterances, out.context)
                                       : a.source_train;
  const RealMatrix in_tt = out.context ? splice(a.target_train, d.target_train.utterances, out.context)
                                       : a.target_train;
  DannSpec spec = cfg.dann_spec;
  spec.input_dim = in_st.cols();
  spec.head_kind = head;
  spec.output_dim = multi ? kNumPhoneticFeatures : d.inventory.size();
  const Labels y = multi ? Labels::multi(*d.source_train.multilabel_targets)
                         : Labels::single(*d.source_train.phoneme_ids);
  const std::string_view stream = multi ? "phonetic-dann" : "phone-dann";
  if (select_only) {
    if (cfg.rcv_grid.empty()) fail(ErrorKind::kConfig, "rcv.grid is empty");
    out.config = cfg.dann;
    with_stage(stream, [&] {
      select_point(cfg, {in_st, y}, in_tt, spec, out.config, stream, out.selection);
    });
    out.config.sgd.seed = derive_seed(cfg.seed, stream);
    return out;
  }
  DannTrainResult r = with_stage(stream, [&] {
    return train_selected(cfg, {in_st, y}, in_tt, spec, stream, out.selection, out.config);
  });
  out.dann = std::move(r.params);
  out.history = std::move(r.history);
  return out;
}

ExperimentResult run_adaptation_experiment(const ExperimentConfig &cfg,
                                           const ExperimentData &d) {
  cfg.validate();
  check_data(d);
  if (!d.source_train.multilabel_targets)
    fail(ErrorKind::kData, "source train split has no phonetic targets");
  ExperimentResult res;
  const Acoustic a = acoustic_features(d);
  res.norm = a.norm;
  res.dims["static"] = a.static_dim;
  res.dims["deltas"] = a.source_train.cols();
  const std::size_t k = cfg.context;

  RealMatrix in_st, in_tt, in_ss, in_ts;
  with_stage("dann-input", [&] {
    if (cfg.dann_spliced_input) {
      in_st = splice(a.source_train, d.source_train.utterances, k);
      in_tt = splice(a.target_train, d.target_train.utterances, k);
      in_ss = splice(a.source_test, d.source_test.utterances, k);
      in_ts = splice(a.target_test, d.target_test.utterances, k);
    } else {
      in_st = a.source_train, in_tt = a.target_train;
      in_ss = a.source_test, in_ts = a.target_test;
    }
  });
  res.dims["dann_input"] = in_st.cols();
  res.dann_context = cfg.dann_spliced_input ? k : 0;

  DannSpec spec = cfg.dann_spec;
  spec.input_dim = in_st.cols();
  spec.head_kind = HeadKind::kSigmoidMultiLabel;
  spec.output_dim = kNumPhoneticFeatures;
  res.dann = with_stage("phonetic-dann", [&] {
    return train_selected(cfg, {in_st, Labels::multi(*d.source_train.multilabel_targets)}, in_tt,
                          spec, "phonetic-dann", res.selection, res.dann_config)
        .params;
  });

  RealMatrix s_st, s_tt, s_ss, s_ts;
  with_stage("scores", [&] {
    s_st = phonetic_scores(res.dann, in_st);
    s_tt = phonetic_scores(res.dann, in_tt);
    s_ss = phonetic_scores(res.dann, in_ss);
    s_ts = phonetic_scores(res.dann, in_ts);
  });
  res.dims["scores"] = s_st.cols();

  RealMatrix x_st, x_ss, x_ts;
  with_stage("append", [&] {
    // Scores get the same pooled standardization as the acoustic columns.
    res.score_norm = normalize_fit(vconcat(s_st, s_tt));
    x_st = append_scores(a.source_train, normalize_apply(s_st, res.score_norm));
    x_ss = append_scores(a.source_test, normalize_apply(s_ss, res.score_norm));
    x_ts = append_scores(a.target_test, normalize_apply(s_ts, res.score_norm));
  });
  res.dims["appended"] = x_st.cols();
  with_stage("splice", [&] {
    x_st = splice(x_st, d.source_train.utterances, k);
    x_ss = splice(x_ss, d.source_test.utterances, k);
    x_ts = splice(x_ts, d.target_test.utterances, k);
  });
  res.dims["spliced"] = x_st.cols();

  SgdConfig sgd = cfg.phoneme_sgd;
  sgd.seed = derive_seed(cfg.seed, "phoneme-dnn");
  res.phoneme_model = with_stage("phoneme-dnn", [&] {
    return train_phoneme_dnn(x_st, *d.source_train.phoneme_ids, d.inventory.size(),
                             cfg.phoneme_spec, sgd);
  });

  with_stage("evaluate", [&] {
    res.source_test = evaluate_split(res.phoneme_model, x_ss, d.source_test, d.inventory, &s_ss);
    res.target_test = evaluate_split(res.phoneme_model, x_ts, d.target_test, d.inventory, &s_ts);
    const DomainProbeResult probe =
        domain_probe(dann_features(res.dann, in_ss), dann_features(res.dann, in_ts), seeded_probe(cfg));
    for (EvalReport *r : {&res.source_test, &res.target_test}) {
      r->domain_classifier_accuracy = probe.heldout_accuracy;
      r->proxy_a_distance = probe.proxy_a_distance;
    }
  });
  return res;
}

ExperimentResult run_no_adaptation_baseline(const ExperimentConfig &cfg,
                                            const ExperimentData &d) {
  cfg.validate();
  check_data(d);
  ExperimentResult res;
  const Acoustic a = acoustic_features(d);
  res.norm = a.norm;
  res.dims["static"] = a.static_dim;
  res.dims["deltas"] = a.source_train.cols();
  const RealMatrix x_st = splice(a.source_train, d.source_train.utterances, cfg.context);
  const RealMatrix x_ss = splice(a.source_test, d.source_test.utterances, cfg.context);
  const RealMatrix x_ts = splice(a.target_test, d.target_test.utterances, cfg.context);
  res.dims["spliced"] = x_st.cols();
  SgdConfig sgd = cfg.phoneme_sgd;
  sgd.seed = derive_seed(cfg.seed, "phoneme-dnn");
  res.phoneme_model = with_stage("phoneme-dnn", [&] {
    return train_phoneme_dnn(x_st, *d.source_train.phoneme_ids, d.inventory.size(),
                             cfg.phoneme_spec, sgd);
  });
  with_stage("evaluate", [&] {
    res.source_test = evaluate_split(res.phoneme_model, x_ss, d.source_test, d.inventory, nullptr);
    res.target_test = evaluate_split(res.phoneme_model, x_ts, d.target_test, d.inventory, nullptr);
  });
  return res;
}

ExperimentResult run_direct_dann_baseline(const ExperimentConfig &cfg,
                                          const ExperimentData &d) {
  cfg.validate();
  check_data(d);
  ExperimentResult res;
  const Acoustic a = acoustic_features(d);
  res.norm = a.norm;
  const std::size_t k = cfg.context;
  const RealMatrix x_st = splice(a.source_train, d.source_train.utterances, k);
  const RealMatrix x_tt = splice(a.target_train, d.target_train.utterances, k);
  const RealMatrix x_ss = splice(a.source_test, d.source_test.utterances, k);
  const RealMatrix x_ts = splice(a.target_test, d.target_test.utterances, k);
  res.dims["spliced"] = x_st.cols();
  res.dann_context = k;
  DannSpec spec = cfg.dann_spec;
  spec.input_dim = x_st.cols();
  spec.head_kind = HeadKind::kSoftmaxSingleLabel;
  spec.output_dim = d.inventory.size();
  res.dann = with_stage("phone-dann", [&] {
    return train_selected(cfg, {x_st, Labels::single(*d.source_train.phoneme_ids)}, x_tt, spec,
                          "phone-dann", res.selection, res.dann_config)
        .params;
  });
  with_stage("evaluate", [&] {
    res.source_test = evaluate(
        {argmax_rows(predict_label_probs(res.dann, x_ss)), &d.source_test, &d.inventory, nullptr});
    res.target_test = evaluate(
        {argmax_rows(predict_label_probs(res.dann, x_ts)), &d.target_test, &d.inventory, nullptr});
    const DomainProbeResult probe =
        domain_probe(dann_features(res.dann, x_ss), dann_features(res.dann, x_ts), seeded_probe(cfg));
    for (EvalReport *r : {&res.source_test, &res.target_test}) {
      r->domain_classifier_accuracy = probe.heldout_accuracy;
      r->proxy_a_distance = probe.proxy_a_distance;
    }
  });
  return res;
}

}  // namespace dannphone
