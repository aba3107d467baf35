// src/config.cpp

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

#include "dannphone/config.hpp"

#include <set>

#include "dannphone/binio.hpp"
#include "dannphone/error.hpp"

namespace dannphone {

namespace {

std::string join_path(const std::string &path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

// Reads the keys of one object, remembering which were consumed.
class Reader {
 public:
  Reader(const Json &j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(ErrorKind::kSchema, where(), " must be an object");
  }

  const Json *take(const char *key) {
    const auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  void number(const char *key, double &out) {
    if (const Json *v = take(key)) {
      if (!v->is_number()) bad(key, "a number");
      out = v->get<double>();
    }
  }
  void count(const char *key, std::size_t &out) {
    if (const Json *v = take(key)) {
      if (!v->is_number_unsigned()) bad(key, "a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void u64(const char *key, std::uint64_t &out) {
    if (const Json *v = take(key)) {
      if (!v->is_number_unsigned()) bad(key, "a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void flag(const char *key, bool &out) {
    if (const Json *v = take(key)) {
      if (!v->is_boolean()) bad(key, "true or false");
      out = v->get<bool>();
    }
  }
  void text(const char *key, std::string &out) {
    if (const Json *v = take(key)) {
      if (!v->is_string()) bad(key, "a string");
      out = v->get<std::string>();
    }
  }
  void counts(const char *key, std::vector<std::size_t> &out) {
    if (const Json *v = take(key)) {
      if (!v->is_array()) bad(key, "an array of non-negative integers");
      out.clear();
      for (const Json &e : *v) {
        if (!e.is_number_unsigned()) bad(key, "an array of non-negative integers");
        out.push_back(e.get<std::size_t>());
      }
    }
  }
  void optional_number(const char *key, std::optional<double> &out) {
    if (const Json *v = take(key)) {
      if (!v->is_number()) bad(key, "a number");
      out = v->get<double>();
    }
  }
  template <class E, class Parse>
  void choice(const char *key, E &out, Parse parse) {
    if (const Json *v = take(key)) {
      if (!v->is_string()) bad(key, "a string");
      try {
        out = parse(v->get<std::string>());
      } catch (const Error &e) {
        fail(ErrorKind::kSchema, join_path(path_, key), ": ", e.what());
      }
    }
  }
  template <class Fn>
  void object(const char *key, Fn &&fn) {
    if (const Json *v = take(key)) fn(*v, join_path(path_, key));
  }

  std::string where() const { return path_.empty() ? "<root>" : path_; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(ErrorKind::kSchema, "unknown key ", join_path(path_, it.key()));
  }

 private:
  [[noreturn]] void bad(const char *key, std::string_view what) const {
    fail(ErrorKind::kSchema, join_path(path_, key), " must be ", what);
  }

  const Json &j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

template <class T>
void checked(const T &value, const std::string &path) {
  try {
    value.validate();
  } catch (const Error &e) {
    fail(ErrorKind::kConfig, path, ": ", e.what());
  }
}

Json sizes_json(const std::vector<std::size_t> &v) {
  Json a = Json::array();
  for (std::size_t x : v) a.push_back(x);
  return a;
}

void read_sgd_into(Reader &r, SgdConfig &c) {
  r.number("lr0", c.lr0);
  r.choice("schedule", c.schedule, parse_lr_schedule);
  r.number("alpha", c.alpha);
  r.number("beta", c.beta);
  r.count("batch_size", c.batch_size);
  r.count("epochs", c.epochs);
}

void read_adv_into(Reader &r, AdvTrainConfig &c) {
  r.number("lambda", c.lambda);
  r.choice("lambda_schedule", c.lambda_schedule, parse_lambda_schedule);
  r.number("gamma", c.gamma);
  r.number("domain_lr_scale", c.domain_lr_scale);
  r.number("clamp_eps", c.clamp_eps);
  r.choice("multilabel_loss", c.multilabel_loss, parse_multilabel_loss);
  r.object("sgd", [&](const Json &j, const std::string &p) { c.sgd = sgd_config_from_json(j, p); });
}

Json adv_body(const AdvTrainConfig &c) {
  Json j;
  j["lambda"] = c.lambda;
  j["lambda_schedule"] = lambda_schedule_name(c.lambda_schedule);
  j["gamma"] = c.gamma;
  j["domain_lr_scale"] = c.domain_lr_scale;
  j["clamp_eps"] = c.clamp_eps;
  j["multilabel_loss"] = multilabel_loss_name(c.multilabel_loss);
  j["sgd"] = to_json(c.sgd);
  return j;
}

}  // namespace

Json to_json(const SgdConfig &c) {
  Json j;
  j["lr0"] = c.lr0;
  j["schedule"] = lr_schedule_name(c.schedule);
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  return j;
}

Json to_json(const AdvTrainConfig &c) { return adv_body(c); }

Json to_json(const DannSpec &s) {
  Json j;
  j["input_dim"] = s.input_dim;
  j["hidden_dims"] = sizes_json(s.hidden_dims);
  j["activation"] = activation_name(s.activation);
  j["head_kind"] = head_kind_name(s.head_kind);
  j["output_dim"] = s.output_dim;
  return j;
}

Json to_json(const FbankConfig &c) {
  Json j;
  j["n_filters"] = c.n_filters;
  j["win_ms"] = c.win_ms;
  j["hop_ms"] = c.hop_ms;
  j["preemphasis"] = c.preemphasis;
  j["window"] = window_kind_name(c.window);
  j["mel_low"] = c.mel_low;
  j["mel_high"] = c.mel_high;
  j["log_floor"] = c.log_floor;
  return j;
}

Json to_json(const ProbeConfig &c) {
  Json j;
  j["iterations"] = c.iterations;
  j["learning_rate"] = c.learning_rate;
  j["l2"] = c.l2;
  j["min_frames"] = c.min_frames;
  j["standardize"] = c.standardize;
  return j;
}

Json to_json(const RcvPoint &p) {
  Json j;
  j["lambda"] = p.lambda;
  j["lr0"] = p.lr0;
  j["hidden_dims"] = sizes_json(p.hidden_dims);
  return j;
}

Json to_json(const ExperimentConfig &c) {
  Json j;
  j["context"] = c.context;
  j["dann_spliced_input"] = c.dann_spliced_input;
  Json dann = adv_body(c.dann);
  dann["hidden_dims"] = sizes_json(c.dann_spec.hidden_dims);
  dann["activation"] = activation_name(c.dann_spec.activation);
  j["dann"] = dann;
  Json grid = Json::array();
  for (const RcvPoint &p : c.rcv_grid) grid.push_back(to_json(p));
  j["rcv"] = {{"grid", grid}, {"reverse_lambda", c.rcv_reverse_lambda}};
  j["phoneme_dnn"] = {{"hidden_dims", sizes_json(c.phoneme_spec.hidden_dims)},
                      {"activation", activation_name(c.phoneme_spec.activation)},
                      {"sgd", to_json(c.phoneme_sgd)}};
  j["probe"] = to_json(c.probe);
  return j;
}

Json to_json(const RunConfig &c) {
  Json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["seed"] = c.seed;
  j["data_dir"] = c.data_dir;
  j["spe_table"] = c.spe_table;
  j["frontend"] = to_json(c.frontend);
  j["experiment"] = to_json(c.experiment);
  return j;
}

Json to_json(const EvalReport &r) {
  Json j;
  j["frames"] = r.frames;
  j["frame_error_rate"] = r.frame_error_rate;
  if (r.approx_per) j["approx_per"] = *r.approx_per;
  if (r.macro_f1_multilabel) j["macro_f1_multilabel"] = *r.macro_f1_multilabel;
  if (r.domain_classifier_accuracy) j["domain_classifier_accuracy"] = *r.domain_classifier_accuracy;
  if (r.proxy_a_distance) j["proxy_a_distance"] = *r.proxy_a_distance;
  Json per = Json::object();
  for (const auto &[k, v] : r.per_class_accuracy) per[k] = v;
  j["per_class_accuracy"] = per;
  return j;
}

Json to_json(const RcvResult &r) {
  Json table = Json::array();
  for (const RcvRow &row : r.table) {
    Json e = to_json(row.point);
    e["reverse_score"] = row.reverse_score;
    e["degenerate"] = row.degenerate;
    table.push_back(e);
  }
  return {{"best", r.best}, {"table", table}};
}

SgdConfig sgd_config_from_json(const Json &j, const std::string &path) {
  SgdConfig c;
  Reader r(j, path);
  read_sgd_into(r, c);
  r.finish();
  checked(c, path);
  return c;
}

AdvTrainConfig adv_config_from_json(const Json &j, const std::string &path) {
  AdvTrainConfig c;
  Reader r(j, path);
  read_adv_into(r, c);
  r.finish();
  checked(c, path);
  return c;
}

DannSpec dann_spec_from_json(const Json &j, const std::string &path) {
  DannSpec s;
  Reader r(j, path);
  r.count("input_dim", s.input_dim);
  r.counts("hidden_dims", s.hidden_dims);
  r.choice("activation", s.activation, parse_activation);
  r.choice("head_kind", s.head_kind, parse_head_kind);
  r.count("output_dim", s.output_dim);
  r.finish();
  checked(s, path);
  return s;
}

FbankConfig fbank_config_from_json(const Json &j, const std::string &path) {
  FbankConfig c;
  Reader r(j, path);
  r.count("n_filters", c.n_filters);
  r.number("win_ms", c.win_ms);
  r.number("hop_ms", c.hop_ms);
  r.number("preemphasis", c.preemphasis);
  r.choice("window", c.window, parse_window_kind);
  r.number("mel_low", c.mel_low);
  r.number("mel_high", c.mel_high);
  r.number("log_floor", c.log_floor);
  r.finish();
  checked(c, path);
  return c;
}

ExperimentConfig experiment_config_from_json(const Json &j, const std::string &path) {
  ExperimentConfig c;
  Reader r(j, path);
  r.count("context", c.context);
  r.flag("dann_spliced_input", c.dann_spliced_input);
  r.object("dann", [&](const Json &d, const std::string &p) {
    Reader dr(d, p);
    read_adv_into(dr, c.dann);
    dr.counts("hidden_dims", c.dann_spec.hidden_dims);
    dr.choice("activation", c.dann_spec.activation, parse_activation);
    dr.finish();
  });
  r.object("rcv", [&](const Json &d, const std::string &p) {
    Reader rr(d, p);
    if (const Json *grid = rr.take("grid")) {
      if (!grid->is_array()) fail(ErrorKind::kSchema, p, ".grid must be an array");
      c.rcv_grid.clear();
      for (std::size_t i = 0; i < grid->size(); ++i) {
        RcvPoint pt;
        Reader gr((*grid)[i], p + ".grid[" + std::to_string(i) + "]");
        gr.number("lambda", pt.lambda);
        gr.number("lr0", pt.lr0);
        gr.counts("hidden_dims", pt.hidden_dims);
        gr.finish();
        c.rcv_grid.push_back(std::move(pt));
      }
    }
    rr.number("reverse_lambda", c.rcv_reverse_lambda);
    rr.finish();
  });
  r.object("phoneme_dnn", [&](const Json &d, const std::string &p) {
    Reader pr(d, p);
    pr.counts("hidden_dims", c.phoneme_spec.hidden_dims);
    pr.choice("activation", c.phoneme_spec.activation, parse_activation);
    pr.object("sgd", [&](const Json &s, const std::string &sp) {
      c.phoneme_sgd = sgd_config_from_json(s, sp);
    });
    pr.finish();
  });
  r.object("probe", [&](const Json &d, const std::string &p) {
    Reader pr(d, p);
    pr.count("iterations", c.probe.iterations);
    pr.number("learning_rate", c.probe.learning_rate);
    pr.number("l2", c.probe.l2);
    pr.count("min_frames", c.probe.min_frames);
    pr.flag("standardize", c.probe.standardize);
    pr.finish();
  });
  r.finish();
  checked(c, path);
  return c;
}

RunConfig run_config_from_json(const Json &j) {
  RunConfig c;
  Reader r(j, "");
  const Json *version = r.take("schema_version");
  if (!version) fail(ErrorKind::kSchema, "schema_version is required");
  if (!version->is_number_integer() || version->get<long long>() != kConfigSchemaVersion)
    fail(ErrorKind::kSchema, "schema_version ", version->dump(), " is not supported (expected ",
         kConfigSchemaVersion, ")");
  r.u64("seed", c.seed);
  r.text("data_dir", c.data_dir);
  r.text("spe_table", c.spe_table);
  r.object("frontend", [&](const Json &d, const std::string &p) {
    c.frontend = fbank_config_from_json(d, p);
  });
  r.object("experiment", [&](const Json &d, const std::string &p) {
    c.experiment = experiment_config_from_json(d, p);
  });
  r.finish();
  c.experiment.seed = c.seed;
  return c;
}

EvalReport eval_report_from_json(const Json &j, const std::string &path) {
  EvalReport rep;
  Reader r(j, path);
  r.count("frames", rep.frames);
  r.number("frame_error_rate", rep.frame_error_rate);
  r.optional_number("approx_per", rep.approx_per);
  r.optional_number("macro_f1_multilabel", rep.macro_f1_multilabel);
  r.optional_number("domain_classifier_accuracy", rep.domain_classifier_accuracy);
  r.optional_number("proxy_a_distance", rep.proxy_a_distance);
  r.object("per_class_accuracy", [&](const Json &d, const std::string &p) {
    if (!d.is_object()) fail(ErrorKind::kSchema, p, " must be an object");
    for (auto it = d.begin(); it != d.end(); ++it) {
      if (!it->is_number()) fail(ErrorKind::kSchema, join_path(p, it.key()), " must be a number");
      rep.per_class_accuracy[it.key()] = it->get<double>();
    }
  });
  r.finish();
  rep.validate();
  return rep;
}

void apply_override(Json &doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    fail(ErrorKind::kConfig, "override '", assignment, "' is not key=value");
  const std::string_view key = assignment.substr(0, eq);
  const std::string value(assignment.substr(eq + 1));
  Json *node = &doc;
  std::string walked;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part(key.substr(start, dot == std::string_view::npos ? key.npos : dot - start));
    if (part.empty()) fail(ErrorKind::kConfig, "override key '", key, "' has an empty segment");
    if (!node->is_object())
      fail(ErrorKind::kSchema, walked.empty() ? "<root>" : walked, " is not an object");
    walked = join_path(walked, part);
    if (dot == std::string_view::npos) {
      Json parsed = Json::parse(value, nullptr, false);
      (*node)[part] = parsed.is_discarded() ? Json(value) : std::move(parsed);
      return;
    }
    if (!node->contains(part)) (*node)[part] = Json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

Json parse_json(std::string_view text, std::string_view origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    fail(ErrorKind::kParse, origin, ": ", e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path &path,
                          const std::vector<std::string> &overrides) {
  Json doc = parse_json(read_file_bytes(path), path.string());
  for (const std::string &o : overrides) apply_override(doc, o);
  return run_config_from_json(doc);
}

std::string dump_json(const Json &j) { return j.dump(2) + "\n"; }

Json experiment_report(const ExperimentResult &r, std::string_view kind, std::uint64_t seed) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = kind;
  j["seed"] = seed;
  Json dims = Json::object();
  for (const auto &[k, v] : r.dims) dims[k] = v;
  j["dims"] = dims;
  if (r.selection) j["selection"] = to_json(*r.selection);
  j["source_test"] = to_json(r.source_test);
  j["target_test"] = to_json(r.target_test);
  return j;
}

}  // namespace dannphone
