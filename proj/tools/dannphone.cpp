// tools/dannphone.cpp

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

#include <array>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dannphone/bench.hpp"
#include "dannphone/binio.hpp"
#include "dannphone/config.hpp"
#include "dannphone/corpus.hpp"
#include "dannphone/error.hpp"
#include "dannphone/features.hpp"
#include "dannphone/model_io.hpp"
#include "dannphone/phonetics.hpp"
#include "dannphone/pipeline.hpp"
#include "dannphone/synth.hpp"

namespace fs = std::filesystem;
using namespace dannphone;

namespace {

int g_verbosity = 0;

template <typename... Args>
void info(const Args &...args) {
  if (g_verbosity == 0) return;
  std::ostringstream os;
  (os << ... << args);
  std::cerr << os.str() << "\n";
}

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

PhoneticFeatureTable table_at(const std::string &path) {
  return load_spe_table(path.empty() ? default_spe_table_path() : fs::path(path));
}

struct RunOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string data;
  std::string out;
};

void add_run_options(CLI::App *cmd, RunOptions &o) {
  cmd->add_option("-c,--config", o.config, "run config (JSON, schema_version 1)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "override a config key, e.g. experiment.dann.lambda=0.5")
      ->take_all();
  cmd->add_option("--data", o.data, "corpus directory; overrides data_dir of the config");
  cmd->add_option("-o,--out", o.out, "output directory")->required();
}

struct LoadedRun {
  RunConfig cfg;
  ExperimentData data;
};

// A relative data_dir in the config is taken relative to the config file.
LoadedRun load_run(const RunOptions &o) {
  LoadedRun run;
  run.cfg = load_run_config(o.config, o.overrides);
  fs::path dir;
  if (!o.data.empty()) {
    dir = o.data;
  } else {
    if (run.cfg.data_dir.empty())
      fail(ErrorKind::kConfig, "no corpus: set data_dir in the config or pass --data");
    dir = run.cfg.data_dir;
    if (dir.is_relative()) dir = fs::path(o.config).parent_path() / dir;
  }
  info("corpus ", dir.string());
  run.data = load_corpus(dir, table_at(run.cfg.spe_table));
  return run;
}

HeadKind head_of(const std::string &name) {
  return name == "phone" ? HeadKind::kSoftmaxSingleLabel : HeadKind::kSigmoidMultiLabel;
}

Json versioned(std::string_view kind, std::uint64_t seed) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = kind;
  j["seed"] = seed;
  return j;
}

void write_json(const fs::path &path, const Json &j) {
  write_file_bytes(path, dump_json(j));
  info("wrote ", path.string());
}

void print_selection(const RcvResult &r) {
  for (std::size_t i = 0; i < r.table.size(); ++i) {
    const RcvRow &row = r.table[i];
    std::cout << (i == r.best ? "* " : "  ") << "lambda " << row.point.lambda << " lr0 "
              << row.point.lr0 << " reverse " << fmt("%.4f", row.reverse_score)
              << (row.degenerate ? " (degenerate)" : "") << "\n";
  }
}

// extract ------------------------------------------------------------------

struct ExtractOptions {
  std::vector<std::string> wavs;
  std::string out;
  std::string split = "source_train";
  std::string spe_table;
  std::string align_ext = ".phn";
  bool align_seconds = false;
  FbankConfig fbank;
  std::string window = "hamming";
};

int cmd_extract(ExtractOptions &o) {
  o.fbank.window = parse_window_kind(o.window);
  o.fbank.validate();
  const PhoneticFeatureTable table = table_at(o.spe_table);
  const PhoneInventory inventory = PhoneInventory::from_table(table);
  FeatureArchive archive;
  std::vector<UtteranceLabels> labels;
  std::vector<std::pair<std::string, std::string>> failures;
  std::set<std::string> seen;
  for (const std::string &wav : o.wavs) {
    try {
      const std::string id = fs::path(wav).stem().string();
      if (!seen.insert(id).second) fail(ErrorKind::kData, "duplicate utterance id ", id);
      const Utterance u = read_wav(wav);
      fs::path ali = wav;
      ali.replace_extension(o.align_ext);
      if (!fs::exists(ali)) fail(ErrorKind::kIo, "missing alignment ", ali.string());
      const auto segments =
          read_alignment(ali, o.align_seconds ? std::nullopt : std::optional(u.sample_rate));
      RealMatrix feat = fbank(u, o.fbank);
      const FrameTargets t = frame_targets(
          segments, frame_center_times(feat.rows(), o.fbank, u.sample_rate), table, inventory);
      UtteranceLabels l{id, {}};
      for (std::size_t p : t.phoneme_ids) l.phones.push_back(inventory.symbol(p));
      std::cout << id << " " << feat.rows() << "\n";
      archive.push_back({id, std::move(feat)});
      labels.push_back(std::move(l));
    } catch (const std::exception &e) {
      failures.emplace_back(wav, e.what());
    }
  }
  if (!archive.empty()) {
    fs::create_directories(o.out);
    write_archive(fs::path(o.out) / (o.split + ".farc"), archive);
    write_file_bytes(fs::path(o.out) / (o.split + ".ali"), encode_frame_labels(labels));
  }
  if (failures.empty()) return 0;
  std::cerr << "error: " << failures.size() << " of " << o.wavs.size() << " files failed\n";
  for (const auto &[path, what] : failures) std::cerr << "  " << path << ": " << what << "\n";
  return 1;
}

// validate-table -----------------------------------------------------------

int cmd_validate_table(const std::string &file) {
  const PhoneticFeatureTable t = table_at(file);
  std::size_t silent = 0;
  for (const auto &[phone, bits] : t.entries) silent += bits[kSilenceFeature];
  std::cout << "ok: " << t.phonemes.size() << " phones, " << kNumPhoneticFeatures << " features, "
            << silent << " silence\n";
  return 0;
}

// train-dann / rcv ---------------------------------------------------------

Json history_json(const std::vector<EpochRecord> &history) {
  Json a = Json::array();
  for (const EpochRecord &e : history)
    a.push_back({{"epoch", e.epoch},
                 {"label_loss", e.label_loss},
                 {"domain_loss", e.domain_loss},
                 {"domain_accuracy", e.domain_accuracy},
                 {"lambda", e.lambda},
                 {"learning_rate", e.learning_rate},
                 {"degenerate_targets", e.degenerate_targets}});
  return a;
}

int cmd_train_dann(const RunOptions &o, const std::string &head) {
  const LoadedRun run = load_run(o);
  info("training ", head, " dann");
  const DannStage s = train_dann_stage(run.cfg.experiment, run.data, head_of(head));
  fs::create_directories(o.out);
  DannModel m;
  m.params = s.dann;
  m.input = {true, s.norm, s.context};
  m.seed = run.cfg.seed;
  m.training = to_json(s.config);
  save_dann_model(fs::path(o.out) / "dann", m);
  Json j = versioned("dann_history", run.cfg.seed);
  j["head"] = head;
  if (s.selection) j["selection"] = to_json(*s.selection);
  j["epochs"] = history_json(s.history);
  write_json(fs::path(o.out) / "history.json", j);
  if (s.selection) print_selection(*s.selection);
  if (!s.history.empty()) {
    const EpochRecord &e = s.history.back();
    std::cout << "epoch " << e.epoch << " label loss " << fmt("%.4f", e.label_loss)
              << " domain accuracy " << fmt("%.4f", e.domain_accuracy) << "\n";
  }
  return 0;
}

int cmd_rcv(const RunOptions &o, const std::string &head) {
  const LoadedRun run = load_run(o);
  if (run.cfg.experiment.rcv_grid.empty())
    fail(ErrorKind::kConfig, "experiment.rcv.grid is empty");
  const DannStage s = train_dann_stage(run.cfg.experiment, run.data, head_of(head), true);
  fs::create_directories(o.out);
  Json j = versioned("rcv", run.cfg.seed);
  j["head"] = head;
  j["selected"] = to_json(s.selection->table[s.selection->best].point);
  j["selection"] = to_json(*s.selection);
  write_json(fs::path(o.out) / "rcv.json", j);
  print_selection(*s.selection);
  return 0;
}

// score --------------------------------------------------------------------

int cmd_score(const std::string &model, const std::string &features, const std::string &out) {
  const DannModel m = load_dann_model(model);
  const FeatureArchive scores = score_archive(m, read_archive(features));
  write_archive(out, scores);
  std::cout << scores.size() << " utterances scored, " << m.params.spec.output_dim
            << " columns\n";
  return 0;
}

// pipeline -----------------------------------------------------------------

constexpr std::array<std::string_view, 3> kArms{"proposed", "no_adaptation", "direct_dann"};

ExperimentResult run_arm(std::string_view arm, const ExperimentConfig &cfg,
                         const ExperimentData &d) {
  info("arm ", arm);
  if (arm == "proposed") return run_adaptation_experiment(cfg, d);
  if (arm == "no_adaptation") return run_no_adaptation_baseline(cfg, d);
  return run_direct_dann_baseline(cfg, d);
}

void print_eval(std::string_view name, const EvalReport &r) {
  std::cout << "  " << name << ": frames " << r.frames << ", frame error "
            << fmt("%.4f", r.frame_error_rate);
  if (r.approx_per) std::cout << ", approx PER " << fmt("%.4f", *r.approx_per);
  if (r.macro_f1_multilabel) std::cout << ", phonetic macro-F1 " << fmt("%.4f", *r.macro_f1_multilabel);
  if (r.domain_classifier_accuracy)
    std::cout << ", domain probe " << fmt("%.4f", *r.domain_classifier_accuracy);
  std::cout << "\n";
}

int cmd_pipeline(const RunOptions &o, const std::string &arm) {
  const LoadedRun run = load_run(o);
  const ExperimentConfig &cfg = run.cfg.experiment;
  const fs::path out = o.out;
  if (arm != "all") {
    const ExperimentResult r = run_arm(arm, cfg, run.data);
    fs::create_directories(out);
    write_experiment_artifacts(out, r, cfg, arm);
    std::cout << arm << "\n";
    print_eval("source_test", r.source_test);
    print_eval("target_test", r.target_test);
    return 0;
  }
  Json summary = versioned("pipeline_summary", run.cfg.seed);
  Json arms = Json::object();
  for (std::string_view a : kArms) {
    const ExperimentResult r = run_arm(a, cfg, run.data);
    fs::create_directories(out / a);
    write_experiment_artifacts(out / a, r, cfg, a);
    arms[std::string(a)] = {{"source_test", r.source_test.frame_error_rate},
                            {"target_test", r.target_test.frame_error_rate}};
    std::cout << a << "\n";
    print_eval("source_test", r.source_test);
    print_eval("target_test", r.target_test);
  }
  summary["frame_error_rate"] = arms;
  write_json(out / "summary.json", summary);
  return 0;
}

// synth-bench --------------------------------------------------------------

struct BenchCliOptions {
  std::uint64_t seed = 0;
  std::size_t seeds = 5;
  std::vector<int> only;
  std::string out = ".";
  std::string work_dir;
  std::string write_corpus;
};

int cmd_synth_bench(const BenchCliOptions &o) {
  if (!o.write_corpus.empty()) {
    const PhoneticFeatureTable table = table_at("");
    write_synth_corpus(gen_synth_phonetics(standard_phonetics_spec(o.seed), table), o.write_corpus);
    std::cout << "wrote synth-phonetics corpus for seed " << o.seed << " to " << o.write_corpus
              << "\n";
    return 0;
  }
  BenchOptions b;
  b.seed = o.seed;
  b.n_seeds = o.seeds;
  b.only = o.only;
  b.work_dir = o.work_dir;
  const auto results = run_acceptance(b, [](const CriterionResult &r) {
    std::cout << format_criterion(r) << std::endl;
  });
  const Json report = bench_report(results, b);
  fs::create_directories(o.out);
  write_json(fs::path(o.out) / "bench.json", report);
  return report["all_pass"].get<bool>() ? 0 : 1;
}

// report -------------------------------------------------------------------

std::string num(const Json &v) { return v.is_number() ? fmt("%.4f", v.get<double>()) : v.dump(); }

void render_eval(const std::string &name, const Json &j) {
  const EvalReport r = eval_report_from_json(j, name);
  print_eval(name, r);
}

void render(const fs::path &path) {
  const Json j = parse_json(read_file_bytes(path), path.string());
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    fail(ErrorKind::kSchema, path.string(), ": not a dannphone report (no kind)");
  const std::string kind = j["kind"];
  std::cout << path.string() << ": " << kind << ", seed " << j.value("seed", Json()).dump() << "\n";
  if (kind == "synth_bench") {
    for (const Json &c : j.at("criteria"))
      std::cout << "  AC" << c.at("id").get<int>() << " " << (c.at("pass").get<bool>() ? "PASS" : "FAIL")
                << " " << c.at("title").get<std::string>() << ": "
                << c.at("detail").get<std::string>() << "\n";
    std::cout << "  all pass: " << (j.at("all_pass").get<bool>() ? "yes" : "no") << "\n";
  } else if (kind == "pipeline_summary") {
    std::cout << "  frame error rate     source_test  target_test\n";
    for (const auto &[arm, v] : j.at("frame_error_rate").items())
      std::printf("  %-20s %11s  %11s\n", arm.c_str(), num(v.at("source_test")).c_str(),
                  num(v.at("target_test")).c_str());
  } else if (kind == "rcv" || kind == "dann_history") {
    if (j.contains("selection")) {
      const Json &s = j["selection"];
      const std::size_t best = s.at("best");
      for (std::size_t i = 0; i < s.at("table").size(); ++i) {
        const Json &row = s["table"][i];
        std::cout << (i == best ? "  * " : "    ") << "lambda " << num(row.at("lambda"))
                  << " lr0 " << num(row.at("lr0")) << " reverse " << num(row.at("reverse_score"))
                  << (row.at("degenerate").get<bool>() ? " (degenerate)" : "") << "\n";
      }
    }
    if (j.contains("epochs") && !j["epochs"].empty()) {
      const Json &e = j["epochs"].back();
      std::cout << "  " << j["epochs"].size() << " epochs; last label loss "
                << num(e.at("label_loss")) << ", domain accuracy " << num(e.at("domain_accuracy"))
                << "\n";
    }
  } else if (j.contains("source_test") && j.contains("target_test")) {
    if (j.contains("dims")) {
      std::cout << "  dims:";
      for (const auto &[k, v] : j["dims"].items()) std::cout << " " << k << "=" << v.dump();
      std::cout << "\n";
    }
    if (j.contains("selection"))
      std::cout << "  rcv selected grid point " << j["selection"].at("best").dump() << "\n";
    render_eval("source_test", j["source_test"]);
    render_eval("target_test", j["target_test"]);
  } else {
    fail(ErrorKind::kSchema, path.string(), ": unknown report kind ", kind);
  }
}

int cmd_report(const std::vector<std::string> &files) {
  for (const std::string &f : files) render(f);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"dannphone: domain-adversarial phonetic feature training"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", g_verbosity, "progress messages on stderr (repeat for more)");
  std::function<int()> action;

  ExtractOptions ex;
  auto *extract = app.add_subcommand("extract", "log-mel features and frame labels from WAV files");
  extract->add_option("wavs", ex.wavs, "16-bit PCM WAV files; the alignment sits next to each")
      ->required()
      ->check(CLI::ExistingFile);
  extract->add_option("-o,--out", ex.out, "output directory")->required();
  extract->add_option("--split", ex.split, "archive name, one of the corpus splits")
      ->check(CLI::IsMember(std::vector<std::string>(kSplitNames.begin(), kSplitNames.end())))
      ->capture_default_str();
  extract->add_option("--spe-table", ex.spe_table, "phonetic feature table (default: bundled)");
  extract->add_option("--align-ext", ex.align_ext, "alignment file extension")->capture_default_str();
  extract->add_flag("--align-seconds", ex.align_seconds,
                    "alignment times are seconds (default: sample indices)");
  extract->add_option("--filters", ex.fbank.n_filters, "mel filters")->capture_default_str();
  extract->add_option("--win-ms", ex.fbank.win_ms, "window length")->capture_default_str();
  extract->add_option("--hop-ms", ex.fbank.hop_ms, "frame shift")->capture_default_str();
  extract->add_option("--preemphasis", ex.fbank.preemphasis, "pre-emphasis coefficient")
      ->capture_default_str();
  extract->add_option("--window", ex.window, "hamming, hann or rectangular")->capture_default_str();
  extract->add_option("--mel-low", ex.fbank.mel_low, "lowest filter edge, Hz")->capture_default_str();
  extract->add_option("--mel-high", ex.fbank.mel_high, "highest filter edge, Hz (0: Nyquist)")
      ->capture_default_str();
  extract->add_option("--log-floor", ex.fbank.log_floor, "smallest log energy")
      ->capture_default_str();
  extract->callback([&] { action = [&] { return cmd_extract(ex); }; });

  std::string table_file;
  auto *vt = app.add_subcommand("validate-table", "check a phonetic feature table file");
  vt->add_option("file", table_file, "table file (default: bundled)");
  vt->callback([&] { action = [&] { return cmd_validate_table(table_file); }; });

  RunOptions train_o;
  std::string train_head = "phonetic";
  auto *train = app.add_subcommand("train-dann", "train the adversarial network of a run config");
  add_run_options(train, train_o);
  train->add_option("--head", train_head, "phonetic (multi-label) or phone (single-label)")
      ->check(CLI::IsMember({"phonetic", "phone"}))
      ->capture_default_str();
  train->callback([&] { action = [&] { return cmd_train_dann(train_o, train_head); }; });

  std::string model, features, scores_out;
  auto *score = app.add_subcommand("score", "network outputs for every utterance of an archive");
  score->add_option("-m,--model", model, "model prefix (<prefix>.manifest, <prefix>.bin)")->required();
  score->add_option("-f,--features", features, "static feature archive")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("-o,--out", scores_out, "output archive")->required();
  score->callback([&] { action = [&] { return cmd_score(model, features, scores_out); }; });

  RunOptions pipe_o;
  std::string arm = "proposed";
  auto *pipe = app.add_subcommand("pipeline", "train and evaluate a full run");
  add_run_options(pipe, pipe_o);
  pipe->add_option("--arm", arm, "proposed, no_adaptation, direct_dann or all")
      ->check(CLI::IsMember({"proposed", "no_adaptation", "direct_dann", "all"}))
      ->capture_default_str();
  pipe->callback([&] { action = [&] { return cmd_pipeline(pipe_o, arm); }; });

  RunOptions rcv_o;
  std::string rcv_head = "phonetic";
  auto *rcv = app.add_subcommand("rcv", "reverse cross-validation over experiment.rcv.grid");
  add_run_options(rcv, rcv_o);
  rcv->add_option("--head", rcv_head, "phonetic (multi-label) or phone (single-label)")
      ->check(CLI::IsMember({"phonetic", "phone"}))
      ->capture_default_str();
  rcv->callback([&] { action = [&] { return cmd_rcv(rcv_o, rcv_head); }; });

  BenchCliOptions bo;
  auto *bench = app.add_subcommand("synth-bench", "run the acceptance checks on synthetic data");
  bench->add_option("--seed", bo.seed, "first seed")->capture_default_str();
  bench->add_option("--seeds", bo.seeds, "seeds per multi-seed criterion")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--only", bo.only, "criterion ids, e.g. 3,4,8")
      ->delimiter(',')
      ->check(CLI::Range(kFirstCriterion, kLastCriterion));
  bench->add_option("-o,--out", bo.out, "directory for bench.json")->capture_default_str();
  bench->add_option("--work-dir", bo.work_dir, "scratch directory (default: system temp)");
  bench->add_option("--write-corpus", bo.write_corpus,
                    "only write the synth-phonetics corpus of --seed to this directory");
  bench->callback([&] { action = [&] { return cmd_synth_bench(bo); }; });

  std::vector<std::string> reports;
  auto *report = app.add_subcommand("report", "render report JSON files as text");
  report->add_option("files", reports, "report.json, summary.json, rcv.json, history.json or bench.json")
      ->required()
      ->check(CLI::ExistingFile);
  report->callback([&] { action = [&] { return cmd_report(reports); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    return action();
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
