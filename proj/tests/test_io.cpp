// tests/test_io.cpp

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

#include "dannphone/bench.hpp"
#include "dannphone/binio.hpp"
#include "dannphone/config.hpp"
#include "dannphone/corpus.hpp"
#include "dannphone/error.hpp"
#include "dannphone/model_io.hpp"
#include "dannphone/synth.hpp"
#include "test_util.hpp"

using namespace dannphone;
using dannphone::testing::random_matrix;
using dannphone::testing::temp_dir;

namespace {

Error error_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e;
  }
  FAIL("no error raised");
  return Error(ErrorKind::kIo, "");
}

bool mentions(const Error &e, const std::string &text) {
  return std::string(e.what()).find(text) != std::string::npos;
}

Json base_doc() {
  RunConfig c;
  c.seed = 11;
  c.experiment = synth_pipeline_config(11);
  return to_json(c);
}

DannModel random_model() {
  Rng rng(8);
  DannModel m;
  m.params = init_dann({6, {5, 4}, Activation::kTanh, HeadKind::kSigmoidMultiLabel, 3}, 2);
  for (auto &l : m.params.label_head.bias) l = rng.normal();
  m.params.domain_bias = 0.1 + 1e-17;
  m.input.norm.mean = {0.1, 0.2};
  m.input.norm.inv_std = {1.0 / 3.0, 7.0};
  m.input.context = 1;
  m.input.deltas = false;
  m.seed = 99;
  m.training = {{"lambda", 0.5}};
  return m;
}

const PhoneticFeatureTable &table() {
  static const PhoneticFeatureTable t = load_spe_table(default_spe_table_path());
  return t;
}

std::filesystem::path small_corpus(const std::string &name) {
  const auto dir = temp_dir(name);
  SynthPhoneticsSpec spec = standard_phonetics_spec(2);
  spec.train_utterances = 3;
  spec.test_utterances = 2;
  write_synth_corpus(gen_synth_phonetics(spec, table()), dir);
  return dir;
}

}  // namespace

TEST_CASE("run config round-trips through JSON") {
  const RunConfig c = run_config_from_json(base_doc());
  CHECK(c.seed == 11);
  CHECK(c.experiment.seed == 11);
  CHECK(to_json(c) == base_doc());
  RunConfig expect;
  expect.seed = 11;
  expect.experiment = synth_pipeline_config(11);
  CHECK(c == expect);
}

TEST_CASE("strict reader names the key path") {
  Json d = base_doc();
  d["experiment"]["dann"]["lamda"] = 1.0;
  Error e = error_of([&] { run_config_from_json(d); });
  CHECK(e.kind() == ErrorKind::kSchema);
  CHECK(mentions(e, "experiment.dann.lamda"));

  d = base_doc();
  d["experiment"]["context"] = "wide";
  e = error_of([&] { run_config_from_json(d); });
  CHECK(e.kind() == ErrorKind::kSchema);
  CHECK(mentions(e, "experiment.context"));

  d = base_doc();
  d["experiment"]["dann"]["activation"] = "swish";
  CHECK(error_of([&] { run_config_from_json(d); }).kind() == ErrorKind::kSchema);

  d = base_doc();
  d["experiment"]["phoneme_dnn"]["sgd"]["lr0"] = -1.0;
  e = error_of([&] { run_config_from_json(d); });
  CHECK(e.kind() == ErrorKind::kConfig);
  CHECK(mentions(e, "experiment.phoneme_dnn.sgd"));

  d = base_doc();
  d.erase("schema_version");
  CHECK(error_of([&] { run_config_from_json(d); }).kind() == ErrorKind::kSchema);
  d["schema_version"] = 2;
  CHECK(error_of([&] { run_config_from_json(d); }).kind() == ErrorKind::kSchema);
}

TEST_CASE("overrides") {
  Json d = base_doc();
  apply_override(d, "experiment.dann.lambda=0.25");
  apply_override(d, "experiment.dann.activation=relu");
  apply_override(d, "experiment.rcv.grid=[{\"lambda\":0.5}]");
  apply_override(d, "seed=4");
  const RunConfig c = run_config_from_json(d);
  CHECK(c.experiment.dann.lambda == 0.25);
  CHECK(c.experiment.dann_spec.activation == Activation::kRelu);
  REQUIRE(c.experiment.rcv_grid.size() == 1);
  CHECK(c.experiment.rcv_grid[0].lambda == 0.5);
  CHECK(c.experiment.seed == 4);
  CHECK(error_of([&] { apply_override(d, "seed"); }).kind() == ErrorKind::kConfig);
  CHECK(error_of([&] { apply_override(d, "a..b=1"); }).kind() == ErrorKind::kConfig);
  apply_override(d, "experiment.nope.deep=1");
  CHECK(mentions(error_of([&] { run_config_from_json(d); }), "experiment.nope"));
}

TEST_CASE("shipped configs load") {
  const RunConfig c = load_run_config(std::filesystem::path(DANNPHONE_SOURCE_DIR) / "configs/synth.json");
  CHECK(c.experiment == synth_pipeline_config(0));
  const RunConfig r =
      load_run_config(std::filesystem::path(DANNPHONE_SOURCE_DIR) / "configs/synth_rcv.json");
  CHECK(r.experiment.rcv_grid == synth_rcv_grid());
}

TEST_CASE("eval report round-trip") {
  EvalReport r;
  r.frames = 10;
  r.frame_error_rate = 0.3;
  r.approx_per = 0.5;
  r.per_class_accuracy = {{"iy", 0.25}, {"sil", 1.0}};
  CHECK(eval_report_from_json(to_json(r)) == r);
  Json bad = to_json(r);
  bad["frame_error_rate"] = 1.5;
  CHECK_THROWS_AS(eval_report_from_json(bad), Error);
}

TEST_CASE("dann model round-trip is bit exact") {
  const auto dir = temp_dir("io_model");
  const DannModel m = random_model();
  save_dann_model(dir / "m", m);
  CHECK(load_dann_model(dir / "m") == m);
  const std::string blob = read_file_bytes(blob_path(dir / "m"));
  std::filesystem::create_directories(dir / "again");
  save_dann_model(dir / "again/m", load_dann_model(dir / "m"));
  CHECK(read_file_bytes(blob_path(dir / "again/m")) == blob);
  CHECK(read_file_bytes(manifest_path(dir / "again/m")) == read_file_bytes(manifest_path(dir / "m")));

  write_file_bytes(blob_path(dir / "m"), blob + "12345678");
  CHECK(error_of([&] { load_dann_model(dir / "m"); }).kind() == ErrorKind::kFormat);
  write_file_bytes(blob_path(dir / "m"), blob.substr(0, blob.size() - 8));
  CHECK(error_of([&] { load_dann_model(dir / "m"); }).kind() == ErrorKind::kParse);
  CHECK_THROWS_AS(load_phoneme_model(dir / "again/m"), Error);
}

TEST_CASE("phoneme model round-trip") {
  const auto dir = temp_dir("io_phoneme");
  Rng rng(3);
  const RealMatrix x = random_matrix(rng, 40, 4);
  std::vector<std::size_t> y(40);
  for (auto &v : y) v = rng.index(3);
  SgdConfig sgd;
  sgd.epochs = 2;
  PhonemeDnnModel m;
  m.model = train_phoneme_dnn(x, y, 3, {{5}, Activation::kTanh}, sgd);
  m.score_norm = {{0.5}, {2.0}};
  m.context = 2;
  m.seed = 5;
  save_phoneme_model(dir / "p", m);
  const PhonemeDnnModel back = load_phoneme_model(dir / "p");
  CHECK(back.model.params == m.model.params);
  CHECK(back.model.activation == m.model.activation);
  CHECK(back.score_norm == m.score_norm);
  CHECK(back.context == 2);
  CHECK(back.seed == 5);
}

TEST_CASE("input transform and score archive") {
  Rng rng(4);
  DannModel m;
  m.params = init_dann({45, {4}, Activation::kTanh, HeadKind::kSigmoidMultiLabel, 14}, 1);
  m.input = {true, {}, 2};
  const FeatureArchive in{{"a", random_matrix(rng, 5, 3)}, {"b", random_matrix(rng, 1, 3)}};
  const FeatureArchive out = score_archive(m, in);
  REQUIRE(out.size() == 2);
  CHECK(out[0].id == "a");
  CHECK(out[0].features.rows() == 5);
  CHECK(out[0].features.cols() == 14);
  CHECK(out[1].features.rows() == 1);
  CHECK(m.input.apply(in[0].features, {}).cols() == 45);
  const FeatureArchive wrong{{"c", random_matrix(rng, 5, 4)}};
  CHECK(error_of([&] { score_archive(m, wrong); }).kind() == ErrorKind::kDimension);
}

TEST_CASE("frame label files") {
  const std::vector<UtteranceLabels> l{{"u1", {"sil", "iy", "iy"}}, {"u2", {"s"}}};
  CHECK(parse_frame_labels(encode_frame_labels(l)) == l);
  CHECK(error_of([] { parse_frame_labels("u1 sil\nu2\n"); }).kind() == ErrorKind::kParse);
}

TEST_CASE("corpus loading and its errors") {
  const auto dir = small_corpus("io_corpus");
  const ExperimentData d = load_corpus(dir, table());
  CHECK(d.source_train.utterances.size() == 3);
  CHECK(d.source_test.utterances.size() == 2);
  CHECK(d.target_train.utterances.size() == 3);
  CHECK(d.inventory.size() == standard_phonetics_spec(0).phones.size());
  CHECK(d.source_train.multilabel_targets);
  for (Domain x : d.target_test.domain) CHECK(x == Domain::kTarget);

  const std::string ali = read_file_bytes(dir / "source_test.ali");
  auto labels = parse_frame_labels(ali);
  labels[0].id = "renamed";
  write_file_bytes(dir / "source_test.ali", encode_frame_labels(labels));
  CHECK(error_of([&] { load_corpus(dir, table()); }).kind() == ErrorKind::kAlignment);
  labels = parse_frame_labels(ali);
  labels[1].phones.pop_back();
  write_file_bytes(dir / "source_test.ali", encode_frame_labels(labels));
  CHECK(error_of([&] { load_corpus(dir, table()); }).kind() == ErrorKind::kAlignment);
  labels = parse_frame_labels(ali);
  labels[1].phones[0] = "zz";
  write_file_bytes(dir / "source_test.ali", encode_frame_labels(labels));
  CHECK(error_of([&] { load_corpus(dir, table()); }).kind() == ErrorKind::kLookup);
  std::filesystem::remove(dir / "source_test.ali");
  CHECK(error_of([&] { load_corpus(dir, table()); }).kind() == ErrorKind::kIo);
}
