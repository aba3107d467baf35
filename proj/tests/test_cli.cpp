// tests/test_cli.cpp

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

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "dannphone/binio.hpp"
#include "dannphone/config.hpp"
#include "dannphone/features.hpp"
#include "test_util.hpp"

using namespace dannphone;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run cli(const std::string &args) {
  static const fs::path tmp = testing::temp_dir("cli_io");
  const std::string cmd = std::string(DANNPHONE_CLI) + " " + args + " > " + (tmp / "out").string() +
                          " 2> " + (tmp / "err").string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file_bytes(tmp / "out");
  r.err = read_file_bytes(tmp / "err");
  return r;
}

bool has(const std::string &s, const std::string &part) { return s.find(part) != std::string::npos; }

const std::string kConfig = std::string(DANNPHONE_SOURCE_DIR) + "/configs/synth.json";
const std::string kQuick =
    " --set experiment.dann.sgd.epochs=2 experiment.phoneme_dnn.sgd.epochs=2"
    " experiment.dann.hidden_dims=[16] experiment.phoneme_dnn.hidden_dims=[16]";

const fs::path &corpus() {
  static const fs::path dir = [] {
    const fs::path d = testing::temp_dir("cli_corpus");
    REQUIRE(cli("synth-bench --seed 1 --write-corpus " + d.string()).code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("help lists every subcommand and flag") {
  const Run r = cli("--help");
  CHECK(r.code == 0);
  for (const char *sub : {"extract", "validate-table", "train-dann", "score", "pipeline", "rcv",
                          "synth-bench", "report"})
    CHECK_MESSAGE(has(r.out, sub), sub);
  const Run p = cli("pipeline --help");
  for (const char *flag : {"--config", "--set", "--data", "--out", "--arm"})
    CHECK_MESSAGE(has(p.out, flag), flag);
  const Run e = cli("extract --help");
  for (const char *flag : {"--filters", "--win-ms", "--hop-ms", "--window", "--split", "--align-ext"})
    CHECK_MESSAGE(has(e.out, flag), flag);
  CHECK(cli("").code == 1);
  CHECK(cli("pipeline --bogus").code == 1);
}

TEST_CASE("extract: one second gives 98 frames, reruns are identical, missing alignment fails") {
  const fs::path dir = testing::temp_dir("cli_extract");
  std::vector<double> s(16000);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = 0.3 * std::sin(2 * std::numbers::pi * 300 * i / 16000.0);
  write_wav(dir / "utt1.wav", s, 16000);
  write_file_bytes(dir / "utt1.phn", "0 4000 h#\n4000 9000 iy\n9000 16000 s\n");
  write_wav(dir / "utt2.wav", s, 16000);

  Run r = cli("extract -o " + (dir / "a").string() + " " + (dir / "utt1.wav").string());
  CHECK(r.code == 0);
  CHECK(has(r.out, "utt1 98"));
  const FeatureArchive a = read_archive(dir / "a/source_train.farc");
  REQUIRE(a.size() == 1);
  CHECK(a[0].features.rows() == 98);
  CHECK(a[0].features.cols() == 23);
  const std::string ali = read_file_bytes(dir / "a/source_train.ali");
  CHECK(has(ali, "utt1 sil"));
  CHECK(has(ali, " iy "));

  CHECK(cli("extract -o " + (dir / "b").string() + " " + (dir / "utt1.wav").string()).code == 0);
  CHECK(read_file_bytes(dir / "a/source_train.farc") == read_file_bytes(dir / "b/source_train.farc"));
  CHECK(read_file_bytes(dir / "a/source_train.ali") == read_file_bytes(dir / "b/source_train.ali"));

  r = cli("extract --split target_test -o " + (dir / "c").string() + " " + (dir / "utt1.wav").string() +
          " " + (dir / "utt2.wav").string());
  CHECK(r.code == 1);
  CHECK(has(r.err, "1 of 2 files failed"));
  CHECK(has(r.err, "utt2.wav"));
  CHECK(read_archive(dir / "c/target_test.farc").size() == 1);
}

TEST_CASE("validate-table") {
  CHECK(cli("validate-table").code == 0);
  const fs::path dir = testing::temp_dir("cli_table");
  write_file_bytes(dir / "t.txt", "phone vocalic\nsil 1\n");
  const Run r = cli("validate-table " + (dir / "t.txt").string());
  CHECK(r.code == 1);
  CHECK(has(r.err, "error: schema error"));
}

TEST_CASE("pipeline report has source and target sections") {
  const fs::path out = testing::temp_dir("cli_pipeline");
  const Run r = cli("pipeline -c " + kConfig + " --data " + corpus().string() + " -o " + out.string() + kQuick);
  REQUIRE(r.code == 0);
  const Json j = parse_json(read_file_bytes(out / "report.json"));
  CHECK(j.at("kind") == "proposed");
  CHECK(j.at("source_test").at("frames").get<int>() > 0);
  CHECK(j.at("target_test").at("frames").get<int>() > 0);
  CHECK(j.at("dims").at("spliced") == 913);
  CHECK(fs::exists(out / "dann.manifest"));
  CHECK(fs::exists(out / "phoneme_dnn.bin"));
  const Run rep = cli("report " + (out / "report.json").string());
  CHECK(rep.code == 0);
  CHECK(has(rep.out, "source_test"));
  CHECK(has(rep.out, "target_test"));
}

TEST_CASE("rcv with a singleton grid selects that point") {
  const fs::path out = testing::temp_dir("cli_rcv");
  const Run r = cli("rcv -c " + kConfig + " --data " + corpus().string() + " -o " + out.string() + kQuick +
                    " 'experiment.rcv.grid=[{\"lambda\":0.4,\"lr0\":0.02}]'");
  REQUIRE(r.code == 0);
  const Json j = parse_json(read_file_bytes(out / "rcv.json"));
  CHECK(j.at("selected").at("lambda") == 0.4);
  CHECK(j.at("selected").at("lr0") == 0.02);
  CHECK(j.at("selection").at("best") == 0);
  CHECK(cli("rcv -c " + kConfig + " --data " + corpus().string() + " -o " + out.string()).code == 1);
}

TEST_CASE("train-dann then score") {
  const fs::path out = testing::temp_dir("cli_train");
  Run r = cli("train-dann -c " + kConfig + " --data " + corpus().string() + " -o " + out.string() + kQuick);
  REQUIRE(r.code == 0);
  const Json h = parse_json(read_file_bytes(out / "history.json"));
  CHECK(h.at("epochs").size() == 2);
  r = cli("score -m " + (out / "dann").string() + " -f " + (corpus() / "target_test.farc").string() +
          " -o " + (out / "scores.farc").string());
  REQUIRE(r.code == 0);
  const FeatureArchive scores = read_archive(out / "scores.farc");
  const FeatureArchive feats = read_archive(corpus() / "target_test.farc");
  REQUIRE(scores.size() == feats.size());
  CHECK(scores[0].features.cols() == 14);
  CHECK(scores[0].features.rows() == feats[0].features.rows());
}

TEST_CASE("config errors name the key and exit 1") {
  const fs::path out = testing::temp_dir("cli_bad");
  const Run r = cli("pipeline -c " + kConfig + " --data " + corpus().string() + " -o " + out.string() +
                    " --set experiment.dann.sgd.lr=0.1");
  CHECK(r.code == 1);
  CHECK(has(r.err, "error: schema error"));
  CHECK(has(r.err, "experiment.dann.sgd.lr"));
  CHECK(cli("pipeline -c " + kConfig + " -o " + out.string()).code == 1);
}

TEST_CASE("synth-bench is deterministic") {
  const fs::path a = testing::temp_dir("cli_bench_a"), b = testing::temp_dir("cli_bench_b");
  const Run ra = cli("synth-bench --seed 7 --only 3,4,8 -o " + a.string());
  const Run rb = cli("synth-bench --seed 7 --only 3,4,8 -o " + b.string());
  CHECK(ra.code == 0);
  CHECK(rb.code == 0);
  CHECK(has(ra.out, "AC3 PASS"));
  CHECK(has(ra.out, "AC8 PASS"));
  const std::string ja = read_file_bytes(a / "bench.json");
  CHECK(ja == read_file_bytes(b / "bench.json"));
  CHECK(parse_json(ja).at("criteria").size() == 3);
  CHECK(cli("report " + (a / "bench.json").string()).code == 0);
}
