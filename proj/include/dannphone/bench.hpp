// include/dannphone/bench.hpp

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

// Acceptance fixtures and the checks run by the acceptance test binary and
// `dannphone synth-bench`. Every tolerance lives in bench.cpp.

#ifndef DANNPHONE_BENCH_HPP_
#define DANNPHONE_BENCH_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dannphone/config.hpp"
#include "dannphone/dann.hpp"
#include "dannphone/dataset.hpp"
#include "dannphone/pipeline.hpp"

namespace dannphone {

/// Single-label network and training schedule used on the standard synth
/// fixture. The extractor ends in a narrow layer.
struct SynthDannSetup {
  DannSpec spec;
  AdvTrainConfig config;  // lambda is the adapted value
};
SynthDannSetup synth_dann_setup();

/// Lambda grid searched by reverse cross-validation on the synth fixture.
std::vector<RcvPoint> synth_rcv_grid();

/// Pipeline settings for the synth-phonetics corpus.
ExperimentConfig synth_pipeline_config(std::uint64_t seed);

/// Train and test draws of the standard synth fixture, normalized with
/// statistics pooled over both training domains.
struct SynthBenchDomains {
  LabeledDataset source, target, source_test, target_test;
};
SynthBenchDomains synth_bench_domains(std::uint64_t seed);

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;  // no timings, so reports compare across runs
  double seconds = 0.0;
};

struct BenchOptions {
  std::uint64_t seed = 0;            // seeds seed .. seed + n_seeds - 1
  std::size_t n_seeds = 5;
  std::vector<int> only;             // criterion ids; empty runs 2 through 10
  std::filesystem::path work_dir;    // scratch files; empty uses the temp dir
};

inline constexpr int kFirstCriterion = 2;
inline constexpr int kLastCriterion = 10;

CriterionResult run_criterion(int id, const BenchOptions &options);

std::vector<CriterionResult> run_acceptance(
    const BenchOptions &options,
    const std::function<void(const CriterionResult &)> &on_result = {});

/// One line: "AC<n> PASS|FAIL <title>: <detail> [<seconds> s]".
std::string format_criterion(const CriterionResult &r);

/// Report document without timings, so reruns compare equal byte for byte.
Json bench_report(const std::vector<CriterionResult> &results, const BenchOptions &options);

}  // namespace dannphone

#endif  // DANNPHONE_BENCH_HPP_
