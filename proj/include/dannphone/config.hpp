// include/dannphone/config.hpp

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

// JSON forms of configs, reports and run results. Readers are strict:
// unknown keys, wrong types and bad enum names raise schema errors naming
// the dotted key path. Missing keys keep their defaults.

#ifndef DANNPHONE_CONFIG_HPP_
#define DANNPHONE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dannphone/dann.hpp"
#include "dannphone/divergence.hpp"
#include "dannphone/features.hpp"
#include "dannphone/pipeline.hpp"

namespace dannphone {

using Json = nlohmann::ordered_json;

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

/// Everything a CLI run needs. `seed` is the only source of randomness;
/// every SGD and probe seed is derived from it.
struct RunConfig {
  std::uint64_t seed = 0;
  FbankConfig frontend;
  ExperimentConfig experiment;
  std::string data_dir;   // corpus layout of corpus.hpp
  std::string spe_table;  // empty: the bundled table

  bool operator==(const RunConfig &) const = default;
};

Json to_json(const SgdConfig &c);
Json to_json(const AdvTrainConfig &c);
Json to_json(const DannSpec &s);
Json to_json(const FbankConfig &c);
Json to_json(const ProbeConfig &c);
Json to_json(const RcvPoint &p);
Json to_json(const ExperimentConfig &c);
Json to_json(const RunConfig &c);
Json to_json(const EvalReport &r);
Json to_json(const RcvResult &r);

SgdConfig sgd_config_from_json(const Json &j, const std::string &path = "sgd");
AdvTrainConfig adv_config_from_json(const Json &j, const std::string &path = "dann");
DannSpec dann_spec_from_json(const Json &j, const std::string &path = "spec");
FbankConfig fbank_config_from_json(const Json &j, const std::string &path = "frontend");
ExperimentConfig experiment_config_from_json(const Json &j,
                                             const std::string &path = "experiment");
/// Requires schema_version == kConfigSchemaVersion.
RunConfig run_config_from_json(const Json &j);
EvalReport eval_report_from_json(const Json &j, const std::string &path = "report");

/// Sets a dotted key, e.g. "experiment.dann.lambda=0.5". The value is parsed
/// as JSON and kept as a string when that fails. Missing objects on the path
/// are created; the strict reader then rejects keys that do not exist.
void apply_override(Json &doc, std::string_view assignment);

Json parse_json(std::string_view text, std::string_view origin = "<text>");
/// Reads a run config file and applies the overrides in order.
RunConfig load_run_config(const std::filesystem::path &path,
                          const std::vector<std::string> &overrides = {});

/// Two-space indented text with a trailing newline.
std::string dump_json(const Json &j);

/// Report document of an experiment run.
Json experiment_report(const ExperimentResult &r, std::string_view kind, std::uint64_t seed);

}  // namespace dannphone

#endif  // DANNPHONE_CONFIG_HPP_
