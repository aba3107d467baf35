// include/dannphone/model_io.hpp

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

// Model files: <prefix>.manifest is a JSON document (schema version, kind,
// shapes, seed, training config, input transform shape) and <prefix>.bin
// holds every real in declared order as little-endian f64.
//
// Blob order for a dann: extractor layers (weight row-major, then bias),
// label head weight and bias, domain weight, domain bias, then the input
// normalization mean and inverse std. A phoneme dnn stores its layers, then
// the score normalization the same way.

#ifndef DANNPHONE_MODEL_IO_HPP_
#define DANNPHONE_MODEL_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dannphone/config.hpp"
#include "dannphone/dann.hpp"
#include "dannphone/dataset.hpp"
#include "dannphone/features.hpp"
#include "dannphone/pipeline.hpp"

namespace dannphone {

inline constexpr int kModelSchemaVersion = 1;

/// Static features -> network input: optional deltas, normalization (skipped
/// when empty), then ±context splicing, all per utterance.
struct InputTransform {
  bool deltas = true;
  NormStats norm;
  std::size_t context = 0;

  RealMatrix apply(const RealMatrix &x, const std::vector<FrameRange> &utterances) const;
  bool operator==(const InputTransform &) const = default;
};

struct DannModel {
  DannParams params;
  InputTransform input;
  std::uint64_t seed = 0;
  Json training = Json::object();  // the AdvTrainConfig used, for the record
  bool operator==(const DannModel &) const = default;
};

struct PhonemeDnnModel {
  PhonemeModel model;
  NormStats score_norm;  // applied to the phonetic scores before appending
  std::size_t context = 0;
  std::uint64_t seed = 0;
  Json training = Json::object();
};

void save_dann_model(const std::filesystem::path &prefix, const DannModel &m);
DannModel load_dann_model(const std::filesystem::path &prefix);

void save_phoneme_model(const std::filesystem::path &prefix, const PhonemeDnnModel &m);
PhonemeDnnModel load_phoneme_model(const std::filesystem::path &prefix);

/// Models of an experiment run, with the input transforms it used.
DannModel dann_model_of(const ExperimentResult &r, const ExperimentConfig &cfg);
PhonemeDnnModel phoneme_model_of(const ExperimentResult &r, const ExperimentConfig &cfg);

/// Writes <out>/dann.*, <out>/phoneme_dnn.* for the models the run trained,
/// and <out>/report.json.
void write_experiment_artifacts(const std::filesystem::path &out, const ExperimentResult &r,
                                const ExperimentConfig &cfg, std::string_view kind);

/// Per-utterance network outputs: phonetic scores for a multi-label model,
/// class posteriors otherwise.
FeatureArchive score_archive(const DannModel &m, const FeatureArchive &features);

std::filesystem::path manifest_path(const std::filesystem::path &prefix);
std::filesystem::path blob_path(const std::filesystem::path &prefix);

}  // namespace dannphone

#endif  // DANNPHONE_MODEL_IO_HPP_
