// dannphone/synth.hpp

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

// Synthetic domain-shift corpora with known generators. The target domain is
// an affine image of the source generator: x_t = R x_s + t (+ noise), where R
// rotates consecutive coordinate planes (0,1), (2,3), ...

#ifndef DANNPHONE_SYNTH_HPP_
#define DANNPHONE_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dannphone/dataset.hpp"
#include "dannphone/matrix.hpp"
#include "dannphone/phonetics.hpp"
#include "dannphone/rng.hpp"

namespace dannphone {

enum class LabelMode { kSingle, kMultiLabel };

struct DomainTransform {
  std::vector<double> rotation_deg;  // per plane; one value applies to all planes
  std::vector<double> translation;   // empty means zero
  double noise_scale = 0.0;

  bool operator==(const DomainTransform &) const = default;
};

struct SynthSpec {
  std::size_t n_classes = 5;
  std::size_t dim = 10;
  std::size_t components_per_class = 2;
  std::vector<double> class_weights;  // empty means uniform
  double class_spread = 2.0;          // sd of class centers
  double component_spread = 0.5;      // sd of components around their center
  double sigma = 1.0;                 // within-component scale
  double anisotropy = 0.3;            // 0 gives isotropic components
  DomainTransform transform;
  std::size_t frames_per_domain = 2000;
  LabelMode label_mode = LabelMode::kSingle;
  std::vector<std::string> phones;    // multi-label mode: one phone per class
  std::uint64_t geometry_seed = 1;    // mixture layout
  std::uint64_t seed = 0;             // draws

  void validate() const;
  bool operator==(const SynthSpec &) const = default;
};

struct MixtureComponent {
  std::size_t label = 0;
  double weight = 0.0;  // absolute, all components sum to 1
  std::vector<double> mean;
  RealMatrix cov;
};

/// Component list of one domain's generator.
std::vector<MixtureComponent> domain_mixture(const SynthSpec &spec, Domain domain);

/// Dense rotation matrix of dimension d for the given plane angles.
RealMatrix rotation_matrix(std::size_t dim, const std::vector<double> &angles_deg);

/// Applies the transform to the rows of x; the noise draws come from rng.
RealMatrix apply_transform(const RealMatrix &x, const DomainTransform &t, Rng *rng);

/// Both domains fully labeled; target labels are for evaluation only. In
/// multi-label mode the targets come from the table rows of spec.phones.
std::pair<LabeledDataset, LabeledDataset> gen_domains(
    const SynthSpec &spec, const PhoneticFeatureTable *table = nullptr);

/// Class posterior of every row under the domain's generator.
RealMatrix bayes_oracle(const SynthSpec &spec, const RealMatrix &x,
                        Domain domain = Domain::kSource);

/// K=5, d=10, 2000 frames per domain, 30 degree rotation of every plane and a
/// translation of 2 sigma along every coordinate.
SynthSpec standard_synth_spec(std::uint64_t seed);

struct SynthPhoneticsSpec {
  std::vector<std::string> phones;     // inventory, distinct feature vectors
  std::size_t dim = 23;
  std::size_t train_utterances = 40;   // per domain
  std::size_t test_utterances = 20;
  std::size_t segments_min = 6;
  std::size_t segments_max = 12;
  std::size_t frames_min = 4;          // per segment
  std::size_t frames_max = 12;
  double feature_scale = 1.0;          // emitter mean is sum of per-feature loadings
  double phone_scale = 0.3;            // extra per-phone offset
  double sigma = 1.0;
  double smoothing = 0.6;              // AR(1) coefficient of the frame noise
  double silence_prob = 0.15;          // chance of a silence segment between phones
  DomainTransform transform;
  std::uint64_t geometry_seed = 1;
  std::uint64_t seed = 0;

  void validate(const PhoneticFeatureTable &table) const;
};

struct SynthPhoneticsCorpus {
  PhoneInventory inventory;
  LabeledDataset source_train, source_test, target_train, target_test;
  // Utterance ids in frame order for the four splits.
  std::vector<std::string> source_train_ids, source_test_ids, target_train_ids, target_test_ids;
};

/// Utterances of segments rendered frame by frame; every split comes with
/// phone ids and phonetic targets, the latter looked up in the table.
SynthPhoneticsCorpus gen_synth_phonetics(const SynthPhoneticsSpec &spec,
                                         const PhoneticFeatureTable &table);

SynthPhoneticsSpec standard_phonetics_spec(std::uint64_t seed);

/// Writes <dir>/<split>.farc and <dir>/<split>.ali (one line per utterance:
/// id followed by the frame phones) for the four splits.
void write_synth_corpus(const SynthPhoneticsCorpus &corpus, const std::filesystem::path &dir);

}  // namespace dannphone

#endif  // DANNPHONE_SYNTH_HPP_
