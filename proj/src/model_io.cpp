// src/model_io.cpp

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

#include "dannphone/model_io.hpp"

#include "dannphone/binio.hpp"
#include "dannphone/error.hpp"

namespace dannphone {

namespace {

std::filesystem::path with_suffix(const std::filesystem::path &prefix, const char *suffix) {
  return prefix.string() + suffix;
}

void put_layer(std::string &blob, const DenseLayer &l) {
  put_f64s(blob, l.weight.values());
  put_f64s(blob, l.bias);
}

DenseLayer get_layer(ByteReader &r, std::size_t in, std::size_t out) {
  DenseLayer l{RealMatrix(out, in), std::vector<double>(out)};
  r.f64s(l.weight.data());
  r.f64s(l.bias);
  return l;
}

void put_norm(std::string &blob, const NormStats &n) {
  put_f64s(blob, n.mean);
  put_f64s(blob, n.inv_std);
}

NormStats get_norm(ByteReader &r, std::size_t dim) {
  NormStats n{std::vector<double>(dim), std::vector<double>(dim)};
  r.f64s(n.mean);
  r.f64s(n.inv_std);
  return n;
}

Json read_manifest(const std::filesystem::path &prefix, std::string_view kind) {
  const auto path = manifest_path(prefix);
  Json j = parse_json(read_file_bytes(path), path.string());
  if (!j.is_object() || !j.contains("schema_version") ||
      j["schema_version"] != kModelSchemaVersion)
    fail(ErrorKind::kSchema, path.string(), ": unsupported or missing schema_version");
  if (!j.contains("kind") || j["kind"] != kind)
    fail(ErrorKind::kSchema, path.string(), ": expected a ", kind, " manifest");
  return j;
}

template <class T>
T field(const Json &j, const char *key, const std::filesystem::path &prefix) {
  if (!j.contains(key)) fail(ErrorKind::kSchema, manifest_path(prefix).string(), ": missing ", key);
  try {
    return j[key].get<T>();
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorKind::kSchema, manifest_path(prefix).string(), ": bad ", key, ": ", e.what());
  }
}

void finish_blob(const ByteReader &r, const std::filesystem::path &prefix) {
  if (!r.done())
    fail(ErrorKind::kFormat, blob_path(prefix).string(), ": ", r.remaining(),
         " trailing bytes after the declared parameters");
}

}  // namespace

std::filesystem::path manifest_path(const std::filesystem::path &prefix) {
  return with_suffix(prefix, ".manifest");
}
std::filesystem::path blob_path(const std::filesystem::path &prefix) {
  return with_suffix(prefix, ".bin");
}

RealMatrix InputTransform::apply(const RealMatrix &x,
                                 const std::vector<FrameRange> &utterances) const {
  RealMatrix y = deltas ? per_utterance(x, utterances, add_deltas) : x;
  if (!norm.mean.empty()) y = normalize_apply(y, norm);
  if (context == 0) return y;
  const std::size_t k = context;
  return per_utterance(y, utterances, [k](const RealMatrix &m) { return splice_context(m, k); });
}

void save_dann_model(const std::filesystem::path &prefix, const DannModel &m) {
  const DannParams &p = m.params;
  Json j;
  j["schema_version"] = kModelSchemaVersion;
  j["kind"] = "dann";
  j["spec"] = to_json(p.spec);
  j["seed"] = m.seed;
  j["input"] = {{"deltas", m.input.deltas},
                {"context", m.input.context},
                {"norm_dim", m.input.norm.mean.size()}};
  j["training"] = m.training;
  std::string blob;
  for (const DenseLayer &l : p.feature_extractor.layers) put_layer(blob, l);
  put_layer(blob, p.label_head);
  put_f64s(blob, p.domain_weight);
  put_f64(blob, p.domain_bias);
  put_norm(blob, m.input.norm);
  j["blob"] = {{"file", blob_path(prefix).filename().string()}, {"reals", blob.size() / 8}};
  write_file_bytes(blob_path(prefix), blob);
  write_file_bytes(manifest_path(prefix), dump_json(j));
}

DannModel load_dann_model(const std::filesystem::path &prefix) {
  const Json j = read_manifest(prefix, "dann");
  DannModel m;
  m.params.spec = dann_spec_from_json(field<Json>(j, "spec", prefix),
                                      manifest_path(prefix).string() + ":spec");
  m.seed = field<std::uint64_t>(j, "seed", prefix);
  m.training = field<Json>(j, "training", prefix);
  const Json input = field<Json>(j, "input", prefix);
  m.input.deltas = field<bool>(input, "deltas", prefix);
  m.input.context = field<std::size_t>(input, "context", prefix);
  const auto norm_dim = field<std::size_t>(input, "norm_dim", prefix);

  const std::string bytes = read_file_bytes(blob_path(prefix));
  ByteReader r(bytes, blob_path(prefix).string());
  const DannSpec &s = m.params.spec;
  std::size_t in = s.input_dim;
  for (std::size_t h : s.hidden_dims) {
    m.params.feature_extractor.layers.push_back(get_layer(r, in, h));
    in = h;
  }
  m.params.label_head = get_layer(r, in, s.output_dim);
  m.params.domain_weight.resize(in);
  r.f64s(m.params.domain_weight);
  m.params.domain_bias = r.f64();
  m.input.norm = norm_dim == 0 ? NormStats{} : get_norm(r, norm_dim);
  finish_blob(r, prefix);
  return m;
}

void save_phoneme_model(const std::filesystem::path &prefix, const PhonemeDnnModel &m) {
  const auto &layers = m.model.params.layers;
  if (layers.empty()) fail(ErrorKind::kData, "phoneme model has no layers");
  Json dims = Json::array();
  dims.push_back(layers.front().in_dim());
  for (const DenseLayer &l : layers) dims.push_back(l.out_dim());
  Json j;
  j["schema_version"] = kModelSchemaVersion;
  j["kind"] = "phoneme_dnn";
  j["layer_dims"] = dims;
  j["activation"] = activation_name(m.model.activation);
  j["context"] = m.context;
  j["norm_dim"] = m.score_norm.mean.size();
  j["seed"] = m.seed;
  j["training"] = m.training;
  std::string blob;
  for (const DenseLayer &l : layers) put_layer(blob, l);
  put_norm(blob, m.score_norm);
  j["blob"] = {{"file", blob_path(prefix).filename().string()}, {"reals", blob.size() / 8}};
  write_file_bytes(blob_path(prefix), blob);
  write_file_bytes(manifest_path(prefix), dump_json(j));
}

PhonemeDnnModel load_phoneme_model(const std::filesystem::path &prefix) {
  const Json j = read_manifest(prefix, "phoneme_dnn");
  PhonemeDnnModel m;
  const auto dims = field<std::vector<std::size_t>>(j, "layer_dims", prefix);
  if (dims.size() < 2) fail(ErrorKind::kSchema, manifest_path(prefix).string(), ": layer_dims too short");
  try {
    m.model.activation = parse_activation(field<std::string>(j, "activation", prefix));
  } catch (const Error &e) {
    fail(ErrorKind::kSchema, manifest_path(prefix).string(), ": ", e.what());
  }
  m.context = field<std::size_t>(j, "context", prefix);
  m.seed = field<std::uint64_t>(j, "seed", prefix);
  m.training = field<Json>(j, "training", prefix);
  const auto norm_dim = field<std::size_t>(j, "norm_dim", prefix);
  const std::string bytes = read_file_bytes(blob_path(prefix));
  ByteReader r(bytes, blob_path(prefix).string());
  for (std::size_t i = 1; i < dims.size(); ++i)
    m.model.params.layers.push_back(get_layer(r, dims[i - 1], dims[i]));
  m.score_norm = norm_dim == 0 ? NormStats{} : get_norm(r, norm_dim);
  finish_blob(r, prefix);
  return m;
}

DannModel dann_model_of(const ExperimentResult &r, const ExperimentConfig &cfg) {
  DannModel m;
  m.params = r.dann;
  m.input = {true, r.norm, r.dann_context};
  m.seed = cfg.seed;
  m.training = to_json(r.dann_config);
  return m;
}

PhonemeDnnModel phoneme_model_of(const ExperimentResult &r, const ExperimentConfig &cfg) {
  PhonemeDnnModel m;
  m.model = r.phoneme_model;
  m.score_norm = r.score_norm;
  m.context = cfg.context;
  m.seed = cfg.seed;
  m.training = {{"spec", {{"hidden_dims", cfg.phoneme_spec.hidden_dims},
                          {"activation", activation_name(cfg.phoneme_spec.activation)}}},
                {"sgd", to_json(cfg.phoneme_sgd)}};
  return m;
}

void write_experiment_artifacts(const std::filesystem::path &out, const ExperimentResult &r,
                                const ExperimentConfig &cfg, std::string_view kind) {
  if (!r.dann.spec.hidden_dims.empty()) save_dann_model(out / "dann", dann_model_of(r, cfg));
  if (!r.phoneme_model.params.layers.empty())
    save_phoneme_model(out / "phoneme_dnn", phoneme_model_of(r, cfg));
  write_file_bytes(out / "report.json", dump_json(experiment_report(r, kind, cfg.seed)));
}

FeatureArchive score_archive(const DannModel &m, const FeatureArchive &features) {
  FeatureArchive out;
  for (const ArchiveEntry &e : features) {
    const RealMatrix x = with_stage(e.id, [&] {
      const RealMatrix in = m.input.apply(e.features, {});
      if (in.cols() != m.params.spec.input_dim)
        fail(ErrorKind::kDimension, "model expects ", m.params.spec.input_dim,
             " input columns, the transformed features have ", in.cols());
      return predict_label_probs(m.params, in);
    });
    out.push_back({e.id, x});
  }
  return out;
}

}  // namespace dannphone
