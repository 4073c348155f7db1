#pragma once

// Checkpoint files: 8-byte magic "IINRCKPT", a uint32 little-endian JSON
// header length, the JSON header (model kind, layer specs, seeds, fusion and
// latent settings, parameter count), then the raw little-endian float64
// parameter blob in visitation order (per layer: weight row-major, then
// bias; complex scalars as re, im pairs). Round-trips are bit-exact.

#include "iinr/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace iinr {

inline constexpr char kCheckpointMagic[8] = {'I', 'I', 'N', 'R', 'C', 'K', 'P', 'T'};

inline nlohmann::json to_json(const Activation& a) {
  nlohmann::json j;
  j["kind"] = act_name(a.kind);
  j["omega"] = a.omega;
  j["sigma"] = a.sigma;
  return j;
}

inline Activation activation_from_json(const nlohmann::json& j) {
  Activation a;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sine") a.kind = ActKind::Sine;
  else if (kind == "gauss") a.kind = ActKind::Gauss;
  else if (kind == "gabor") a.kind = ActKind::GaborWavelet;
  else if (kind == "relu") a.kind = ActKind::ReLU;
  else if (kind == "identity") a.kind = ActKind::Identity;
  else throw std::runtime_error("checkpoint: unknown activation '" + kind + "'");
  a.omega = j.value("omega", 0.0);
  a.sigma = j.value("sigma", 0.0);
  return a;
}

inline nlohmann::json to_json(const MlpSpec& s) {
  nlohmann::json j;
  j["in_dim"] = s.in_dim;
  j["out_dim"] = s.out_dim;
  j["hidden_width"] = s.hidden_width;
  j["hidden_layers"] = s.hidden_layers;
  j["activation"] = to_json(s.activation);
  j["output_activation"] = to_json(s.output_activation);
  return j;
}

inline MlpSpec mlp_spec_from_json(const nlohmann::json& j) {
  MlpSpec s;
  s.in_dim = j.at("in_dim").get<index_t>();
  s.out_dim = j.at("out_dim").get<index_t>();
  s.hidden_width = j.at("hidden_width").get<index_t>();
  s.hidden_layers = j.at("hidden_layers").get<index_t>();
  s.activation = activation_from_json(j.at("activation"));
  s.output_activation = activation_from_json(j.at("output_activation"));
  return s;
}

inline nlohmann::json to_json(const LatentField& lf) {
  nlohmann::json j;
  j["mode"] = latent_mode_name(lf.mode);
  j["seed"] = lf.seed;
  j["dims"] = lf.dims;
  j["channels"] = lf.channels;
  return j;
}

inline LatentField latent_from_json(const nlohmann::json& j) {
  const std::string mode = j.at("mode").get<std::string>();
  LatentMode m;
  if (mode == "noise") m = LatentMode::GaussianNoise;
  else if (mode == "ones") m = LatentMode::Ones;
  else if (mode == "zeros") m = LatentMode::Zeros;
  else throw std::runtime_error("checkpoint: unknown latent mode '" + mode + "'");
  return LatentField::make(m, j.at("seed").get<std::uint64_t>(),
                           j.at("dims").get<std::vector<index_t>>(),
                           j.at("channels").get<index_t>());
}

namespace detail {

template <class ModelT>
std::vector<double> flat_params(const ModelT& model) {
  std::vector<double> out;
  model.visit_params([&](double v) { out.push_back(v); });
  return out;
}

template <class ModelT>
void load_flat_params(ModelT& model, const std::vector<double>& params) {
  std::size_t i = 0;
  model.for_each_param([&](double& p, double&) {
    if (i >= params.size()) throw std::runtime_error("checkpoint: parameter blob too short");
    p = params[i++];
  });
  if (i != params.size()) throw std::runtime_error("checkpoint: parameter blob too long");
}

inline void write_file(const std::string& path, const nlohmann::json& header,
                       const std::vector<double>& params) {
  const std::string hdr = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kCheckpointMagic, 8);
  const std::uint32_t len = static_cast<std::uint32_t>(hdr.size());
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
}

inline void read_file(const std::string& path, nlohmann::json& header,
                      std::vector<double>& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  std::uint32_t len = 0;
  if (!in.read(reinterpret_cast<char*>(&len), 4))
    throw std::runtime_error("checkpoint: truncated header length");
  std::string hdr(len, '\0');
  if (!in.read(hdr.data(), len)) throw std::runtime_error("checkpoint: truncated header");
  header = nlohmann::json::parse(hdr);
  const std::int64_t n = header.at("param_doubles").get<std::int64_t>();
  params.resize(static_cast<std::size_t>(n));
  if (!in.read(reinterpret_cast<char*>(params.data()),
               static_cast<std::streamsize>(params.size() * sizeof(double))))
    throw std::runtime_error("checkpoint: truncated parameter blob");
}

}  // namespace detail

template <class T>
void save_checkpoint(const std::string& path, const Mlp<T>& model) {
  nlohmann::json j;
  j["kind"] = "mlp";
  j["scalar"] = std::is_same_v<T, cdouble> ? "complex128" : "real64";
  j["spec"] = to_json(model.spec);
  j["rng_seed"] = model.rng_seed;
  const auto params = detail::flat_params(model);
  j["param_doubles"] = params.size();
  detail::write_file(path, j, params);
}

template <class T>
void save_checkpoint(const std::string& path, const IinrModel<T>& model) {
  nlohmann::json j;
  j["kind"] = "iinr";
  j["scalar"] = std::is_same_v<T, cdouble> ? "complex128" : "real64";
  j["backbone"] = to_json(model.backbone.spec);
  j["feedback"] = to_json(model.feedback.spec);
  j["fuse"] = to_json(model.fuse.spec);
  j["backbone_seed"] = model.backbone.rng_seed;
  j["feedback_seed"] = model.feedback.rng_seed;
  j["fuse_seed"] = model.fuse.rng_seed;
  j["fusion"] = fusion_mode_name(model.fusion);
  j["epsilon"] = model.epsilon;
  j["latent"] = to_json(model.latent);
  std::vector<double> params;
  model.backbone.visit_params([&](double v) { params.push_back(v); });
  model.feedback.visit_params([&](double v) { params.push_back(v); });
  model.fuse.visit_params([&](double v) { params.push_back(v); });
  j["param_doubles"] = params.size();
  detail::write_file(path, j, params);
}

using AnyModel = std::variant<RealMlp, ComplexMlp, RealIinr, ComplexIinr>;

namespace detail {

template <class T>
Mlp<T> build_mlp_from_header(const nlohmann::json& spec_json, std::uint64_t seed) {
  Mlp<T> m;
  m.spec = mlp_spec_from_json(spec_json);
  m.spec.validate();
  m.rng_seed = seed;
  for (auto [fi, fo] : m.spec.layer_dims()) m.layers.emplace_back(fi, fo);
  return m;
}

template <class T>
IinrModel<T> build_iinr_from_header(const nlohmann::json& j, const std::vector<double>& params) {
  IinrModel<T> model;
  model.backbone = build_mlp_from_header<T>(j.at("backbone"), j.value("backbone_seed", 0ull));
  model.feedback = build_mlp_from_header<double>(j.at("feedback"), j.value("feedback_seed", 0ull));
  model.fuse = build_mlp_from_header<double>(j.at("fuse"), j.value("fuse_seed", 0ull));
  const std::string fusion = j.at("fusion").get<std::string>();
  model.fusion = fusion == "adaptive" ? FusionMode::Adaptive : FusionMode::Multiplicative;
  model.epsilon = j.at("epsilon").get<double>();
  model.latent = latent_from_json(j.at("latent"));
  load_flat_params(model, params);
  return model;
}

}  // namespace detail

inline AnyModel load_checkpoint(const std::string& path) {
  nlohmann::json j;
  std::vector<double> params;
  detail::read_file(path, j, params);
  const std::string kind = j.at("kind").get<std::string>();
  const bool complex_scalar = j.at("scalar").get<std::string>() == "complex128";
  if (kind == "mlp") {
    if (complex_scalar) {
      auto m = detail::build_mlp_from_header<cdouble>(j.at("spec"), j.value("rng_seed", 0ull));
      detail::load_flat_params(m, params);
      return m;
    }
    auto m = detail::build_mlp_from_header<double>(j.at("spec"), j.value("rng_seed", 0ull));
    detail::load_flat_params(m, params);
    return m;
  }
  if (kind == "iinr") {
    if (complex_scalar) return detail::build_iinr_from_header<cdouble>(j, params);
    return detail::build_iinr_from_header<double>(j, params);
  }
  throw std::runtime_error("checkpoint: unknown kind '" + kind + "'");
}

}  // namespace iinr
