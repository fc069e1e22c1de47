#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rsrn/mlp.hpp"

namespace rsrn {

inline constexpr const char* kMlpFormatTag = "rsrn.mlp/1";

inline std::string activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
  }
  throw std::invalid_argument("activation_name: unknown activation");
}

inline Activation parse_activation(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw std::invalid_argument("parse_activation: unknown activation '" + name + "'");
}

/// Portable text form. Doubles survive the round trip bitwise (shortest
/// round-trip decimal representation).
inline nlohmann::json mlp_to_json(const Mlp& params) {
  nlohmann::json j;
  j["format"] = kMlpFormatTag;
  j["layer_sizes"] = params.layer_sizes;
  j["hidden_activation"] = activation_name(params.hidden_activation);
  j["output_activation"] = activation_name(params.output_activation);
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (std::size_t l = 0; l < params.n_layers(); ++l) {
    nlohmann::json w = nlohmann::json::array();
    for (Eigen::Index r = 0; r < params.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < params.weights[l].cols(); ++c) {
        w.push_back(params.weights[l](r, c));
      }
    }
    weights.push_back(std::move(w));
    nlohmann::json b = nlohmann::json::array();
    for (Eigen::Index r = 0; r < params.biases[l].size(); ++r) {
      b.push_back(params.biases[l][r]);
    }
    biases.push_back(std::move(b));
  }
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  return j;
}

inline Mlp mlp_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != kMlpFormatTag) {
    throw std::runtime_error("mlp_from_json: missing or unknown format tag");
  }
  Mlp params;
  params.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  if (params.layer_sizes.size() < 2) throw std::runtime_error("mlp_from_json: bad layer_sizes");
  params.hidden_activation = parse_activation(j.at("hidden_activation").get<std::string>());
  params.output_activation = parse_activation(j.at("output_activation").get<std::string>());
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  const std::size_t n = params.layer_sizes.size() - 1;
  if (weights.size() != n || biases.size() != n) {
    throw std::runtime_error("mlp_from_json: layer count mismatch");
  }
  for (std::size_t l = 0; l < n; ++l) {
    const int rows = params.layer_sizes[l + 1];
    const int cols = params.layer_sizes[l];
    const auto& wl = weights[l];
    const auto& bl = biases[l];
    if (wl.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) ||
        bl.size() != static_cast<std::size_t>(rows)) {
      throw std::runtime_error("mlp_from_json: array size mismatch in layer " + std::to_string(l));
    }
    Eigen::MatrixXd w(rows, cols);
    std::size_t at = 0;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        w(r, c) = wl[at++].get<double>();
      }
    }
    Eigen::VectorXd b(rows);
    for (int r = 0; r < rows; ++r) b[r] = bl[static_cast<std::size_t>(r)].get<double>();
    params.weights.push_back(std::move(w));
    params.biases.push_back(std::move(b));
  }
  return params;
}

inline void save_mlp(const Mlp& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mlp: cannot open " + path);
  out << mlp_to_json(params).dump(2) << '\n';
}

inline Mlp load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mlp: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return mlp_from_json(j);
}

}  // namespace rsrn
