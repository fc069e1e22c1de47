#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsrn/env.hpp"
#include "rsrn/graph.hpp"
#include "rsrn/scalarize.hpp"
#include "rsrn/trainer.hpp"

namespace rsrn {

inline constexpr const char* kConfigFormatTag = "rsrn.config/1";

/// One network to train against: a named preset or an inline weight matrix.
struct NetworkSpec {
  std::string label;
  std::optional<NetworkPreset> preset;
  Eigen::MatrixXd matrix;  // used when preset is empty

  RelationalNetwork build(int n_agents) const {
    if (preset) return RelationalNetwork::preset(*preset, n_agents);
    if (matrix.rows() != n_agents) {
      throw std::invalid_argument("network '" + label + "': matrix side " +
                                  std::to_string(matrix.rows()) + " != n_agents " +
                                  std::to_string(n_agents));
    }
    return RelationalNetwork::from_matrix(matrix);
  }
};

struct ExperimentConfig {
  WorldConfig world;
  TrainConfig train;
  std::vector<NetworkSpec> networks;
  std::vector<std::uint64_t> seeds{0};
  int eval_episodes = 500;
  int trace_episodes = 3;
  std::string output_dir = "out";

  void validate() const {
    WorldConfig w = world;
    w.finalize();
    train.validate();
    if (networks.empty()) throw std::invalid_argument("config: at least one network required");
    if (seeds.empty()) throw std::invalid_argument("config: at least one seed required");
    if (eval_episodes < 1) throw std::invalid_argument("config: eval_episodes must be >= 1");
    if (trace_episodes < 0 || trace_episodes > eval_episodes) {
      throw std::invalid_argument("config: trace_episodes must lie in [0, eval_episodes]");
    }
    if (output_dir.empty()) throw std::invalid_argument("config: output_dir must not be empty");
    for (const auto& spec : networks) {
      if (spec.label.empty()) throw std::invalid_argument("config: network label must not be empty");
      spec.build(w.n_agents);  // throws on size mismatch
    }
    for (std::size_t a = 0; a < networks.size(); ++a) {
      for (std::size_t b = a + 1; b < networks.size(); ++b) {
        if (networks[a].label == networks[b].label) {
          throw std::invalid_argument("config: duplicate network label '" + networks[a].label + "'");
        }
      }
    }
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void maybe_get(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline WorldConfig world_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"n_agents", "n_landmarks", "landmarks", "agent_radius", "landmark_radius",
                       "dt", "damping", "max_speed", "accel_gain", "reward_sigma2", "reward_gate",
                       "episode_length", "contact_stiffness", "contact_margin", "spawn_extent"},
                      "world");
  WorldConfig w;
  maybe_get(j, "n_agents", w.n_agents);
  maybe_get(j, "n_landmarks", w.n_landmarks);
  if (j.contains("landmarks")) {
    for (const auto& lm : j.at("landmarks")) {
      if (!lm.is_array() || lm.size() != 2) {
        throw std::invalid_argument("config: each landmark must be [x, y]");
      }
      w.landmark_positions.emplace_back(lm[0].get<double>(), lm[1].get<double>());
    }
  }
  maybe_get(j, "agent_radius", w.agent_radius);
  maybe_get(j, "landmark_radius", w.landmark_radius);
  maybe_get(j, "dt", w.dt);
  maybe_get(j, "damping", w.damping);
  maybe_get(j, "max_speed", w.max_speed);
  maybe_get(j, "accel_gain", w.accel_gain);
  maybe_get(j, "reward_sigma2", w.reward_sigma2);
  maybe_get(j, "reward_gate", w.reward_gate);
  maybe_get(j, "episode_length", w.episode_length);
  maybe_get(j, "contact_stiffness", w.contact_stiffness);
  maybe_get(j, "contact_margin", w.contact_margin);
  maybe_get(j, "spawn_extent", w.spawn_extent);
  return w;
}

inline TrainConfig train_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"gamma", "batch_size", "lr", "tau", "buffer_capacity", "updates_every",
                       "warmup_steps", "noise_std_start", "noise_std_end", "n_episodes",
                       "max_env_steps", "reward_floor", "hidden_width", "n_hidden_layers"},
                      "train");
  TrainConfig t;
  maybe_get(j, "gamma", t.gamma);
  maybe_get(j, "batch_size", t.batch_size);
  maybe_get(j, "lr", t.lr);
  maybe_get(j, "tau", t.tau);
  maybe_get(j, "buffer_capacity", t.buffer_capacity);
  maybe_get(j, "updates_every", t.updates_every);
  maybe_get(j, "warmup_steps", t.warmup_steps);
  maybe_get(j, "noise_std_start", t.noise_std_start);
  maybe_get(j, "noise_std_end", t.noise_std_end);
  maybe_get(j, "n_episodes", t.n_episodes);
  maybe_get(j, "max_env_steps", t.max_env_steps);
  maybe_get(j, "reward_floor", t.reward_floor);
  maybe_get(j, "hidden_width", t.hidden_width);
  maybe_get(j, "n_hidden_layers", t.n_hidden_layers);
  return t;
}

inline NetworkSpec network_from_json(const nlohmann::json& j, std::size_t index) {
  NetworkSpec spec;
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    const auto preset = parse_preset(name);
    if (!preset) throw std::invalid_argument("config: unknown network preset '" + name + "'");
    spec.preset = *preset;
    spec.label = name;
    return spec;
  }
  if (!j.is_object()) {
    throw std::invalid_argument("config: network entries must be preset names or objects");
  }
  reject_unknown_keys(j, {"label", "preset", "matrix"}, "network entry");
  if (j.contains("preset")) {
    const auto name = j.at("preset").get<std::string>();
    const auto preset = parse_preset(name);
    if (!preset) throw std::invalid_argument("config: unknown network preset '" + name + "'");
    spec.preset = *preset;
    spec.label = j.value("label", name);
    return spec;
  }
  if (!j.contains("matrix")) {
    throw std::invalid_argument("config: network object needs 'preset' or 'matrix'");
  }
  const auto& rows = j.at("matrix");
  if (!rows.is_array() || rows.empty()) {
    throw std::invalid_argument("config: network matrix must be a non-empty array of rows");
  }
  const std::size_t n = rows.size();
  spec.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (!rows[r].is_array() || rows[r].size() != n) {
      throw std::invalid_argument("config: network matrix must be square");
    }
    for (std::size_t c = 0; c < n; ++c) {
      spec.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c].get<double>();
    }
  }
  spec.label = j.value("label", "custom" + std::to_string(index));
  return spec;
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: document must be a JSON object");
  detail::reject_unknown_keys(j,
                              {"format", "output_dir", "seeds", "eval_episodes", "trace_episodes",
                               "scalarization", "network", "networks", "world", "train"},
                              "top level");
  const auto format = j.value("format", "");
  if (format != kConfigFormatTag) {
    throw std::invalid_argument("config: expected format tag '" + std::string(kConfigFormatTag) +
                                "', got '" + format + "'");
  }
  ExperimentConfig cfg;
  if (j.contains("world")) cfg.world = detail::world_from_json(j.at("world"));
  if (j.contains("train")) cfg.train = detail::train_from_json(j.at("train"));
  if (j.contains("scalarization")) {
    const auto name = j.at("scalarization").get<std::string>();
    const auto method = parse_scalarization(name);
    if (!method) throw std::invalid_argument("config: unknown scalarization '" + name + "'");
    cfg.train.scalarization = *method;
  }
  if (j.contains("network") && j.contains("networks")) {
    throw std::invalid_argument("config: give either 'network' or 'networks', not both");
  }
  if (j.contains("network")) {
    cfg.networks.push_back(detail::network_from_json(j.at("network"), 0));
  } else if (j.contains("networks")) {
    const auto& list = j.at("networks");
    if (!list.is_array()) throw std::invalid_argument("config: 'networks' must be an array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      cfg.networks.push_back(detail::network_from_json(list[k], k));
    }
  }
  detail::maybe_get(j, "seeds", cfg.seeds);
  detail::maybe_get(j, "eval_episodes", cfg.eval_episodes);
  detail::maybe_get(j, "trace_episodes", cfg.trace_episodes);
  detail::maybe_get(j, "output_dir", cfg.output_dir);
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("config: " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

/// Resolved form of the loaded config (defaults filled in), written next to
/// the run outputs for provenance.
inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  WorldConfig world = cfg.world;
  world.finalize();
  nlohmann::json j;
  j["format"] = kConfigFormatTag;
  j["output_dir"] = cfg.output_dir;
  j["seeds"] = cfg.seeds;
  j["eval_episodes"] = cfg.eval_episodes;
  j["trace_episodes"] = cfg.trace_episodes;
  j["scalarization"] = std::string(scalarization_name(cfg.train.scalarization));
  nlohmann::json networks = nlohmann::json::array();
  for (const auto& spec : cfg.networks) {
    nlohmann::json entry;
    entry["label"] = spec.label;
    if (spec.preset) {
      entry["preset"] = std::string(preset_name(*spec.preset));
    } else {
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index r = 0; r < spec.matrix.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < spec.matrix.cols(); ++c) row.push_back(spec.matrix(r, c));
        rows.push_back(std::move(row));
      }
      entry["matrix"] = std::move(rows);
    }
    networks.push_back(std::move(entry));
  }
  j["networks"] = std::move(networks);
  nlohmann::json w;
  w["n_agents"] = world.n_agents;
  w["n_landmarks"] = world.n_landmarks;
  nlohmann::json landmarks = nlohmann::json::array();
  for (const auto& lm : world.landmark_positions) landmarks.push_back({lm.x(), lm.y()});
  w["landmarks"] = std::move(landmarks);
  w["agent_radius"] = world.agent_radius;
  w["landmark_radius"] = world.landmark_radius;
  w["dt"] = world.dt;
  w["damping"] = world.damping;
  w["max_speed"] = world.max_speed;
  w["accel_gain"] = world.accel_gain;
  w["reward_sigma2"] = world.reward_sigma2;
  w["reward_gate"] = world.reward_gate;
  w["episode_length"] = world.episode_length;
  w["contact_stiffness"] = world.contact_stiffness;
  w["contact_margin"] = world.contact_margin;
  w["spawn_extent"] = world.spawn_extent;
  j["world"] = std::move(w);
  nlohmann::json t;
  t["gamma"] = cfg.train.gamma;
  t["batch_size"] = cfg.train.batch_size;
  t["lr"] = cfg.train.lr;
  t["tau"] = cfg.train.tau;
  t["buffer_capacity"] = cfg.train.buffer_capacity;
  t["updates_every"] = cfg.train.updates_every;
  t["warmup_steps"] = cfg.train.warmup_steps;
  t["noise_std_start"] = cfg.train.noise_std_start;
  t["noise_std_end"] = cfg.train.noise_std_end;
  t["n_episodes"] = cfg.train.n_episodes;
  t["max_env_steps"] = cfg.train.max_env_steps;
  t["reward_floor"] = cfg.train.reward_floor;
  t["hidden_width"] = cfg.train.hidden_width;
  t["n_hidden_layers"] = cfg.train.n_hidden_layers;
  j["train"] = std::move(t);
  return j;
}

}  // namespace rsrn
