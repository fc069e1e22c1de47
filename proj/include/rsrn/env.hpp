#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rsrn/rng.hpp"

namespace rsrn {

using Action = Eigen::Vector2d;
using Observation = Eigen::VectorXd;

/// 2D point-mass world. Defaults reproduce the usual particle-environment
/// conventions: dt 0.1, damping 0.25, soft exponential contact forces, 25
/// steps per episode, fixed landmarks on an equilateral triangle, and the
/// last agent capped at a quarter of the others' speed.
struct WorldConfig {
  int n_agents = 3;
  int n_landmarks = 3;
  std::vector<Eigen::Vector2d> landmark_positions;  // empty -> default triangle
  double agent_radius = 0.15;
  double landmark_radius = 0.05;
  double dt = 0.1;
  double damping = 0.25;
  std::vector<double> max_speed;  // empty -> {1, ..., 1, 0.25}
  double accel_gain = 5.0;
  double reward_sigma2 = 0.1;
  double reward_gate = 0.2;
  int episode_length = 25;
  double contact_stiffness = 100.0;
  double contact_margin = 0.25;
  double spawn_extent = 1.0;

  /// Fills landmark_positions / max_speed when left empty, then validates.
  void finalize() {
    if (landmark_positions.empty()) {
      landmark_positions = default_landmarks(n_landmarks);
    }
    if (max_speed.empty()) {
      max_speed.assign(static_cast<std::size_t>(n_agents), 1.0);
      if (n_agents > 1) max_speed.back() = 0.25;
    }
    validate();
  }

  void validate() const {
    if (n_agents < 1) throw std::invalid_argument("WorldConfig: n_agents must be >= 1");
    if (n_landmarks < 1) throw std::invalid_argument("WorldConfig: n_landmarks must be >= 1");
    if (landmark_positions.size() != static_cast<std::size_t>(n_landmarks)) {
      throw std::invalid_argument("WorldConfig: landmark_positions size != n_landmarks");
    }
    if (max_speed.size() != static_cast<std::size_t>(n_agents)) {
      throw std::invalid_argument("WorldConfig: max_speed size != n_agents");
    }
    for (double s : max_speed) {
      if (!(s > 0.0)) throw std::invalid_argument("WorldConfig: max_speed entries must be positive");
    }
    for (const auto& lm : landmark_positions) {
      if (!lm.allFinite()) throw std::invalid_argument("WorldConfig: non-finite landmark");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("WorldConfig: dt must be positive");
    if (!(damping >= 0.0 && damping < 1.0)) {
      throw std::invalid_argument("WorldConfig: damping must lie in [0, 1)");
    }
    if (!(agent_radius > 0.0)) throw std::invalid_argument("WorldConfig: agent_radius must be positive");
    if (!(landmark_radius > 0.0)) throw std::invalid_argument("WorldConfig: landmark_radius must be positive");
    if (!(accel_gain > 0.0)) throw std::invalid_argument("WorldConfig: accel_gain must be positive");
    if (!(reward_sigma2 > 0.0)) throw std::invalid_argument("WorldConfig: reward_sigma2 must be positive");
    if (!(reward_gate > 0.0)) throw std::invalid_argument("WorldConfig: reward_gate must be positive");
    if (episode_length < 1) throw std::invalid_argument("WorldConfig: episode_length must be >= 1");
    if (!(contact_stiffness >= 0.0)) throw std::invalid_argument("WorldConfig: contact_stiffness must be >= 0");
    if (!(contact_margin > 0.0)) throw std::invalid_argument("WorldConfig: contact_margin must be positive");
    if (!(spawn_extent > 0.0)) throw std::invalid_argument("WorldConfig: spawn_extent must be positive");
  }

  /// [own vel, own pos, landmarks relative, other agents relative]
  int obs_dim() const { return 4 + 2 * n_landmarks + 2 * (n_agents - 1); }

  int hindered_agent() const { return n_agents - 1; }

  static std::vector<Eigen::Vector2d> default_landmarks(int n) {
    // vertices of a regular n-gon, circumradius 0.6, first vertex up
    std::vector<Eigen::Vector2d> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double angle = M_PI / 2.0 + 2.0 * M_PI * k / n;
      out.emplace_back(0.6 * std::cos(angle), 0.6 * std::sin(angle));
    }
    return out;
  }
};

struct WorldState {
  Eigen::MatrixXd positions;   // n_agents x 2
  Eigen::MatrixXd velocities;  // n_agents x 2
  int step_index = 0;
};

/// Gated proximity reward: exp(-d^2 / sigma2) if the distance d to the
/// closest landmark is strictly below the gate, else exactly 0.
inline double individual_reward(const Eigen::Vector2d& position,
                                const std::vector<Eigen::Vector2d>& landmarks,
                                double sigma2, double gate) {
  if (landmarks.empty()) throw std::invalid_argument("individual_reward: no landmarks");
  double d2_min = (position - landmarks.front()).squaredNorm();
  for (std::size_t k = 1; k < landmarks.size(); ++k) {
    d2_min = std::min(d2_min, (position - landmarks[k]).squaredNorm());
  }
  const double d = std::sqrt(d2_min);
  return d < gate ? std::exp(-d2_min / sigma2) : 0.0;
}

inline std::vector<Observation> observe(const WorldState& state, const WorldConfig& config) {
  std::vector<Observation> out;
  out.reserve(static_cast<std::size_t>(config.n_agents));
  for (int i = 0; i < config.n_agents; ++i) {
    Observation obs(config.obs_dim());
    const Eigen::Vector2d self = state.positions.row(i).transpose();
    obs.segment<2>(0) = state.velocities.row(i).transpose();
    obs.segment<2>(2) = self;
    int at = 4;
    for (const auto& lm : config.landmark_positions) {
      obs.segment<2>(at) = lm - self;
      at += 2;
    }
    for (int j = 0; j < config.n_agents; ++j) {
      if (j == i) continue;
      obs.segment<2>(at) = state.positions.row(j).transpose() - self;
      at += 2;
    }
    out.push_back(std::move(obs));
  }
  return out;
}

/// Agents spawn uniformly in the square [-spawn_extent, spawn_extent]^2 with
/// zero velocity. Draw order: agent 0 x, agent 0 y, agent 1 x, ...
inline std::pair<WorldState, std::vector<Observation>> reset(const WorldConfig& config,
                                                             RandomStream& rng) {
  config.validate();
  WorldState state;
  state.positions.resize(config.n_agents, 2);
  state.velocities = Eigen::MatrixXd::Zero(config.n_agents, 2);
  state.step_index = 0;
  for (int i = 0; i < config.n_agents; ++i) {
    state.positions(i, 0) = rng.uniform(-config.spawn_extent, config.spawn_extent);
    state.positions(i, 1) = rng.uniform(-config.spawn_extent, config.spawn_extent);
  }
  return {state, observe(state, config)};
}

struct StepResult {
  WorldState state;
  Eigen::VectorXd rewards;  // individual rewards at the new positions
  bool done = false;
};

/// One integrator step: damp velocity, add force * dt, clamp speed, advance
/// position. Force is accel_gain * clip(action) plus pairwise soft contact
/// forces of magnitude stiffness * margin * log(1 + exp((2r - dist)/margin)),
/// active while dist < 2r + margin, directed along the center line.
inline StepResult step(const WorldState& state, const std::vector<Action>& actions,
                       const WorldConfig& config) {
  if (actions.size() != static_cast<std::size_t>(config.n_agents)) {
    throw std::invalid_argument("step: one action per agent required");
  }
  for (const auto& a : actions) {
    if (!a.allFinite()) throw std::invalid_argument("step: non-finite action");
  }

  Eigen::MatrixXd force(config.n_agents, 2);
  for (int i = 0; i < config.n_agents; ++i) {
    force.row(i) = config.accel_gain *
                   actions[static_cast<std::size_t>(i)].cwiseMax(-1.0).cwiseMin(1.0).transpose();
  }

  for (int i = 0; i < config.n_agents; ++i) {
    for (int k = i + 1; k < config.n_agents; ++k) {
      const Eigen::Vector2d delta =
          (state.positions.row(i) - state.positions.row(k)).transpose();
      const double dist = delta.norm();
      const double dist_min = 2.0 * config.agent_radius;
      if (dist >= dist_min + config.contact_margin) continue;
      if (dist < 1e-12) continue;  // coincident centers, direction undefined
      const double penetration =
          config.contact_margin * std::log1p(std::exp((dist_min - dist) / config.contact_margin));
      const Eigen::Vector2d f = config.contact_stiffness * penetration * delta / dist;
      force.row(i) += f.transpose();
      force.row(k) -= f.transpose();
    }
  }

  StepResult result;
  result.state.positions.resize(config.n_agents, 2);
  result.state.velocities.resize(config.n_agents, 2);
  for (int i = 0; i < config.n_agents; ++i) {
    Eigen::Vector2d vel = state.velocities.row(i).transpose() * (1.0 - config.damping) +
                          force.row(i).transpose() * config.dt;
    const double speed = vel.norm();
    const double cap = config.max_speed[static_cast<std::size_t>(i)];
    if (speed > cap) vel *= cap / speed;
    result.state.velocities.row(i) = vel.transpose();
    result.state.positions.row(i) = state.positions.row(i) + vel.transpose() * config.dt;
  }
  result.state.step_index = state.step_index + 1;

  result.rewards.resize(config.n_agents);
  for (int i = 0; i < config.n_agents; ++i) {
    result.rewards[i] =
        individual_reward(result.state.positions.row(i).transpose(), config.landmark_positions,
                          config.reward_sigma2, config.reward_gate);
  }
  result.done = result.state.step_index >= config.episode_length;
  return result;
}

/// Convenience wrapper owning (config, state, last observations).
class ParticleEnv {
 public:
  explicit ParticleEnv(WorldConfig config) : config_(std::move(config)) {
    config_.finalize();
  }

  const WorldConfig& config() const { return config_; }
  const WorldState& state() const { return state_; }
  const std::vector<Observation>& observations() const { return obs_; }
  bool done() const { return state_.step_index >= config_.episode_length; }

  const std::vector<Observation>& reset(RandomStream& rng) {
    auto [state, obs] = rsrn::reset(config_, rng);
    state_ = std::move(state);
    obs_ = std::move(obs);
    return obs_;
  }

  StepResult step(const std::vector<Action>& actions) {
    StepResult result = rsrn::step(state_, actions, config_);
    state_ = result.state;
    obs_ = observe(state_, config_);
    return result;
  }

 private:
  WorldConfig config_;
  WorldState state_;
  std::vector<Observation> obs_;
};

}  // namespace rsrn
