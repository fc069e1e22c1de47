#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rsrn/adam.hpp"
#include "rsrn/env.hpp"
#include "rsrn/graph.hpp"
#include "rsrn/mlp.hpp"
#include "rsrn/replay.hpp"
#include "rsrn/rng.hpp"
#include "rsrn/scalarize.hpp"
#include "rsrn/trace.hpp"

namespace rsrn {

struct TrainConfig {
  double gamma = 0.99;
  int batch_size = 2048;
  double lr = 0.01;
  double tau = 0.01;
  std::size_t buffer_capacity = 1000000;
  int updates_every = 100;          // environment steps between update rounds
  std::uint64_t warmup_steps = 1250;  // no updates before this many env steps
  double noise_std_start = 0.3;     // Gaussian action noise, linear decay over episodes
  double noise_std_end = 0.05;
  int n_episodes = 30000;
  std::uint64_t max_env_steps = 0;  // 0 = unlimited; otherwise stop at the episode boundary
  std::uint64_t seed = 0;
  Scalarization scalarization = Scalarization::weighted_product;
  double reward_floor = 0.0;  // optional floor on individual rewards before scalarization
  int hidden_width = 64;
  int n_hidden_layers = 2;

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("TrainConfig: gamma must lie in (0, 1)");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (buffer_capacity < static_cast<std::size_t>(batch_size)) {
      throw std::invalid_argument("TrainConfig: batch_size must not exceed buffer_capacity");
    }
    if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be positive");
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("TrainConfig: tau must lie in (0, 1]");
    if (updates_every < 1) throw std::invalid_argument("TrainConfig: updates_every must be >= 1");
    if (noise_std_start < 0.0 || noise_std_end < 0.0) {
      throw std::invalid_argument("TrainConfig: noise std must be >= 0");
    }
    if (n_episodes < 0) throw std::invalid_argument("TrainConfig: n_episodes must be >= 0");
    if (reward_floor < 0.0) throw std::invalid_argument("TrainConfig: reward_floor must be >= 0");
    if (hidden_width < 1) throw std::invalid_argument("TrainConfig: hidden_width must be >= 1");
    if (n_hidden_layers < 1) throw std::invalid_argument("TrainConfig: n_hidden_layers must be >= 1");
  }
};

/// One agent's networks: decentralized actor over its own observation,
/// centralized critic over the joint observation-action vector, plus slow
/// target copies of both.
struct AgentLearner {
  Mlp actor, critic;
  Mlp target_actor, target_critic;
  AdamState actor_opt, critic_opt;
};

/// Init draw order: agent 0 actor then critic, agent 1 actor then critic, ...
/// Targets start as exact copies.
inline std::vector<AgentLearner> make_learners(const WorldConfig& world, const TrainConfig& cfg,
                                               RandomStream& rng) {
  const int obs_dim = world.obs_dim();
  const int critic_in = world.n_agents * (obs_dim + 2);
  std::vector<int> actor_sizes{obs_dim};
  std::vector<int> critic_sizes{critic_in};
  for (int l = 0; l < cfg.n_hidden_layers; ++l) {
    actor_sizes.push_back(cfg.hidden_width);
    critic_sizes.push_back(cfg.hidden_width);
  }
  actor_sizes.push_back(2);
  critic_sizes.push_back(1);

  std::vector<AgentLearner> learners;
  learners.reserve(static_cast<std::size_t>(world.n_agents));
  for (int i = 0; i < world.n_agents; ++i) {
    AgentLearner a;
    a.actor = mlp_init(actor_sizes, Activation::tanh, rng);
    a.critic = mlp_init(critic_sizes, Activation::identity, rng);
    a.target_actor = a.actor;
    a.target_critic = a.critic;
    a.actor_opt = adam_init(a.actor, cfg.lr);
    a.critic_opt = adam_init(a.critic, cfg.lr);
    learners.push_back(std::move(a));
  }
  return learners;
}

/// a_i = clip(actor_i(o_i) + noise, -1, 1). With noise_std = 0 no noise is
/// drawn and the outputs are the raw actor evaluations.
inline std::vector<Action> select_actions(const std::vector<AgentLearner>& learners,
                                          const std::vector<Observation>& joint_obs,
                                          double noise_std, RandomStream& rng) {
  if (joint_obs.size() != learners.size()) {
    throw std::invalid_argument("select_actions: one observation per agent required");
  }
  std::vector<Action> actions;
  actions.reserve(learners.size());
  for (std::size_t i = 0; i < learners.size(); ++i) {
    Eigen::VectorXd out = mlp_forward(learners[i].actor, joint_obs[i]);
    if (!out.allFinite()) throw std::runtime_error("select_actions: non-finite actor output");
    Action a(out[0], out[1]);
    if (noise_std > 0.0) {
      a.x() += rng.normal(0.0, noise_std);
      a.y() += rng.normal(0.0, noise_std);
    }
    actions.push_back(a.cwiseMax(-1.0).cwiseMin(1.0));
  }
  return actions;
}

struct CollectResult {
  Transition transition;
  Eigen::VectorXd individual_rewards;  // environment rewards before scalarization
};

/// Steps the environment once and stores the transition with rewards already
/// scalarized through the relational network.
inline CollectResult collect_step(ParticleEnv& env, const std::vector<AgentLearner>& learners,
                                  const RelationalNetwork& net, Scalarization method,
                                  double noise_std, double reward_floor, ReplayBuffer& buffer,
                                  RandomStream& rng) {
  if (env.done()) throw std::logic_error("collect_step: environment episode already finished");
  CollectResult result;
  result.transition.obs = env.observations();
  result.transition.actions = select_actions(learners, env.observations(), noise_std, rng);
  StepResult sr = env.step(result.transition.actions);
  result.individual_rewards = sr.rewards;
  Eigen::VectorXd shaped =
      reward_floor > 0.0 ? sr.rewards.cwiseMax(reward_floor).eval() : sr.rewards;
  result.transition.rewards = relational_rewards(shaped, net, method);
  result.transition.next_obs = env.observations();
  result.transition.done = sr.done;
  buffer.push(result.transition);
  return result;
}

namespace detail {

/// Joint (obs..., action...) design matrix for the centralized critics.
inline Eigen::MatrixXd joint_input(const std::vector<Eigen::MatrixXd>& obs,
                                   const std::vector<Eigen::MatrixXd>& actions) {
  const Eigen::Index b = obs.front().rows();
  Eigen::Index width = 0;
  for (const auto& o : obs) width += o.cols();
  for (const auto& a : actions) width += a.cols();
  Eigen::MatrixXd x(b, width);
  Eigen::Index at = 0;
  for (const auto& o : obs) {
    x.middleCols(at, o.cols()) = o;
    at += o.cols();
  }
  for (const auto& a : actions) {
    x.middleCols(at, a.cols()) = a;
    at += a.cols();
  }
  return x;
}

}  // namespace detail

/// Bootstrapped targets y = r + gamma * (1 - done) * Q'(o', a') with a'
/// from the target actors. Exposed separately so tests can check it against
/// an independent recomputation.
inline Eigen::VectorXd td_targets(const std::vector<AgentLearner>& learners, int agent_index,
                                  const Batch& batch, double gamma) {
  const auto n = static_cast<int>(learners.size());
  if (agent_index < 0 || agent_index >= n) throw std::out_of_range("td_targets: bad agent index");
  std::vector<Eigen::MatrixXd> next_actions;
  next_actions.reserve(learners.size());
  for (std::size_t j = 0; j < learners.size(); ++j) {
    next_actions.push_back(mlp_forward_batch(learners[j].target_actor, batch.next_obs[j]));
  }
  const Eigen::MatrixXd x = detail::joint_input(batch.next_obs, next_actions);
  const Eigen::VectorXd q =
      mlp_forward_batch(learners[static_cast<std::size_t>(agent_index)].target_critic, x).col(0);
  return batch.rewards.col(agent_index).array() +
         gamma * (1.0 - batch.done.array()) * q.array();
}

/// One critic descent step on the mean squared TD error; returns the
/// pre-update loss.
inline double critic_update(std::vector<AgentLearner>& learners, int agent_index,
                            const Batch& batch, double gamma) {
  if (batch.size() == 0) throw std::invalid_argument("critic_update: empty batch");
  AgentLearner& me = learners[static_cast<std::size_t>(agent_index)];
  const Eigen::VectorXd y = td_targets(learners, agent_index, batch, gamma);
  const Eigen::MatrixXd x = detail::joint_input(batch.obs, batch.actions);
  BatchTrace trace;
  const Eigen::VectorXd q = mlp_forward_batch(me.critic, x, &trace).col(0);
  const Eigen::VectorXd residual = q - y;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  const double loss = residual.squaredNorm() * inv_b;
  if (!std::isfinite(loss)) throw std::runtime_error("critic_update: non-finite loss");
  const Eigen::MatrixXd upstream = (2.0 * inv_b) * residual;
  MlpGradients grads = mlp_backward_batch(me.critic, trace, upstream);
  adam_step(me.critic, grads, me.critic_opt);
  return loss;
}

/// One actor ascent step on the mean critic value, with agent_index's action
/// recomputed from its live actor and the other agents' actions from theirs.
/// Returns the pre-update objective estimate (mean Q).
inline double actor_update(std::vector<AgentLearner>& learners, int agent_index,
                           const Batch& batch) {
  if (batch.size() == 0) throw std::invalid_argument("actor_update: empty batch");
  AgentLearner& me = learners[static_cast<std::size_t>(agent_index)];
  std::vector<Eigen::MatrixXd> live_actions;
  live_actions.reserve(learners.size());
  BatchTrace actor_trace;
  for (std::size_t j = 0; j < learners.size(); ++j) {
    const bool mine = static_cast<int>(j) == agent_index;
    live_actions.push_back(
        mlp_forward_batch(learners[j].actor, batch.obs[j], mine ? &actor_trace : nullptr));
  }
  const Eigen::MatrixXd x = detail::joint_input(batch.obs, live_actions);
  BatchTrace critic_trace;
  const Eigen::VectorXd q = mlp_forward_batch(me.critic, x, &critic_trace).col(0);
  const double objective = q.mean();
  if (!std::isfinite(objective)) throw std::runtime_error("actor_update: non-finite objective");

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  const Eigen::MatrixXd upstream = Eigen::MatrixXd::Constant(batch.size(), 1, inv_b);
  Eigen::MatrixXd input_grad;
  mlp_backward_batch(me.critic, critic_trace, upstream, &input_grad, /*want_param_grads=*/false);

  Eigen::Index action_col = 0;
  for (const auto& o : batch.obs) action_col += o.cols();
  action_col += 2 * agent_index;
  const Eigen::MatrixXd dq_da = input_grad.middleCols(action_col, 2);

  MlpGradients grads = mlp_backward_batch(me.actor, actor_trace, dq_da);
  for (auto& w : grads.weights) w = -w;  // ascend: optimizer minimizes
  for (auto& b : grads.biases) b = -b;
  adam_step(me.actor, grads, me.actor_opt);
  return objective;
}

/// target <- tau * live + (1 - tau) * target, element-wise.
inline void soft_update(Mlp& target, const Mlp& live, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update: tau must lie in (0, 1]");
  if (target.layer_sizes != live.layer_sizes) {
    throw std::invalid_argument("soft_update: shape mismatch");
  }
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    target.weights[l] = tau * live.weights[l] + (1.0 - tau) * target.weights[l];
    target.biases[l] = tau * live.biases[l] + (1.0 - tau) * target.biases[l];
  }
}

struct EpisodeMetrics {
  int episode = 0;
  Eigen::VectorXd individual_sum;  // per agent, summed over the episode's steps
  Eigen::VectorXd relational_sum;
  Eigen::VectorXd critic_loss;  // per agent, mean over this episode's updates (0 if none)
  double wall_seconds = 0.0;    // excluded from deterministic outputs
};

struct TrainHooks {
  std::function<void(const Transition&, const Eigen::VectorXd& individual_rewards)> on_transition;
  std::function<void(const EpisodeMetrics&)> on_episode;
};

struct TrainResult {
  std::vector<AgentLearner> learners;
  std::vector<EpisodeMetrics> history;
  std::uint64_t env_steps = 0;
};

/// Full training loop: collect with exploration noise, update every
/// updates_every environment steps once past warmup and buffer fill, soft
/// targets after each agent sweep. Deterministic given the rng seed.
inline TrainResult train(const WorldConfig& world_in, const TrainConfig& cfg,
                         const RelationalNetwork& net, RandomStream& rng,
                         const TrainHooks* hooks = nullptr) {
  WorldConfig world = world_in;
  world.finalize();
  cfg.validate();
  if (net.n_agents() != world.n_agents) {
    throw std::invalid_argument("train: relational network size != n_agents");
  }

  TrainResult result;
  result.learners = make_learners(world, cfg, rng);
  ParticleEnv env(world);
  ReplayBuffer buffer(cfg.buffer_capacity, world.n_agents, world.obs_dim());
  const int n = world.n_agents;

  for (int episode = 0; episode < cfg.n_episodes; ++episode) {
    if (cfg.max_env_steps > 0 && result.env_steps >= cfg.max_env_steps) break;
    const double frac =
        cfg.n_episodes > 1 ? static_cast<double>(episode) / (cfg.n_episodes - 1) : 0.0;
    const double noise_std =
        cfg.noise_std_start + (cfg.noise_std_end - cfg.noise_std_start) * frac;

    const auto episode_start = std::chrono::steady_clock::now();
    env.reset(rng);
    EpisodeMetrics metrics;
    metrics.episode = episode;
    metrics.individual_sum = Eigen::VectorXd::Zero(n);
    metrics.relational_sum = Eigen::VectorXd::Zero(n);
    metrics.critic_loss = Eigen::VectorXd::Zero(n);
    Eigen::VectorXi update_count = Eigen::VectorXi::Zero(n);

    while (!env.done()) {
      CollectResult cr = collect_step(env, result.learners, net, cfg.scalarization, noise_std,
                                      cfg.reward_floor, buffer, rng);
      metrics.individual_sum += cr.individual_rewards;
      metrics.relational_sum += cr.transition.rewards;
      if (hooks && hooks->on_transition) hooks->on_transition(cr.transition, cr.individual_rewards);
      ++result.env_steps;

      if (result.env_steps % static_cast<std::uint64_t>(cfg.updates_every) == 0 &&
          result.env_steps >= cfg.warmup_steps &&
          buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
        for (int i = 0; i < n; ++i) {
          const Batch batch = buffer.sample(static_cast<std::size_t>(cfg.batch_size), rng);
          metrics.critic_loss[i] += critic_update(result.learners, i, batch, cfg.gamma);
          actor_update(result.learners, i, batch);
          update_count[i] += 1;
        }
        for (int i = 0; i < n; ++i) {
          auto& a = result.learners[static_cast<std::size_t>(i)];
          soft_update(a.target_actor, a.actor, cfg.tau);
          soft_update(a.target_critic, a.critic, cfg.tau);
        }
      }
    }

    for (int i = 0; i < n; ++i) {
      if (update_count[i] > 0) metrics.critic_loss[i] /= update_count[i];
    }
    metrics.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - episode_start).count();
    if (hooks && hooks->on_episode) hooks->on_episode(metrics);
    result.history.push_back(std::move(metrics));
  }
  return result;
}

struct EvalResult {
  Eigen::VectorXd mean_individual;   // per agent, mean over episodes of episode sums
  Eigen::VectorXd mean_relational;
  Eigen::MatrixXd per_episode_individual;  // episodes x n_agents
  Eigen::MatrixXd per_episode_relational;
  std::vector<TrajectoryTrace> traces;  // first n_trace_episodes episodes
};

/// Noise-free rollouts with frozen policies.
inline EvalResult evaluate(const std::vector<AgentLearner>& learners, const WorldConfig& world_in,
                           const RelationalNetwork& net, Scalarization method, int n_episodes,
                           RandomStream& rng, int n_trace_episodes = 0, double reward_floor = 0.0) {
  WorldConfig world = world_in;
  world.finalize();
  if (n_episodes < 1) throw std::invalid_argument("evaluate: need at least one episode");
  if (net.n_agents() != world.n_agents) {
    throw std::invalid_argument("evaluate: relational network size != n_agents");
  }
  const int n = world.n_agents;
  ParticleEnv env(world);
  EvalResult result;
  result.per_episode_individual.resize(n_episodes, n);
  result.per_episode_relational.resize(n_episodes, n);

  for (int episode = 0; episode < n_episodes; ++episode) {
    env.reset(rng);
    const bool record = episode < n_trace_episodes;
    TrajectoryTrace trace;
    if (record) {
      trace.n_agents = n;
      trace.n_landmarks = world.n_landmarks;
      trace.episode_length = world.episode_length;
      trace.landmarks = world.landmark_positions;
      trace.initial_positions = env.state().positions;
    }
    Eigen::VectorXd ind_sum = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd rel_sum = Eigen::VectorXd::Zero(n);
    while (!env.done()) {
      const std::vector<Action> actions =
          select_actions(learners, env.observations(), 0.0, rng);
      StepResult sr = env.step(actions);
      Eigen::VectorXd shaped =
          reward_floor > 0.0 ? sr.rewards.cwiseMax(reward_floor).eval() : sr.rewards;
      const Eigen::VectorXd rel = relational_rewards(shaped, net, method);
      ind_sum += sr.rewards;
      rel_sum += rel;
      if (record) {
        TrajectoryTrace::Step s;
        s.positions = sr.state.positions;
        s.velocities = sr.state.velocities;
        s.actions.resize(n, 2);
        for (int i = 0; i < n; ++i) s.actions.row(i) = actions[static_cast<std::size_t>(i)].transpose();
        s.rewards = sr.rewards;
        trace.steps.push_back(std::move(s));
      }
    }
    result.per_episode_individual.row(episode) = ind_sum.transpose();
    result.per_episode_relational.row(episode) = rel_sum.transpose();
    if (record) result.traces.push_back(std::move(trace));
  }
  result.mean_individual = result.per_episode_individual.colwise().mean().transpose();
  result.mean_relational = result.per_episode_relational.colwise().mean().transpose();
  return result;
}

}  // namespace rsrn
