#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rsrn/graph.hpp"

namespace rsrn {

enum class Scalarization { weighted_sum, weighted_product };

inline std::string_view scalarization_name(Scalarization s) {
  return s == Scalarization::weighted_sum ? "wsm" : "wpm";
}

inline std::optional<Scalarization> parse_scalarization(std::string_view name) {
  if (name == "wsm" || name == "weighted_sum") return Scalarization::weighted_sum;
  if (name == "wpm" || name == "weighted_product") return Scalarization::weighted_product;
  return std::nullopt;
}

namespace detail {
inline void check_scalarize_inputs(const Eigen::VectorXd& rewards,
                                   const Eigen::VectorXd& weights) {
  if (rewards.size() != weights.size()) {
    throw std::invalid_argument("scalarize: reward/weight length mismatch");
  }
  if (!rewards.allFinite() || !weights.allFinite()) {
    throw std::invalid_argument("scalarize: non-finite input");
  }
}
}  // namespace detail

/// Weighted sum of the reward vector: sum_j w[j] * r[j].
inline double wsm(const Eigen::VectorXd& rewards, const Eigen::VectorXd& weights) {
  detail::check_scalarize_inputs(rewards, weights);
  return rewards.dot(weights);
}

/// Weighted product of the reward vector: prod_j r[j]^w[j].
///
/// Zero-weight factors contribute exactly 1 (so 0^0 = 1), a zero base with
/// positive weight yields exactly 0, and a zero base with negative weight is
/// an error. Rewards must be non-negative.
inline double wpm(const Eigen::VectorXd& rewards, const Eigen::VectorXd& weights) {
  detail::check_scalarize_inputs(rewards, weights);
  double product = 1.0;
  for (Eigen::Index j = 0; j < rewards.size(); ++j) {
    const double r = rewards[j];
    const double w = weights[j];
    if (r < 0.0) throw std::domain_error("wpm: negative reward");
    if (w == 0.0) continue;  // neutral factor, covers 0^0 := 1
    if (r == 0.0 && w < 0.0) {
      throw std::domain_error("wpm: zero reward with negative weight");
    }
    product *= (w == 1.0) ? r : std::pow(r, w);
  }
  return product;
}

/// Full reward-sharing map: entry i is agent i's weight row scalarized
/// against the joint individual-reward vector.
inline Eigen::VectorXd relational_rewards(const Eigen::VectorXd& rewards,
                                          const RelationalNetwork& net,
                                          Scalarization method) {
  if (rewards.size() != net.n_agents()) {
    throw std::invalid_argument("relational_rewards: reward length != n_agents");
  }
  Eigen::VectorXd out(net.n_agents());
  for (int i = 0; i < net.n_agents(); ++i) {
    const Eigen::VectorXd w = net.row(i);
    out[i] = method == Scalarization::weighted_sum ? wsm(rewards, w) : wpm(rewards, w);
  }
  return out;
}

}  // namespace rsrn
