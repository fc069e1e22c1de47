#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rsrn/mlp.hpp"

namespace rsrn {

/// Adaptive-moment SGD state for one Mlp (first/second moment accumulators,
/// bias-corrected update).
struct AdamState {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step_count = 0;
  std::vector<Eigen::MatrixXd> m_weights, v_weights;
  std::vector<Eigen::VectorXd> m_biases, v_biases;
};

inline AdamState adam_init(const Mlp& params, double learning_rate) {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("adam_init: learning rate must be positive");
  AdamState s;
  s.learning_rate = learning_rate;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    s.m_weights.push_back(Eigen::MatrixXd::Zero(params.weights[l].rows(), params.weights[l].cols()));
    s.v_weights.push_back(Eigen::MatrixXd::Zero(params.weights[l].rows(), params.weights[l].cols()));
    s.m_biases.push_back(Eigen::VectorXd::Zero(params.biases[l].size()));
    s.v_biases.push_back(Eigen::VectorXd::Zero(params.biases[l].size()));
  }
  return s;
}

namespace detail {

template <typename Param, typename Grad>
void adam_update_block(Param& p, const Grad& g, Param& m, Param& v, double lr, double beta1,
                       double beta2, double epsilon, double bias1, double bias2) {
  m = beta1 * m + (1.0 - beta1) * g;
  v = (beta2 * v.array() + (1.0 - beta2) * g.array().square()).matrix();
  p.array() -= lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + epsilon);
}

}  // namespace detail

/// One descent step on params; grads hold d(loss)/d(param).
inline void adam_step(Mlp& params, const MlpGradients& grads, AdamState& state) {
  detail::check_congruent(params, grads, "adam_step");
  if (state.m_weights.size() != params.weights.size()) {
    throw std::invalid_argument("adam_step: optimizer state does not match network");
  }
  if (!grads.all_finite()) throw std::invalid_argument("adam_step: non-finite gradient");
  state.step_count += 1;
  const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    detail::adam_update_block(params.weights[l], grads.weights[l], state.m_weights[l],
                              state.v_weights[l], state.learning_rate, state.beta1, state.beta2,
                              state.epsilon, bias1, bias2);
    detail::adam_update_block(params.biases[l], grads.biases[l], state.m_biases[l],
                              state.v_biases[l], state.learning_rate, state.beta1, state.beta2,
                              state.epsilon, bias1, bias2);
  }
}

}  // namespace rsrn
