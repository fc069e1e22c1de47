#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rsrn/rng.hpp"

namespace rsrn {

enum class Activation { identity, relu, tanh };

/// Largest double below 1. std::tanh rounds to exactly +-1 for |x| > ~19;
/// clamping here keeps tanh outputs strictly inside (-1, 1).
inline constexpr double kTanhOpenBound = 0x1.fffffffffffffp-1;

/// Dense feedforward network. Hidden layers are relu; the output layer is
/// identity (critics) or tanh (actors, bounding outputs to (-1, 1)).
/// weights[l] has shape layer_sizes[l+1] x layer_sizes[l].
struct Mlp {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Activation hidden_activation = Activation::relu;
  Activation output_activation = Activation::identity;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  std::size_t n_layers() const { return weights.size(); }
};

/// Gradients of a scalar loss with respect to every weight and bias;
/// shape-congruent with the Mlp that produced them.
struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  bool all_finite() const {
    for (const auto& w : weights) {
      if (!w.allFinite()) return false;
    }
    for (const auto& b : biases) {
      if (!b.allFinite()) return false;
    }
    return true;
  }
};

namespace detail {

inline void check_congruent(const Mlp& params, const MlpGradients& grads, const char* who) {
  if (grads.weights.size() != params.weights.size() ||
      grads.biases.size() != params.biases.size()) {
    throw std::invalid_argument(std::string(who) + ": layer count mismatch");
  }
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    if (grads.weights[l].rows() != params.weights[l].rows() ||
        grads.weights[l].cols() != params.weights[l].cols() ||
        grads.biases[l].size() != params.biases[l].size()) {
      throw std::invalid_argument(std::string(who) + ": gradient shape mismatch");
    }
  }
}

// Derivatives are evaluated on post-activation values: for relu the mask
// post > 0 coincides with pre > 0 (subgradient 0 at exactly 0), for tanh
// the derivative is 1 - post^2.
inline Eigen::ArrayXXd activation_derivative(const Eigen::MatrixXd& post, Activation act) {
  switch (act) {
    case Activation::identity:
      return Eigen::ArrayXXd::Ones(post.rows(), post.cols());
    case Activation::relu:
      return (post.array() > 0.0).cast<double>();
    case Activation::tanh:
      return 1.0 - post.array().square();
  }
  throw std::invalid_argument("activation_derivative: unknown activation");
}

inline void apply_activation(Eigen::MatrixXd& z, Activation act) {
  switch (act) {
    case Activation::identity:
      return;
    case Activation::relu:
      z = z.cwiseMax(0.0);
      return;
    case Activation::tanh:
      z = z.array().tanh().matrix().cwiseMax(-kTanhOpenBound).cwiseMin(kTanhOpenBound);
      return;
  }
  throw std::invalid_argument("apply_activation: unknown activation");
}

}  // namespace detail

/// Fan-based uniform weight init (biases zero). Weight draw order is layer
/// by layer, row by row, column by column.
inline Mlp mlp_init(const std::vector<int>& layer_sizes, Activation output_activation,
                    RandomStream& rng) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("mlp_init: need >= 2 layer sizes");
  for (int s : layer_sizes) {
    if (s < 1) throw std::invalid_argument("mlp_init: layer sizes must be positive");
  }
  if (output_activation == Activation::relu) {
    throw std::invalid_argument("mlp_init: output activation must be identity or tanh");
  }
  Mlp net;
  net.layer_sizes = layer_sizes;
  net.output_activation = output_activation;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        w(r, c) = rng.uniform(-bound, bound);
      }
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return net;
}

inline MlpGradients zeros_like(const Mlp& params) {
  MlpGradients g;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(params.weights[l].rows(), params.weights[l].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(params.biases[l].size()));
  }
  return g;
}

inline Eigen::VectorXd mlp_forward(const Mlp& params, const Eigen::VectorXd& input) {
  if (input.size() != params.input_dim()) {
    throw std::invalid_argument("mlp_forward: input length mismatch");
  }
  if (!input.allFinite()) throw std::invalid_argument("mlp_forward: non-finite input");
  Eigen::VectorXd x = input;
  for (std::size_t l = 0; l < params.n_layers(); ++l) {
    Eigen::MatrixXd z = params.weights[l] * x + params.biases[l];
    detail::apply_activation(
        z, l + 1 == params.n_layers() ? params.output_activation : params.hidden_activation);
    x = std::move(z);
  }
  return x;
}

/// Reverse-mode gradients of (upstream . output) with respect to all
/// parameters and the input.
inline std::pair<MlpGradients, Eigen::VectorXd> mlp_backward(const Mlp& params,
                                                             const Eigen::VectorXd& input,
                                                             const Eigen::VectorXd& upstream) {
  if (input.size() != params.input_dim()) {
    throw std::invalid_argument("mlp_backward: input length mismatch");
  }
  if (upstream.size() != params.output_dim()) {
    throw std::invalid_argument("mlp_backward: upstream length mismatch");
  }
  const std::size_t n = params.n_layers();
  std::vector<Eigen::MatrixXd> post(n + 1);  // post[0] = input, post[l+1] = layer l output
  post[0] = input;
  for (std::size_t l = 0; l < n; ++l) {
    Eigen::MatrixXd z = params.weights[l] * post[l] + params.biases[l];
    detail::apply_activation(z, l + 1 == n ? params.output_activation : params.hidden_activation);
    post[l + 1] = std::move(z);
  }

  MlpGradients grads;
  grads.weights.resize(n);
  grads.biases.resize(n);
  Eigen::MatrixXd delta = upstream;
  for (std::size_t l = n; l-- > 0;) {
    const Activation act = l + 1 == n ? params.output_activation : params.hidden_activation;
    delta = (delta.array() * detail::activation_derivative(post[l + 1], act)).matrix();
    grads.weights[l] = delta * post[l].transpose();
    grads.biases[l] = delta;
    delta = (params.weights[l].transpose() * delta).eval();
  }
  return {std::move(grads), Eigen::VectorXd(delta)};
}

/// Post-activation record of a batched forward pass; rows are samples.
struct BatchTrace {
  std::vector<Eigen::MatrixXd> post;  // post[0] = inputs, post[l+1] = layer l outputs
};

inline Eigen::MatrixXd mlp_forward_batch(const Mlp& params, const Eigen::MatrixXd& inputs,
                                         BatchTrace* trace = nullptr) {
  if (inputs.cols() != params.input_dim()) {
    throw std::invalid_argument("mlp_forward_batch: input width mismatch");
  }
  if (trace) {
    trace->post.clear();
    trace->post.reserve(params.n_layers() + 1);
    trace->post.push_back(inputs);
  }
  Eigen::MatrixXd x = inputs;
  for (std::size_t l = 0; l < params.n_layers(); ++l) {
    Eigen::MatrixXd z = x * params.weights[l].transpose();
    z.rowwise() += params.biases[l].transpose();
    detail::apply_activation(
        z, l + 1 == params.n_layers() ? params.output_activation : params.hidden_activation);
    x = std::move(z);
    if (trace) trace->post.push_back(x);
  }
  return x;
}

/// Batched reverse pass over a recorded forward. upstream is (batch x out);
/// returned parameter gradients are sums over the batch. If input_grad is
/// non-null it receives the per-sample gradient with respect to the inputs
/// (batch x in). Pass want_param_grads = false to skip the weight/bias
/// gradients when only the input gradient is needed.
inline MlpGradients mlp_backward_batch(const Mlp& params, const BatchTrace& trace,
                                       const Eigen::MatrixXd& upstream,
                                       Eigen::MatrixXd* input_grad = nullptr,
                                       bool want_param_grads = true) {
  const std::size_t n = params.n_layers();
  if (trace.post.size() != n + 1) {
    throw std::invalid_argument("mlp_backward_batch: trace does not match network");
  }
  if (upstream.rows() != trace.post[0].rows() || upstream.cols() != params.output_dim()) {
    throw std::invalid_argument("mlp_backward_batch: upstream shape mismatch");
  }
  MlpGradients grads;
  if (want_param_grads) {
    grads.weights.resize(n);
    grads.biases.resize(n);
  }
  Eigen::MatrixXd delta = upstream;
  for (std::size_t l = n; l-- > 0;) {
    const Activation act = l + 1 == n ? params.output_activation : params.hidden_activation;
    delta = (delta.array() * detail::activation_derivative(trace.post[l + 1], act)).matrix();
    if (want_param_grads) {
      grads.weights[l] = delta.transpose() * trace.post[l];
      grads.biases[l] = delta.colwise().sum().transpose();
    }
    if (l > 0 || input_grad) {
      delta = (delta * params.weights[l]).eval();
    }
  }
  if (input_grad) *input_grad = std::move(delta);
  return grads;
}

}  // namespace rsrn
