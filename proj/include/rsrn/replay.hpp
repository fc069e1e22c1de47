#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rsrn/rng.hpp"

namespace rsrn {

/// One stored experience. Rewards are the *relational* rewards, scalarized
/// at collection time.
struct Transition {
  std::vector<Eigen::VectorXd> obs;       // per agent
  std::vector<Eigen::Vector2d> actions;   // per agent
  Eigen::VectorXd rewards;                // length n_agents
  std::vector<Eigen::VectorXd> next_obs;  // per agent
  bool done = false;
};

/// Column batch of sampled transitions; matrices are (batch x dim).
struct Batch {
  std::vector<Eigen::MatrixXd> obs;       // per agent
  std::vector<Eigen::MatrixXd> actions;   // per agent
  Eigen::MatrixXd rewards;                // batch x n_agents
  std::vector<Eigen::MatrixXd> next_obs;  // per agent
  Eigen::VectorXd done;                   // 0/1

  Eigen::Index size() const { return rewards.rows(); }
};

/// Fixed-capacity ring buffer over flat storage. Memory is committed in
/// blocks as transitions arrive, so an oversized capacity costs nothing
/// until used.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int n_agents, int obs_dim, int act_dim = 2)
      : capacity_(capacity), n_agents_(n_agents), obs_dim_(obs_dim), act_dim_(act_dim) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    if (n_agents < 1 || obs_dim < 1 || act_dim < 1) {
      throw std::invalid_argument("ReplayBuffer: bad dimensions");
    }
    stride_ = static_cast<std::size_t>(n_agents) * (2 * obs_dim + act_dim + 1) + 1;
  }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }

  void push(const Transition& t) {
    if (t.obs.size() != static_cast<std::size_t>(n_agents_) ||
        t.next_obs.size() != static_cast<std::size_t>(n_agents_) ||
        t.actions.size() != static_cast<std::size_t>(n_agents_) ||
        t.rewards.size() != n_agents_) {
      throw std::invalid_argument("ReplayBuffer::push: transition shape mismatch");
    }
    if (!t.rewards.allFinite()) throw std::invalid_argument("ReplayBuffer::push: non-finite reward");
    double* row = slot(next_);
    std::size_t at = 0;
    for (int i = 0; i < n_agents_; ++i) {
      for (int d = 0; d < obs_dim_; ++d) row[at++] = t.obs[static_cast<std::size_t>(i)][d];
    }
    for (int i = 0; i < n_agents_; ++i) {
      for (int d = 0; d < act_dim_; ++d) row[at++] = t.actions[static_cast<std::size_t>(i)][d];
    }
    for (int i = 0; i < n_agents_; ++i) row[at++] = t.rewards[i];
    for (int i = 0; i < n_agents_; ++i) {
      for (int d = 0; d < obs_dim_; ++d) row[at++] = t.next_obs[static_cast<std::size_t>(i)][d];
    }
    row[at++] = t.done ? 1.0 : 0.0;
    next_ = (next_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
  }

  /// Uniform indices with replacement; exposed so the sampling distribution
  /// can be tested directly.
  std::vector<std::size_t> sample_indices(std::size_t batch_size, RandomStream& rng) const {
    if (size_ == 0) throw std::logic_error("ReplayBuffer: cannot sample from empty buffer");
    std::vector<std::size_t> idx(batch_size);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.bounded(size_));
    return idx;
  }

  Batch sample(std::size_t batch_size, RandomStream& rng) const {
    return gather(sample_indices(batch_size, rng));
  }

  Batch gather(const std::vector<std::size_t>& indices) const {
    const auto b = static_cast<Eigen::Index>(indices.size());
    Batch batch;
    batch.obs.assign(static_cast<std::size_t>(n_agents_), Eigen::MatrixXd(b, obs_dim_));
    batch.actions.assign(static_cast<std::size_t>(n_agents_), Eigen::MatrixXd(b, act_dim_));
    batch.next_obs.assign(static_cast<std::size_t>(n_agents_), Eigen::MatrixXd(b, obs_dim_));
    batch.rewards.resize(b, n_agents_);
    batch.done.resize(b);
    for (Eigen::Index r = 0; r < b; ++r) {
      const std::size_t index = indices[static_cast<std::size_t>(r)];
      if (index >= size_) throw std::out_of_range("ReplayBuffer::gather: index out of range");
      const double* row = slot(index);
      std::size_t at = 0;
      for (int i = 0; i < n_agents_; ++i) {
        for (int d = 0; d < obs_dim_; ++d) batch.obs[static_cast<std::size_t>(i)](r, d) = row[at++];
      }
      for (int i = 0; i < n_agents_; ++i) {
        for (int d = 0; d < act_dim_; ++d) batch.actions[static_cast<std::size_t>(i)](r, d) = row[at++];
      }
      for (int i = 0; i < n_agents_; ++i) batch.rewards(r, i) = row[at++];
      for (int i = 0; i < n_agents_; ++i) {
        for (int d = 0; d < obs_dim_; ++d) batch.next_obs[static_cast<std::size_t>(i)](r, d) = row[at++];
      }
      batch.done[r] = row[at++];
    }
    return batch;
  }

  /// Reconstructs one stored transition (test support).
  Transition at(std::size_t index) const {
    if (index >= size_) throw std::out_of_range("ReplayBuffer::at: index out of range");
    const double* row = slot(index);
    Transition t;
    std::size_t at = 0;
    t.obs.assign(static_cast<std::size_t>(n_agents_), Eigen::VectorXd(obs_dim_));
    t.actions.assign(static_cast<std::size_t>(n_agents_), Eigen::Vector2d::Zero());
    t.next_obs.assign(static_cast<std::size_t>(n_agents_), Eigen::VectorXd(obs_dim_));
    t.rewards.resize(n_agents_);
    for (int i = 0; i < n_agents_; ++i) {
      for (int d = 0; d < obs_dim_; ++d) t.obs[static_cast<std::size_t>(i)][d] = row[at++];
    }
    for (int i = 0; i < n_agents_; ++i) {
      for (int d = 0; d < act_dim_; ++d) t.actions[static_cast<std::size_t>(i)][d] = row[at++];
    }
    for (int i = 0; i < n_agents_; ++i) t.rewards[i] = row[at++];
    for (int i = 0; i < n_agents_; ++i) {
      for (int d = 0; d < obs_dim_; ++d) t.next_obs[static_cast<std::size_t>(i)][d] = row[at++];
    }
    t.done = row[at++] != 0.0;
    return t;
  }

 private:
  static constexpr std::size_t kBlockSize = 4096;  // transitions per block

  double* slot(std::size_t index) {
    const std::size_t block = index / kBlockSize;
    while (block >= blocks_.size()) {
      blocks_.emplace_back(kBlockSize * stride_);
    }
    return blocks_[block].data() + (index % kBlockSize) * stride_;
  }

  const double* slot(std::size_t index) const {
    const std::size_t block = index / kBlockSize;
    return blocks_[block].data() + (index % kBlockSize) * stride_;
  }

  std::size_t capacity_, size_ = 0, next_ = 0;
  int n_agents_, obs_dim_, act_dim_;
  std::size_t stride_ = 0;
  std::vector<std::vector<double>> blocks_;
};

}  // namespace rsrn
