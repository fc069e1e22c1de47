#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rsrn {

/// The six shipped network configurations. The four 3-agent-only presets
/// encode who is served by whom in the fixed scenario where the last agent
/// (index 2) is the slow one.
enum class NetworkPreset {
  survivalist,
  communitarian,
  authoritarian,
  collapsed_authoritarian,
  tribal,
  collapsed_tribal,
};

inline std::string_view preset_name(NetworkPreset p) {
  switch (p) {
    case NetworkPreset::survivalist: return "survivalist";
    case NetworkPreset::communitarian: return "communitarian";
    case NetworkPreset::authoritarian: return "authoritarian";
    case NetworkPreset::collapsed_authoritarian: return "collapsed_authoritarian";
    case NetworkPreset::tribal: return "tribal";
    case NetworkPreset::collapsed_tribal: return "collapsed_tribal";
  }
  throw std::invalid_argument("preset_name: unknown preset");
}

inline std::optional<NetworkPreset> parse_preset(std::string_view name) {
  using P = NetworkPreset;
  for (P p : {P::survivalist, P::communitarian, P::authoritarian,
              P::collapsed_authoritarian, P::tribal, P::collapsed_tribal}) {
    if (name == preset_name(p)) return p;
  }
  return std::nullopt;
}

/// Weighted digraph over the agents. weights(i, j) says how strongly agent
/// i's training signal depends on agent j's individual reward; row i is
/// agent i's weight vector. Immutable after construction.
class RelationalNetwork {
 public:
  static RelationalNetwork from_matrix(const Eigen::MatrixXd& weights) {
    if (weights.rows() != weights.cols() || weights.rows() < 1) {
      throw std::invalid_argument("RelationalNetwork: weight matrix must be square, side >= 1");
    }
    if (!weights.allFinite()) {
      throw std::invalid_argument("RelationalNetwork: weight matrix has non-finite entries");
    }
    return RelationalNetwork(weights);
  }

  static RelationalNetwork preset(NetworkPreset p, int n_agents) {
    if (n_agents < 1) throw std::invalid_argument("preset: n_agents must be >= 1");
    const auto n = static_cast<Eigen::Index>(n_agents);
    switch (p) {
      case NetworkPreset::survivalist:
        return RelationalNetwork(Eigen::MatrixXd::Identity(n, n));
      case NetworkPreset::communitarian:
        return RelationalNetwork(Eigen::MatrixXd::Ones(n, n));
      default:
        break;
    }
    if (n_agents != 3) {
      throw std::invalid_argument(std::string(preset_name(p)) +
                                  " is defined for 3 agents only");
    }
    Eigen::MatrixXd w(3, 3);
    switch (p) {
      case NetworkPreset::authoritarian:
        w << 1, 0, 1,
             0, 1, 1,
             0, 0, 1;
        break;
      case NetworkPreset::collapsed_authoritarian:
        w << 0, 0, 1,
             0, 0, 1,
             0, 0, 1;
        break;
      case NetworkPreset::tribal:
        // cycle 0 -> 1 -> 2 -> 0, plus self-loops
        w << 1, 1, 0,
             0, 1, 1,
             1, 0, 1;
        break;
      case NetworkPreset::collapsed_tribal:
        // same cycle, self-loops removed
        w << 0, 1, 0,
             0, 0, 1,
             1, 0, 0;
        break;
      default:
        throw std::invalid_argument("preset: unknown preset");
    }
    return RelationalNetwork(w);
  }

  int n_agents() const { return static_cast<int>(weights_.rows()); }

  const Eigen::MatrixXd& weights() const { return weights_; }

  double weight(int i, int j) const {
    check_index(i);
    check_index(j);
    return weights_(i, j);
  }

  /// Agent i's weight vector (copy of row i).
  Eigen::VectorXd row(int i) const {
    check_index(i);
    return weights_.row(i).transpose();
  }

 private:
  explicit RelationalNetwork(Eigen::MatrixXd weights) : weights_(std::move(weights)) {}

  void check_index(int i) const {
    if (i < 0 || i >= n_agents()) {
      throw std::out_of_range("RelationalNetwork: agent index out of range");
    }
  }

  Eigen::MatrixXd weights_;
};

}  // namespace rsrn
