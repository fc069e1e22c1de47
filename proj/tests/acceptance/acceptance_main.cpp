// Acceptance suite: every release criterion as one pass/fail line.
//
//   rsrn_acceptance --tier properties   fast numeric/identity checks
//   rsrn_acceptance --tier behavioral   desk-scale training reproduction
//   rsrn_acceptance --tier all
//
// The behavioral tier trains 6 networks x 3 seeds at the desk-scale budget
// (30,000 episodes, 500 evaluation episodes) plus one determinism rerun;
// completed run directories under --out are reused unless --fresh is given.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rsrn/harness.hpp"

namespace fs = std::filesystem;
using rsrn::Activation;
using rsrn::Mlp;
using rsrn::NetworkPreset;
using rsrn::RelationalNetwork;
using rsrn::Scalarization;

namespace {

struct Options {
  std::string tier = "all";
  std::string out_dir = "acceptance_runs";
  int jobs = 0;
  bool fresh = false;
};

struct Failure {
  std::string detail;
};

using CheckFn = std::function<std::string(const Options&)>;  // empty string = pass

// ---------------------------------------------------------------- helpers

std::string plain_forward(const Mlp&) = delete;

std::vector<double> scalar_forward(const Mlp& net, const std::vector<double>& input) {
  std::vector<double> x = input;
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    const auto rows = static_cast<std::size_t>(net.weights[l].rows());
    std::vector<double> z(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = net.biases[l][static_cast<Eigen::Index>(r)];
      for (std::size_t c = 0; c < x.size(); ++c) {
        acc += net.weights[l](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * x[c];
      }
      z[r] = acc;
    }
    const bool last = l + 1 == net.n_layers();
    for (auto& v : z) {
      if (!last) {
        v = v > 0.0 ? v : 0.0;
      } else if (net.output_activation == Activation::tanh) {
        v = std::tanh(v);
      }
    }
    x = std::move(z);
  }
  return x;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

rsrn::ExperimentConfig desk_config(const std::string& out_dir) {
  rsrn::ExperimentConfig cfg;
  cfg.seeds = {0, 1, 2};
  cfg.eval_episodes = 500;
  cfg.trace_episodes = 3;
  cfg.output_dir = out_dir;
  cfg.train.n_episodes = 30000;
  cfg.train.scalarization = Scalarization::weighted_product;
  for (auto p : {NetworkPreset::survivalist, NetworkPreset::communitarian,
                 NetworkPreset::authoritarian, NetworkPreset::collapsed_authoritarian,
                 NetworkPreset::tribal, NetworkPreset::collapsed_tribal}) {
    rsrn::NetworkSpec spec;
    spec.preset = p;
    spec.label = std::string(rsrn::preset_name(p));
    cfg.networks.push_back(std::move(spec));
  }
  return cfg;
}

bool run_is_complete(const fs::path& run_dir) {
  if (!fs::exists(run_dir / "summary.json") || !fs::exists(run_dir / "run_info.json")) return false;
  try {
    nlohmann::json info;
    std::ifstream(run_dir / "run_info.json") >> info;
    return info.value("status", "") == "ok";
  } catch (...) {
    return false;
  }
}

// Runs (or reuses) the full desk-scale sweep; returns its root directory.
// Completed (network, seed) cells are skipped, so partial sweeps resume.
fs::path ensure_sweep(const Options& opt) {
  auto cfg = desk_config((fs::path(opt.out_dir) / "sweep").string());
  const fs::path root = rsrn::resolve_output_dir(cfg.output_dir);
  if (opt.fresh) fs::remove_all(root);

  // group networks by their set of missing seeds so each group is one
  // parallel run_experiment call
  std::vector<std::pair<std::vector<std::uint64_t>, std::vector<rsrn::NetworkSpec>>> groups;
  std::size_t pending_cells = 0;
  for (const auto& spec : cfg.networks) {
    std::vector<std::uint64_t> missing;
    for (const auto seed : cfg.seeds) {
      if (!run_is_complete(root / spec.label / ("seed_" + std::to_string(seed)))) {
        missing.push_back(seed);
      }
    }
    if (missing.empty()) continue;
    pending_cells += missing.size();
    bool grouped = false;
    for (auto& [seeds, specs] : groups) {
      if (seeds == missing) {
        specs.push_back(spec);
        grouped = true;
        break;
      }
    }
    if (!grouped) groups.push_back({missing, {spec}});
  }
  if (pending_cells > 0) {
    std::cerr << "[acceptance] training " << pending_cells
              << " desk-scale runs (budget: " << cfg.train.n_episodes << " episodes each)\n";
    for (const auto& [seeds, specs] : groups) {
      auto todo = cfg;
      todo.networks = specs;
      todo.seeds = seeds;
      if (rsrn::run_experiment(todo, opt.jobs, std::cerr) != 0) {
        throw std::runtime_error("desk-scale sweep failed");
      }
    }
  }
  // converge the root to the full-sweep state no matter how it was reached
  std::vector<rsrn::RunSummary> runs;
  for (const auto& spec : cfg.networks) {
    for (const auto seed : cfg.seeds) {
      runs.push_back(rsrn::read_run_summary(root / spec.label / ("seed_" + std::to_string(seed))));
    }
  }
  rsrn::write_summary_files(runs, root);
  std::ofstream(root / "resolved_config.json") << rsrn::config_to_json(cfg).dump(2) << "\n";
  return root;
}

// -------------------------------------------------------------- criteria

std::string criterion_gradients(const Options&) {
  const auto started = std::chrono::steady_clock::now();
  rsrn::RandomStream rng(20240901);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int in = 2 + static_cast<int>(rng.bounded(4));
    const int out = 1 + static_cast<int>(rng.bounded(3));
    std::vector<int> sizes{in};
    const int hidden_layers = 1 + static_cast<int>(rng.bounded(2));  // 2 or 3 weight layers
    for (int l = 0; l < hidden_layers; ++l) {
      sizes.push_back(2 + static_cast<int>(rng.bounded(7)));
    }
    sizes.push_back(out);
    const auto act = trial % 2 == 0 ? Activation::identity : Activation::tanh;
    const auto net = rsrn::mlp_init(sizes, act, rng);

    Eigen::VectorXd input(in), upstream(out);
    for (int d = 0; d < in; ++d) input[d] = rng.uniform(-2, 2);
    for (int d = 0; d < out; ++d) upstream[d] = rng.uniform(-2, 2);

    const auto [grads, input_grad] = rsrn::mlp_backward(net, input, upstream);
    const auto loss_of = [&](const Mlp& m) {
      return upstream.dot(rsrn::mlp_forward(m, input));
    };
    const double h = 1e-5;
    for (std::size_t l = 0; l < net.n_layers(); ++l) {
      for (Eigen::Index r = 0; r < net.weights[l].rows(); ++r) {
        for (Eigen::Index c = 0; c < net.weights[l].cols(); ++c) {
          Mlp plus = net, minus = net;
          plus.weights[l](r, c) += h;
          minus.weights[l](r, c) -= h;
          const double fd = (loss_of(plus) - loss_of(minus)) / (2 * h);
          const double an = grads.weights[l](r, c);
          worst = std::max(worst,
                           std::abs(an - fd) / std::max({1.0, std::abs(an), std::abs(fd)}));
        }
      }
      for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) {
        Mlp plus = net, minus = net;
        plus.biases[l][r] += h;
        minus.biases[l][r] -= h;
        const double fd = (loss_of(plus) - loss_of(minus)) / (2 * h);
        const double an = grads.biases[l][r];
        worst = std::max(worst,
                         std::abs(an - fd) / std::max({1.0, std::abs(an), std::abs(fd)}));
      }
    }
    for (Eigen::Index d = 0; d < input.size(); ++d) {
      Eigen::VectorXd plus = input, minus = input;
      plus[d] += h;
      minus[d] -= h;
      Mlp net_copy = net;
      const double fd =
          (upstream.dot(rsrn::mlp_forward(net_copy, plus)) -
           upstream.dot(rsrn::mlp_forward(net_copy, minus))) /
          (2 * h);
      worst = std::max(worst, std::abs(input_grad[d] - fd) /
                                  std::max({1.0, std::abs(input_grad[d]), std::abs(fd)}));
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::ostringstream note;
  note << "max rel err " << worst << ", " << seconds << " s";
  if (worst >= 1e-4) return "finite-difference mismatch: " + note.str();
  if (seconds >= 10.0) return "too slow: " + note.str();
  std::cerr << "  (criterion 1: " << note.str() << ")\n";
  return "";
}

std::string criterion_scalarization(const Options&) {
  const auto vec = [](std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
  };
  const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12; };

  if (!close(rsrn::wsm(vec({0.5, 0.2, 0.9}), vec({0, 0, 1})), 0.9)) return "wsm select failed";
  if (!close(rsrn::wsm(vec({0.5, 0.2, 0.9}), vec({1, 1, 1})), 1.6)) return "wsm sum failed";
  if (rsrn::wsm(vec({0, 0, 0}), vec({2, -3, 0.5})) != 0.0) return "wsm zero failed";
  if (!close(rsrn::wpm(vec({0.5, 0.2, 0.9}), vec({0, 0, 1})), 0.9)) return "wpm select failed";
  if (!close(rsrn::wpm(vec({0.5, 0.2, 0.9}), vec({1, 1, 1})), 0.09)) return "wpm product failed";
  if (rsrn::wpm(vec({0.5, 0.0, 0.9}), vec({1, 1, 1})) != 0.0) return "wpm zero-domination failed";
  if (rsrn::wpm(vec({1, 1, 1}), vec({1, 1, 1})) != 1.0) return "wpm identity failed";

  rsrn::RandomStream rng(20240902);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng.bounded(5));
    Eigen::VectorXd r(n), w(n);
    for (int j = 0; j < n; ++j) {
      r[j] = rng.uniform(0.05, 2.0);
      w[j] = rng.uniform(0.1, 2.0);
    }
    const int j = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
    Eigen::VectorXd hi = r;
    hi[j] += rng.uniform(0.01, 1.0);
    if (!(rsrn::wsm(hi, w) > rsrn::wsm(r, w))) return "wsm monotonicity violated";
    if (!(rsrn::wpm(hi, w) > rsrn::wpm(r, w))) return "wpm monotonicity violated";
    Eigen::VectorXd w_neg = w;
    w_neg[j] = -w[j];
    if (!(rsrn::wsm(hi, w_neg) < rsrn::wsm(r, w_neg))) return "wsm negative-weight direction";
  }
  return "";
}

std::string criterion_presets(const Options&) {
  const auto expect = [](NetworkPreset p, std::initializer_list<double> rows) {
    Eigen::MatrixXd m(3, 3);
    int at = 0;
    for (double v : rows) {
      m(at / 3, at % 3) = v;
      ++at;
    }
    return RelationalNetwork::preset(p, 3).weights() == m;
  };
  if (!expect(NetworkPreset::survivalist, {1, 0, 0, 0, 1, 0, 0, 0, 1})) return "survivalist";
  if (!expect(NetworkPreset::communitarian, {1, 1, 1, 1, 1, 1, 1, 1, 1})) return "communitarian";
  if (!expect(NetworkPreset::authoritarian, {1, 0, 1, 0, 1, 1, 0, 0, 1})) return "authoritarian";
  if (!expect(NetworkPreset::collapsed_authoritarian, {0, 0, 1, 0, 0, 1, 0, 0, 1})) {
    return "collapsed_authoritarian";
  }
  if (!expect(NetworkPreset::tribal, {1, 1, 0, 0, 1, 1, 1, 0, 1})) return "tribal";
  if (!expect(NetworkPreset::collapsed_tribal, {0, 1, 0, 0, 0, 1, 1, 0, 0})) {
    return "collapsed_tribal";
  }
  const auto s = RelationalNetwork::preset(NetworkPreset::survivalist, 3).weights();
  const auto t = RelationalNetwork::preset(NetworkPreset::tribal, 3).weights();
  const auto ct = RelationalNetwork::preset(NetworkPreset::collapsed_tribal, 3).weights();
  if (t != s + ct) return "tribal != survivalist + collapsed_tribal";
  return "";
}

std::string criterion_reward(const Options&) {
  const std::vector<Eigen::Vector2d> landmarks{{0.0, 0.0}};
  if (rsrn::individual_reward({0, 0}, landmarks, 0.1, 0.2) != 1.0) return "d=0 reward";
  if (rsrn::individual_reward({0.2, 0.0}, landmarks, 0.1, 0.2) != 0.0) return "gate not strict";
  if (std::abs(rsrn::individual_reward({0.1, 0.0}, landmarks, 0.1, 0.2) - std::exp(-0.1)) >
      1e-12) {
    return "d=0.1 reward";
  }
  rsrn::WorldConfig cfg;
  cfg.finalize();
  const double lower = std::exp(-0.4);
  rsrn::RandomStream rng(20240903);
  for (int k = 0; k < 100000; ++k) {
    const Eigen::Vector2d p(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const double r =
        rsrn::individual_reward(p, cfg.landmark_positions, cfg.reward_sigma2, cfg.reward_gate);
    if (r != 0.0 && !(r > lower && r <= 1.0)) {
      std::ostringstream bad;
      bad << "reward " << r << " outside {0} U (e^-0.4, 1] at (" << p.x() << ", " << p.y() << ")";
      return bad.str();
    }
  }
  return "";
}

std::string criterion_td_oracle(const Options&) {
  rsrn::WorldConfig world;
  world.finalize();
  rsrn::TrainConfig cfg;
  cfg.hidden_width = 16;
  rsrn::RandomStream rng(20240904);
  auto learners = rsrn::make_learners(world, cfg, rng);
  for (auto& a : learners) {  // targets deliberately different from live nets
    rsrn::RandomStream tweak(rng.next_u64());
    a.target_actor = rsrn::mlp_init(a.actor.layer_sizes, Activation::tanh, tweak);
    a.target_critic = rsrn::mlp_init(a.critic.layer_sizes, Activation::identity, tweak);
  }

  rsrn::Batch batch;
  const int b = 64, n = 3, obs_dim = world.obs_dim();
  batch.obs.assign(n, Eigen::MatrixXd(b, obs_dim));
  batch.next_obs.assign(n, Eigen::MatrixXd(b, obs_dim));
  batch.actions.assign(n, Eigen::MatrixXd(b, 2));
  batch.rewards.resize(b, n);
  batch.done.resize(b);
  for (int r = 0; r < b; ++r) {
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < obs_dim; ++d) {
        batch.obs[static_cast<std::size_t>(i)](r, d) = rng.uniform(-1, 1);
        batch.next_obs[static_cast<std::size_t>(i)](r, d) = rng.uniform(-1, 1);
      }
      batch.actions[static_cast<std::size_t>(i)](r, 0) = rng.uniform(-1, 1);
      batch.actions[static_cast<std::size_t>(i)](r, 1) = rng.uniform(-1, 1);
      batch.rewards(r, i) = rng.uniform(0, 1);
    }
    batch.done[r] = rng.uniform() < 0.25 ? 1.0 : 0.0;
  }

  const double gamma = 0.99;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto got = rsrn::td_targets(learners, i, batch, gamma);
    for (int r = 0; r < b; ++r) {
      std::vector<double> joint;
      for (int j = 0; j < n; ++j) {
        for (int d = 0; d < obs_dim; ++d) {
          joint.push_back(batch.next_obs[static_cast<std::size_t>(j)](r, d));
        }
      }
      for (int j = 0; j < n; ++j) {
        std::vector<double> o;
        for (int d = 0; d < obs_dim; ++d) {
          o.push_back(batch.next_obs[static_cast<std::size_t>(j)](r, d));
        }
        const auto a = scalar_forward(learners[static_cast<std::size_t>(j)].target_actor, o);
        joint.push_back(a[0]);
        joint.push_back(a[1]);
      }
      const double q = scalar_forward(learners[static_cast<std::size_t>(i)].target_critic, joint)[0];
      const double expected = batch.rewards(r, i) + gamma * (1.0 - batch.done[r]) * q;
      worst = std::max(worst, std::abs(got[r] - expected));
    }
  }
  if (worst >= 1e-10) {
    std::ostringstream bad;
    bad << "max abs target diff " << worst;
    return bad.str();
  }
  return "";
}

std::string criterion_determinism(const Options& opt) {
  const fs::path sweep = ensure_sweep(opt);
  // rerun (survivalist, seed 0) standalone and compare artifact bytes
  auto cfg = desk_config((fs::path(opt.out_dir) / "determinism").string());
  cfg.networks.resize(1);  // survivalist is first
  cfg.seeds = {0};
  const fs::path redo_root = rsrn::resolve_output_dir(cfg.output_dir);
  const fs::path redo_run = redo_root / "survivalist" / "seed_0";
  if (opt.fresh || !run_is_complete(redo_run)) {
    fs::remove_all(redo_root);
    if (rsrn::run_experiment(cfg, opt.jobs, std::cerr) != 0) return "determinism rerun failed";
  }
  const fs::path base_run = sweep / "survivalist" / "seed_0";
  for (const char* name : {"metrics.csv", "eval_metrics.csv", "summary.json", "checkpoint.json",
                           "trace_000.trace", "trace_001.trace", "trace_002.trace"}) {
    if (read_file(base_run / name) != read_file(redo_run / name)) {
      return std::string("artifact differs between identical runs: ") + name;
    }
  }
  return "";
}

std::string criterion_survivalist_equivalence(const Options&) {
  rsrn::WorldConfig world;
  world.finalize();
  rsrn::TrainConfig cfg;
  cfg.n_episodes = 100;
  const auto net = RelationalNetwork::preset(NetworkPreset::survivalist, 3);

  std::size_t checked = 0;
  bool all_equal = true;
  rsrn::TrainHooks hooks;
  hooks.on_transition = [&](const rsrn::Transition& t, const Eigen::VectorXd& individual) {
    ++checked;
    if (t.rewards != individual) all_equal = false;
  };
  rsrn::RandomStream rng(20240905);
  rsrn::train(world, cfg, net, rng, &hooks);
  if (checked != 100 * 25) return "unexpected transition count";
  if (!all_equal) return "stored relational rewards differ from individual rewards";
  return "";
}

std::string criterion_survivalist_ordering(const Options& opt) {
  const fs::path sweep = ensure_sweep(opt);
  int good_seeds = 0;
  std::ostringstream note;
  for (int seed = 0; seed < 3; ++seed) {
    const auto s =
        rsrn::read_run_summary(sweep / "survivalist" / ("seed_" + std::to_string(seed)));
    const double hindered = s.mean_individual[2];
    const bool ok =
        s.mean_individual[0] >= 2.0 * hindered && s.mean_individual[1] >= 2.0 * hindered;
    note << " seed" << seed << "=[" << s.mean_individual[0] << ", " << s.mean_individual[1]
         << ", " << hindered << (ok ? "] ok" : "] X");
    if (ok) ++good_seeds;
  }
  std::cerr << "  (criterion 8:" << note.str() << ")\n";
  if (good_seeds < 2) return "unhindered >= 2x hindered in only " +
                             std::to_string(good_seeds) + "/3 seeds:" + note.str();
  return "";
}

std::string criterion_communitarian(const Options& opt) {
  const fs::path sweep = ensure_sweep(opt);
  int good_seeds = 0;
  std::ostringstream note;
  for (int seed = 0; seed < 3; ++seed) {
    const auto comm =
        rsrn::read_run_summary(sweep / "communitarian" / ("seed_" + std::to_string(seed)));
    // hard invariant: identical shared relational rewards
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        if (std::abs(comm.mean_relational[static_cast<std::size_t>(i)] -
                     comm.mean_relational[static_cast<std::size_t>(j)]) > 1e-12) {
          return "relational means differ across agents (violates shared-reward construction)";
        }
      }
    }
    const auto surv =
        rsrn::read_run_summary(sweep / "survivalist" / ("seed_" + std::to_string(seed)));
    const bool ok = comm.mean_individual[2] > surv.mean_individual[2];
    note << " seed" << seed << "=[comm " << comm.mean_individual[2] << " vs surv "
         << surv.mean_individual[2] << (ok ? "] ok" : "] X");
    if (ok) ++good_seeds;
  }
  std::cerr << "  (criterion 9:" << note.str() << ")\n";
  if (good_seeds < 2) return "hindered agent not better off than survivalist in " +
                             std::to_string(3 - good_seeds) + "/3 seeds:" + note.str();
  return "";
}

std::string criterion_collapsed_authoritarian(const Options& opt) {
  const fs::path sweep = ensure_sweep(opt);
  int good_seeds = 0;
  std::ostringstream note;
  for (int seed = 0; seed < 3; ++seed) {
    const auto s = rsrn::read_run_summary(sweep / "collapsed_authoritarian" /
                                          ("seed_" + std::to_string(seed)));
    const bool ok = s.mean_individual[2] >= s.mean_individual[0] &&
                    s.mean_individual[2] >= s.mean_individual[1];
    note << " seed" << seed << "=[" << s.mean_individual[0] << ", " << s.mean_individual[1]
         << ", " << s.mean_individual[2] << (ok ? "] ok" : "] X");
    if (ok) ++good_seeds;
  }
  std::cerr << "  (criterion 10:" << note.str() << ")\n";
  if (good_seeds < 2) return "hindered agent not dominant in " + std::to_string(3 - good_seeds) +
                             "/3 seeds:" + note.str();
  return "";
}

std::string criterion_learning_curves(const Options& opt) {
  const fs::path sweep = ensure_sweep(opt);
  std::ostringstream note;
  for (const char* network : {"survivalist", "communitarian", "authoritarian",
                              "collapsed_authoritarian", "tribal", "collapsed_tribal"}) {
    // seed-averaged per-episode relational reward series
    Eigen::MatrixXd mean_series;
    for (int seed = 0; seed < 3; ++seed) {
      const auto table = rsrn::read_metrics_csv(
          (sweep / network / ("seed_" + std::to_string(seed)) / "metrics.csv").string());
      Eigen::MatrixXd rel(table.values.rows(), 3);
      for (int i = 0; i < 3; ++i) {
        rel.col(i) = table.values.col(table.column("rel_" + std::to_string(i)));
      }
      if (seed == 0) {
        mean_series = rel / 3.0;
      } else {
        if (rel.rows() != mean_series.rows()) return "episode counts differ across seeds";
        mean_series += rel / 3.0;
      }
    }
    const auto episodes = mean_series.rows();
    const auto tenth = episodes / 10;
    if (tenth < 1) return "too few episodes for a 10% window";
    double best_gain = -1e300;
    int best_agent = -1;
    double best_first = 0.0, best_final = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double first = mean_series.col(i).head(tenth).mean();
      const double last = mean_series.col(i).tail(tenth).mean();
      if (last - first > best_gain) {
        best_gain = last - first;
        best_agent = i;
        best_first = first;
        best_final = last;
      }
    }
    note << ' ' << network << "=a" << best_agent << "(" << best_first << "->" << best_final
         << ")";
    if (!(best_final > best_first)) {
      return std::string("no agent improved on ") + network + ":" + note.str();
    }
  }
  std::cerr << "  (criterion 11:" << note.str() << ")\n";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  std::vector<int> only;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    const auto next = [&]() -> std::string {
      if (a + 1 >= argc) {
        std::cerr << "missing value for " << arg << '\n';
        std::exit(2);
      }
      return argv[++a];
    };
    if (arg == "--tier") {
      opt.tier = next();
    } else if (arg == "--out") {
      opt.out_dir = next();
    } else if (arg == "--jobs") {
      opt.jobs = std::stoi(next());
    } else if (arg == "--fresh") {
      opt.fresh = true;
    } else if (arg == "--only") {
      std::stringstream ss(next());
      std::string tok;
      while (std::getline(ss, tok, ',')) only.push_back(std::stoi(tok));
    } else {
      std::cerr << "unknown argument " << arg << '\n';
      return 2;
    }
  }
  if (opt.tier != "properties" && opt.tier != "behavioral" && opt.tier != "all") {
    std::cerr << "--tier must be properties, behavioral, or all\n";
    return 2;
  }

  struct Entry {
    int id;
    const char* title;
    bool behavioral;
    CheckFn fn;
  };
  const std::vector<Entry> entries = {
      {1, "gradient correctness vs central finite differences", false, criterion_gradients},
      {2, "scalarization worked examples and monotonicity", false, criterion_scalarization},
      {3, "preset matrices and matrix identities", false, criterion_presets},
      {4, "gated proximity reward formula and range", false, criterion_reward},
      {5, "TD targets vs independent recomputation", false, criterion_td_oracle},
      {6, "byte-identical desk-scale reruns", true, criterion_determinism},
      {7, "identity network stores raw rewards bitwise", false, criterion_survivalist_equivalence},
      {8, "survivalist: unhindered agents collect >= 2x hindered", true,
       criterion_survivalist_ordering},
      {9, "communitarian: equal shares, hindered agent better off", true, criterion_communitarian},
      {10, "collapsed authoritarian: hindered agent served first", true,
       criterion_collapsed_authoritarian},
      {11, "learning curves rise for the best-served agent", true, criterion_learning_curves},
  };

  int failures = 0, ran = 0;
  for (const auto& entry : entries) {
    const bool tier_match = opt.tier == "all" || (opt.tier == "behavioral") == entry.behavioral;
    const bool only_match =
        only.empty() || std::find(only.begin(), only.end(), entry.id) != only.end();
    if (!tier_match || !only_match) continue;
    ++ran;
    std::string detail;
    try {
      detail = entry.fn(opt);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (detail.empty()) {
      std::cout << "[PASS] criterion " << entry.id << ": " << entry.title << '\n' << std::flush;
    } else {
      std::cout << "[FAIL] criterion " << entry.id << ": " << entry.title << " -- " << detail
                << '\n'
                << std::flush;
      ++failures;
    }
  }
  if (ran == 0) {
    std::cerr << "no criteria selected\n";
    return 2;
  }
  std::cout << (failures == 0 ? "ALL PASS" : "FAILURES: " + std::to_string(failures)) << " ("
            << ran << " criteria)\n";
  return failures == 0 ? 0 : 1;
}
