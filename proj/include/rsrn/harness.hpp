#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rsrn/checkpoint.hpp"
#include "rsrn/config.hpp"
#include "rsrn/metrics.hpp"
#include "rsrn/trace.hpp"
#include "rsrn/trainer.hpp"

namespace rsrn {

inline constexpr const char* kRunSummaryFormatTag = "rsrn.run-summary/1";
inline constexpr const char* kSummaryFormatTag = "rsrn.summary/1";
inline constexpr const char* kCheckpointFormatTag = "rsrn.checkpoint/1";
inline constexpr const char* kOutputRootEnvVar = "RSRN_OUTPUT_ROOT";

/// Per-run result as persisted in summary.json.
struct RunSummary {
  std::string network;
  std::uint64_t seed = 0;
  int n_agents = 0;
  int train_episodes = 0;
  int eval_episodes = 0;
  std::string scalarization;
  std::vector<double> mean_individual;
  std::vector<double> mean_relational;
};

namespace detail {

inline nlohmann::json run_summary_to_json(const RunSummary& s) {
  nlohmann::json j;
  j["format"] = kRunSummaryFormatTag;
  j["network"] = s.network;
  j["seed"] = s.seed;
  j["n_agents"] = s.n_agents;
  j["train_episodes"] = s.train_episodes;
  j["eval_episodes"] = s.eval_episodes;
  j["scalarization"] = s.scalarization;
  j["mean_individual"] = s.mean_individual;
  j["mean_relational"] = s.mean_relational;
  return j;
}

inline RunSummary run_summary_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != kRunSummaryFormatTag) {
    throw std::runtime_error("run summary: missing or unknown format tag");
  }
  RunSummary s;
  s.network = j.at("network").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.n_agents = j.at("n_agents").get<int>();
  s.train_episodes = j.at("train_episodes").get<int>();
  s.eval_episodes = j.at("eval_episodes").get<int>();
  s.scalarization = j.at("scalarization").get<std::string>();
  s.mean_individual = j.at("mean_individual").get<std::vector<double>>();
  s.mean_relational = j.at("mean_relational").get<std::vector<double>>();
  if (s.mean_individual.size() != static_cast<std::size_t>(s.n_agents) ||
      s.mean_relational.size() != static_cast<std::size_t>(s.n_agents)) {
    throw std::runtime_error("run summary: reward vector length mismatch");
  }
  return s;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

}  // namespace detail

/// Output directory root: $RSRN_OUTPUT_ROOT prefixes relative output dirs.
inline std::filesystem::path resolve_output_dir(const std::string& output_dir) {
  std::filesystem::path p(output_dir);
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv(kOutputRootEnvVar); root && *root) {
    return std::filesystem::path(root) / p;
  }
  return p;
}

/// Trains and evaluates one (network, seed) cell and writes the run
/// directory: metrics.csv, eval_metrics.csv, summary.json, checkpoint.json,
/// trace files, run_info.json. Everything except run_info.json is a pure
/// function of the config.
inline RunSummary execute_run(const ExperimentConfig& cfg, const NetworkSpec& spec,
                              std::uint64_t seed, const std::filesystem::path& run_dir) {
  namespace fs = std::filesystem;
  const auto started = std::chrono::steady_clock::now();
  WorldConfig world = cfg.world;
  world.finalize();
  const RelationalNetwork net = spec.build(world.n_agents);

  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = seed;

  fs::create_directories(run_dir);

  std::ofstream metrics_out(run_dir / "metrics.csv");
  if (!metrics_out) throw std::runtime_error("cannot open metrics.csv in " + run_dir.string());
  MetricsWriter metrics(metrics_out, world.n_agents);
  TrainHooks hooks;
  hooks.on_episode = [&](const EpisodeMetrics& m) { metrics.write(m); };

  RandomStream train_rng(seed);
  TrainResult trained = train(world, train_cfg, net, train_rng, &hooks);
  metrics_out.close();

  RandomStream eval_rng = RandomStream(seed).derive(1);
  EvalResult eval = evaluate(trained.learners, world, net, train_cfg.scalarization,
                             cfg.eval_episodes, eval_rng, cfg.trace_episodes,
                             train_cfg.reward_floor);

  {
    std::ofstream eval_out(run_dir / "eval_metrics.csv");
    write_eval_metrics(eval_out, eval.per_episode_individual, eval.per_episode_relational);
  }
  for (std::size_t k = 0; k < eval.traces.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "trace_%03zu.trace", k);
    write_trace(eval.traces[k], (run_dir / name).string());
  }
  {
    nlohmann::json ckpt;
    ckpt["format"] = kCheckpointFormatTag;
    ckpt["network"] = spec.label;
    ckpt["seed"] = seed;
    nlohmann::json agents = nlohmann::json::array();
    for (const auto& learner : trained.learners) {
      nlohmann::json a;
      a["actor"] = mlp_to_json(learner.actor);
      a["critic"] = mlp_to_json(learner.critic);
      agents.push_back(std::move(a));
    }
    ckpt["agents"] = std::move(agents);
    detail::write_text_file(run_dir / "checkpoint.json", ckpt.dump(2) + "\n");
  }

  RunSummary summary;
  summary.network = spec.label;
  summary.seed = seed;
  summary.n_agents = world.n_agents;
  summary.train_episodes = static_cast<int>(trained.history.size());
  summary.eval_episodes = cfg.eval_episodes;
  summary.scalarization = std::string(scalarization_name(train_cfg.scalarization));
  for (int i = 0; i < world.n_agents; ++i) {
    summary.mean_individual.push_back(eval.mean_individual[i]);
    summary.mean_relational.push_back(eval.mean_relational[i]);
  }
  detail::write_text_file(run_dir / "summary.json",
                          detail::run_summary_to_json(summary).dump(2) + "\n");
  {
    nlohmann::json info;
    info["format"] = "rsrn.run-info/1";
    info["status"] = "ok";
    info["env_steps"] = trained.env_steps;
    info["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    detail::write_text_file(run_dir / "run_info.json", info.dump(2) + "\n");
  }
  return summary;
}

/// Seed-averaged comparison row for one network.
struct AggregateRow {
  std::string network;
  int n_agents = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> mean_individual, std_individual;
  std::vector<double> mean_relational, std_relational;
};

/// Groups per-run summaries by network label (first-appearance order) and
/// averages across seeds; std is the sample standard deviation (0 for a
/// single seed).
inline std::vector<AggregateRow> aggregate_summaries(const std::vector<RunSummary>& runs) {
  std::vector<AggregateRow> rows;
  for (const auto& run : runs) {
    AggregateRow* row = nullptr;
    for (auto& r : rows) {
      if (r.network == run.network) {
        row = &r;
        break;
      }
    }
    if (!row) {
      rows.push_back(AggregateRow{});
      row = &rows.back();
      row->network = run.network;
      row->n_agents = run.n_agents;
    } else if (row->n_agents != run.n_agents) {
      throw std::runtime_error("summarize: agent count differs across runs of '" + run.network + "'");
    }
    row->seeds.push_back(run.seed);
  }
  for (auto& row : rows) {
    const int n = row.n_agents;
    for (int i = 0; i < n; ++i) {
      std::vector<double> ind, rel;
      for (const auto& run : runs) {
        if (run.network != row.network) continue;
        ind.push_back(run.mean_individual[static_cast<std::size_t>(i)]);
        rel.push_back(run.mean_relational[static_cast<std::size_t>(i)]);
      }
      const auto mean_of = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
      };
      const auto std_of = [&](const std::vector<double>& v, double mean) {
        if (v.size() < 2) return 0.0;
        double s = 0.0;
        for (double x : v) s += (x - mean) * (x - mean);
        return std::sqrt(s / static_cast<double>(v.size() - 1));
      };
      const double mi = mean_of(ind), mr = mean_of(rel);
      row.mean_individual.push_back(mi);
      row.std_individual.push_back(std_of(ind, mi));
      row.mean_relational.push_back(mr);
      row.std_relational.push_back(std_of(rel, mr));
    }
  }
  return rows;
}

inline nlohmann::json summary_to_json(const std::vector<AggregateRow>& rows,
                                      const std::vector<RunSummary>& runs) {
  nlohmann::json j;
  j["format"] = kSummaryFormatTag;
  nlohmann::json networks = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r;
    r["network"] = row.network;
    r["n_agents"] = row.n_agents;
    r["seeds"] = row.seeds;
    r["mean_individual"] = row.mean_individual;
    r["std_individual"] = row.std_individual;
    r["mean_relational"] = row.mean_relational;
    r["std_relational"] = row.std_relational;
    nlohmann::json per_seed = nlohmann::json::array();
    for (const auto& run : runs) {
      if (run.network != row.network) continue;
      nlohmann::json p;
      p["seed"] = run.seed;
      p["mean_individual"] = run.mean_individual;
      p["mean_relational"] = run.mean_relational;
      per_seed.push_back(std::move(p));
    }
    r["per_seed"] = std::move(per_seed);
    networks.push_back(std::move(r));
  }
  j["networks"] = std::move(networks);
  return j;
}

/// Human-readable comparison table mirroring the per-network evaluation
/// reports: one line per (network, agent) with seed-averaged means.
inline std::string summary_table(const std::vector<AggregateRow>& rows) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-26s %-6s %5s  %14s %10s  %14s %10s\n", "network", "seeds",
                "agent", "individual", "std", "relational", "std");
  out << line;
  for (const auto& row : rows) {
    for (int i = 0; i < row.n_agents; ++i) {
      std::snprintf(line, sizeof(line), "%-26s %-6zu %5d  %14.6f %10.6f  %14.6f %10.6f\n",
                    row.network.c_str(), row.seeds.size(), i,
                    row.mean_individual[static_cast<std::size_t>(i)],
                    row.std_individual[static_cast<std::size_t>(i)],
                    row.mean_relational[static_cast<std::size_t>(i)],
                    row.std_relational[static_cast<std::size_t>(i)]);
      out << line;
    }
  }
  return out.str();
}

inline RunSummary read_run_summary(const std::filesystem::path& run_dir) {
  const auto path = run_dir / "summary.json";
  std::ifstream in(path);
  if (!in) throw std::runtime_error("summarize: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("summarize: corrupt " + path.string() + ": " + e.what());
  }
  return detail::run_summary_from_json(j);
}

namespace detail {

/// A run directory holds a summary.json tagged rsrn.run-summary/1; roots
/// hold the aggregate tag instead.
inline bool is_run_dir(const std::filesystem::path& p) {
  const auto file = p / "summary.json";
  if (!std::filesystem::exists(file)) return false;
  try {
    nlohmann::json j;
    std::ifstream in(file);
    in >> j;
    return j.value("format", "") == kRunSummaryFormatTag;
  } catch (...) {
    return false;
  }
}

}  // namespace detail

/// Finds run directories under the given paths (each either a run dir or a
/// root containing them), in sorted order for reproducible output.
inline std::vector<std::filesystem::path> discover_run_dirs(
    const std::vector<std::string>& paths) {
  namespace fs = std::filesystem;
  std::vector<fs::path> found;
  for (const auto& raw : paths) {
    const fs::path p(raw);
    if (!fs::exists(p)) throw std::runtime_error("summarize: no such path " + raw);
    if (detail::is_run_dir(p)) {
      found.push_back(p);
      continue;
    }
    std::vector<fs::path> nested;
    for (const auto& entry : fs::recursive_directory_iterator(p)) {
      if (entry.is_regular_file() && entry.path().filename() == "summary.json" &&
          entry.path().parent_path() != p && detail::is_run_dir(entry.path().parent_path())) {
        nested.push_back(entry.path().parent_path());
      }
    }
    std::sort(nested.begin(), nested.end());
    found.insert(found.end(), nested.begin(), nested.end());
  }
  if (found.empty()) throw std::runtime_error("summarize: no run directories found");
  return found;
}

inline void write_summary_files(const std::vector<RunSummary>& runs,
                                const std::filesystem::path& dir) {
  const auto rows = aggregate_summaries(runs);
  detail::write_text_file(dir / "summary.json", summary_to_json(rows, runs).dump(2) + "\n");
  detail::write_text_file(dir / "summary.txt", summary_table(rows));
}

/// Runs every (network, seed) cell of the experiment, in parallel worker
/// threads writing to disjoint run directories, then writes the aggregate
/// summary at the output root. Returns 0 on success.
inline int run_experiment(const ExperimentConfig& cfg, int jobs = 0,
                          std::ostream& log = std::cout) {
  namespace fs = std::filesystem;
  cfg.validate();  // complete validation before any directory is created

  struct Cell {
    const NetworkSpec* spec;
    std::uint64_t seed;
    fs::path dir;
  };
  const fs::path root = resolve_output_dir(cfg.output_dir);
  std::vector<Cell> cells;
  for (const auto& spec : cfg.networks) {
    for (const auto seed : cfg.seeds) {
      cells.push_back(Cell{&spec, seed, root / spec.label / ("seed_" + std::to_string(seed))});
    }
  }

  fs::create_directories(root);
  detail::write_text_file(root / "resolved_config.json", config_to_json(cfg).dump(2) + "\n");

  std::vector<RunSummary> summaries(cells.size());
  std::vector<std::string> errors(cells.size());
  std::mutex log_mutex;
  std::size_t next_cell = 0;
  std::mutex next_mutex;

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_workers =
      std::min<std::size_t>(jobs > 0 ? static_cast<std::size_t>(jobs) : hw, cells.size());

  const auto worker = [&] {
    for (;;) {
      std::size_t mine;
      {
        std::lock_guard lock(next_mutex);
        if (next_cell >= cells.size()) return;
        mine = next_cell++;
      }
      const Cell& cell = cells[mine];
      {
        std::lock_guard lock(log_mutex);
        log << "[run] " << cell.spec->label << " seed " << cell.seed << " -> "
            << cell.dir.string() << '\n'
            << std::flush;
      }
      try {
        summaries[mine] = execute_run(cfg, *cell.spec, cell.seed, cell.dir);
        std::lock_guard lock(log_mutex);
        log << "[done] " << cell.spec->label << " seed " << cell.seed << '\n' << std::flush;
      } catch (const std::exception& e) {
        errors[mine] = e.what();
        // flag the partial run directory
        try {
          nlohmann::json info;
          info["format"] = "rsrn.run-info/1";
          info["status"] = std::string("failed: ") + e.what();
          fs::create_directories(cell.dir);
          detail::write_text_file(cell.dir / "run_info.json", info.dump(2) + "\n");
        } catch (...) {
        }
        std::lock_guard lock(log_mutex);
        log << "[failed] " << cell.spec->label << " seed " << cell.seed << ": " << e.what() << '\n'
            << std::flush;
      }
    }
  };

  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  bool ok = true;
  std::vector<RunSummary> good;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (errors[k].empty()) {
      good.push_back(summaries[k]);
    } else {
      ok = false;
    }
  }
  if (!good.empty()) write_summary_files(good, root);
  if (!ok) {
    log << "[error] " << (cells.size() - good.size()) << " of " << cells.size()
        << " runs failed\n";
    return 1;
  }
  return 0;
}

/// `summarize` entry point: reads run dirs, writes summary files into
/// out_dir (when given), prints the table to `log`.
inline int summarize_paths(const std::vector<std::string>& paths, const std::string& out_dir,
                           std::ostream& log) {
  const auto dirs = discover_run_dirs(paths);
  std::vector<RunSummary> runs;
  runs.reserve(dirs.size());
  for (const auto& d : dirs) runs.push_back(read_run_summary(d));
  const auto rows = aggregate_summaries(runs);
  log << summary_table(rows);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_summary_files(runs, out_dir);
  }
  return 0;
}

/// `replay` entry point: renders a stored trace as a step table.
inline int replay_trace_file(const std::string& path, std::ostream& out) {
  const TrajectoryTrace trace = read_trace(path);
  render_trace(trace, out);
  return 0;
}

}  // namespace rsrn
