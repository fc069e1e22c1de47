#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsrn/config.hpp"
#include "rsrn/harness.hpp"

namespace {

// --network accepts a label from the config or any preset name
void restrict_network(rsrn::ExperimentConfig& cfg, const std::string& name) {
  for (const auto& spec : cfg.networks) {
    if (spec.label == name) {
      cfg.networks = {spec};
      return;
    }
  }
  const auto preset = rsrn::parse_preset(name);
  if (!preset) {
    throw std::invalid_argument("--network: '" + name +
                                "' is neither a configured label nor a preset name");
  }
  rsrn::NetworkSpec spec;
  spec.preset = *preset;
  spec.label = name;
  cfg.networks = {spec};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward-sharing relational network training harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string network_override, scalarization_override, out_override;
  std::uint64_t seed_override = 0;
  int episodes_override = -1;
  int jobs = 0;

  auto* run = app.add_subcommand("run", "Train and evaluate every (network, seed) in a config");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--seed-override", seed_override, "replace the config's seed list with one seed");
  run->add_option("--episodes", episodes_override, "override train.n_episodes");
  run->add_option("--network", network_override, "restrict to one network (label or preset)");
  run->add_option("--scalarization", scalarization_override, "override scalarization (wpm|wsm)");
  run->add_option("--out", out_override, "override output_dir");
  run->add_option("--jobs", jobs, "parallel worker threads (default: hardware)");

  std::vector<std::string> summarize_paths;
  std::string summarize_out;
  auto* summarize = app.add_subcommand("summarize", "Aggregate run directories into a table");
  summarize->add_option("dirs", summarize_paths, "run directories or roots containing them")
      ->required()
      ->expected(-1);
  summarize->add_option("--out", summarize_out, "also write summary.json/summary.txt here");

  std::string trace_path;
  auto* replay = app.add_subcommand("replay", "Render a trajectory trace as a step table");
  replay->add_option("trace", trace_path, "trace file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      rsrn::ExperimentConfig cfg = rsrn::load_config(config_path);
      if (run->count("--seed-override") > 0) cfg.seeds = {seed_override};
      if (episodes_override >= 0) cfg.train.n_episodes = episodes_override;
      if (!network_override.empty()) restrict_network(cfg, network_override);
      if (!scalarization_override.empty()) {
        const auto method = rsrn::parse_scalarization(scalarization_override);
        if (!method) throw std::invalid_argument("--scalarization must be wpm or wsm");
        cfg.train.scalarization = *method;
      }
      if (!out_override.empty()) cfg.output_dir = out_override;
      cfg.validate();
      return rsrn::run_experiment(cfg, jobs, std::cout);
    }
    if (summarize->parsed()) {
      return rsrn::summarize_paths(summarize_paths, summarize_out, std::cout);
    }
    if (replay->parsed()) {
      return rsrn::replay_trace_file(trace_path, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
