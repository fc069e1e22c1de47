#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsrn {

inline constexpr const char* kTraceFormatTag = "rsrn.trace/1";

/// Full record of one evaluation episode: landmarks, initial agent
/// positions, then one record per step holding positions, velocities,
/// actions and individual rewards after that step.
struct TrajectoryTrace {
  int n_agents = 0;
  int n_landmarks = 0;
  int episode_length = 0;
  std::vector<Eigen::Vector2d> landmarks;
  Eigen::MatrixXd initial_positions;  // n_agents x 2
  struct Step {
    Eigen::MatrixXd positions;   // n_agents x 2
    Eigen::MatrixXd velocities;  // n_agents x 2
    Eigen::MatrixXd actions;     // n_agents x 2
    Eigen::VectorXd rewards;     // n_agents
  };
  std::vector<Step> steps;
};

namespace detail {

inline std::string full_precision(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(std::istringstream& in, const std::string& what, int record) {
  double v = 0.0;
  if (!(in >> v)) {
    throw std::runtime_error("trace: bad or missing " + what + " in record " +
                             std::to_string(record));
  }
  return v;
}

}  // namespace detail

/// Line-oriented text format, one step record per line:
///   rsrn.trace/1 agents=N landmarks=M steps=T
///   landmarks x0 y0 ... x{M-1} y{M-1}
///   init x0 y0 ... x{N-1} y{N-1}
///   step k  then per agent: px py vx vy ax ay reward
inline void write_trace(const TrajectoryTrace& trace, std::ostream& out) {
  out << kTraceFormatTag << " agents=" << trace.n_agents << " landmarks=" << trace.n_landmarks
      << " steps=" << trace.episode_length << '\n';
  out << "landmarks";
  for (const auto& lm : trace.landmarks) {
    out << ' ' << detail::full_precision(lm.x()) << ' ' << detail::full_precision(lm.y());
  }
  out << '\n' << "init";
  for (int i = 0; i < trace.n_agents; ++i) {
    out << ' ' << detail::full_precision(trace.initial_positions(i, 0)) << ' '
        << detail::full_precision(trace.initial_positions(i, 1));
  }
  out << '\n';
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& s = trace.steps[k];
    out << "step " << k;
    for (int i = 0; i < trace.n_agents; ++i) {
      out << ' ' << detail::full_precision(s.positions(i, 0)) << ' '
          << detail::full_precision(s.positions(i, 1)) << ' '
          << detail::full_precision(s.velocities(i, 0)) << ' '
          << detail::full_precision(s.velocities(i, 1)) << ' '
          << detail::full_precision(s.actions(i, 0)) << ' '
          << detail::full_precision(s.actions(i, 1)) << ' '
          << detail::full_precision(s.rewards[i]);
    }
    out << '\n';
  }
}

inline void write_trace(const TrajectoryTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace: cannot open " + path);
  write_trace(trace, out);
}

inline TrajectoryTrace read_trace(std::istream& in) {
  TrajectoryTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace: empty file");
  {
    std::istringstream head(line);
    std::string tag;
    head >> tag;
    if (tag != kTraceFormatTag) throw std::runtime_error("trace: unknown format tag '" + tag + "'");
    std::string field;
    while (head >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw std::runtime_error("trace: malformed header field '" + field + "'");
      const std::string key = field.substr(0, eq);
      const int value = std::stoi(field.substr(eq + 1));
      if (key == "agents") trace.n_agents = value;
      else if (key == "landmarks") trace.n_landmarks = value;
      else if (key == "steps") trace.episode_length = value;
      else throw std::runtime_error("trace: unknown header field '" + key + "'");
    }
    if (trace.n_agents < 1 || trace.n_landmarks < 1 || trace.episode_length < 1) {
      throw std::runtime_error("trace: incomplete header");
    }
  }
  if (!std::getline(in, line)) throw std::runtime_error("trace: missing landmarks line");
  {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag != "landmarks") throw std::runtime_error("trace: expected landmarks line");
    for (int m = 0; m < trace.n_landmarks; ++m) {
      const double x = detail::parse_double(ls, "landmark x", -2);
      const double y = detail::parse_double(ls, "landmark y", -2);
      trace.landmarks.emplace_back(x, y);
    }
  }
  if (!std::getline(in, line)) throw std::runtime_error("trace: missing init line");
  {
    std::istringstream is(line);
    std::string tag;
    is >> tag;
    if (tag != "init") throw std::runtime_error("trace: expected init line");
    trace.initial_positions.resize(trace.n_agents, 2);
    for (int i = 0; i < trace.n_agents; ++i) {
      trace.initial_positions(i, 0) = detail::parse_double(is, "init x", -1);
      trace.initial_positions(i, 1) = detail::parse_double(is, "init y", -1);
    }
  }
  for (int k = 0; k < trace.episode_length; ++k) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("trace: truncated at step record " + std::to_string(k));
    }
    std::istringstream ss(line);
    std::string tag;
    int index = -1;
    ss >> tag >> index;
    if (tag != "step" || index != k) {
      throw std::runtime_error("trace: bad step record " + std::to_string(k));
    }
    TrajectoryTrace::Step s;
    s.positions.resize(trace.n_agents, 2);
    s.velocities.resize(trace.n_agents, 2);
    s.actions.resize(trace.n_agents, 2);
    s.rewards.resize(trace.n_agents);
    for (int i = 0; i < trace.n_agents; ++i) {
      s.positions(i, 0) = detail::parse_double(ss, "position x", k);
      s.positions(i, 1) = detail::parse_double(ss, "position y", k);
      s.velocities(i, 0) = detail::parse_double(ss, "velocity x", k);
      s.velocities(i, 1) = detail::parse_double(ss, "velocity y", k);
      s.actions(i, 0) = detail::parse_double(ss, "action x", k);
      s.actions(i, 1) = detail::parse_double(ss, "action y", k);
      s.rewards[i] = detail::parse_double(ss, "reward", k);
    }
    trace.steps.push_back(std::move(s));
  }
  return trace;
}

inline TrajectoryTrace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_trace: cannot open " + path);
  return read_trace(in);
}

/// Step-by-step table: one body line per step, fixed-width columns with
/// each agent's position and reward.
inline void render_trace(const TrajectoryTrace& trace, std::ostream& out) {
  char buf[64];
  out << "step";
  for (int i = 0; i < trace.n_agents; ++i) {
    std::snprintf(buf, sizeof(buf), " %10s %10s %8s", ("a" + std::to_string(i) + ".x").c_str(),
                  ("a" + std::to_string(i) + ".y").c_str(), ("a" + std::to_string(i) + ".r").c_str());
    out << buf;
  }
  out << '\n';
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%4zu", k);
    out << buf;
    for (int i = 0; i < trace.n_agents; ++i) {
      std::snprintf(buf, sizeof(buf), " %10.4f %10.4f %8.4f", trace.steps[k].positions(i, 0),
                    trace.steps[k].positions(i, 1), trace.steps[k].rewards[i]);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace rsrn
