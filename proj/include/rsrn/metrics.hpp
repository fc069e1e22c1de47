#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsrn/trainer.hpp"

namespace rsrn {

namespace detail {

inline std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Streams one CSV line per training episode:
///   episode,ind_0..,rel_0..,critic_loss_0..
/// Wall-clock never enters this file; content is seed-deterministic.
class MetricsWriter {
 public:
  MetricsWriter(std::ostream& out, int n_agents) : out_(out), n_agents_(n_agents) {
    out_ << "episode";
    for (int i = 0; i < n_agents; ++i) out_ << ",ind_" << i;
    for (int i = 0; i < n_agents; ++i) out_ << ",rel_" << i;
    for (int i = 0; i < n_agents; ++i) out_ << ",critic_loss_" << i;
    out_ << '\n';
  }

  void write(const EpisodeMetrics& m) {
    out_ << m.episode;
    for (int i = 0; i < n_agents_; ++i) out_ << ',' << detail::csv_double(m.individual_sum[i]);
    for (int i = 0; i < n_agents_; ++i) out_ << ',' << detail::csv_double(m.relational_sum[i]);
    for (int i = 0; i < n_agents_; ++i) out_ << ',' << detail::csv_double(m.critic_loss[i]);
    out_ << '\n';
  }

 private:
  std::ostream& out_;
  int n_agents_;
};

/// One CSV line per evaluation episode: episode,ind_0..,rel_0..
inline void write_eval_metrics(std::ostream& out, const Eigen::MatrixXd& per_episode_individual,
                               const Eigen::MatrixXd& per_episode_relational) {
  const auto n = per_episode_individual.cols();
  out << "episode";
  for (Eigen::Index i = 0; i < n; ++i) out << ",ind_" << i;
  for (Eigen::Index i = 0; i < n; ++i) out << ",rel_" << i;
  out << '\n';
  for (Eigen::Index e = 0; e < per_episode_individual.rows(); ++e) {
    out << e;
    for (Eigen::Index i = 0; i < n; ++i) {
      out << ',' << detail::csv_double(per_episode_individual(e, i));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      out << ',' << detail::csv_double(per_episode_relational(e, i));
    }
    out << '\n';
  }
}

struct MetricsTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;  // rows x columns

  Eigen::Index column(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c] == name) return static_cast<Eigen::Index>(c);
    }
    throw std::runtime_error("metrics: no column named '" + name + "'");
  }
};

inline MetricsTable read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_metrics_csv: cannot open " + path);
  MetricsTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_metrics_csv: empty file " + path);
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.columns.push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("read_metrics_csv: bad value at " + path + ":" +
                                 std::to_string(line_no));
      }
    }
    if (row.size() != table.columns.size()) {
      throw std::runtime_error("read_metrics_csv: wrong field count at " + path + ":" +
                               std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return table;
}

}  // namespace rsrn
