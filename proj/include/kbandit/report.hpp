#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kbandit/harness.hpp"

namespace kbandit {

// One learner's regret trajectories across seeds, for plotting.
struct TrajectoryGroup {
  std::string label;
  std::vector<Eigen::VectorXd> trajectories;  // one per seed, length T
};

// All floating-point output is rendered with 6 significant digits ("%.6g"),
// which keeps repeated runs byte-comparable.
std::string format_number(double v);

// results.csv: header
//   setting,kernel,learner,T,mean_regret,two_se,mean_round_ms,n_trials
// and one row per record.
std::string results_csv(const std::vector<SummaryRecord>& records);

// Same records as a JSON array of flat objects.
std::string results_json(const std::vector<SummaryRecord>& records);

// Long-form per-round regret: label,seed,round,cumulative_regret.
std::string trajectories_csv(const std::vector<TrajectoryGroup>& groups);
std::vector<TrajectoryGroup> parse_trajectories_csv(const std::string& text);

// Self-contained SVG: one mean-regret polyline per group with a shaded
// 2-standard-error band when more than one trajectory is present.
std::string regret_plot_svg(const std::vector<TrajectoryGroup>& groups);

// Writes content to path, creating parent directories; throws on I/O errors.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

TrajectoryGroup trajectory_group(const std::string& label,
                                 const std::vector<TrialResult>& trials);

}  // namespace kbandit
