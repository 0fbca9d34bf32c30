#pragma once

#include <string>
#include <vector>

#include "kbandit/harness.hpp"

namespace kbandit {

// Parsed from the optional [defaults] section of a config file.
struct RunDefaults {
  int seeds = 10;
  int threads = 0;  // 0 → hardware concurrency
  std::string format = "csv";
};

struct NamedTrial {
  std::string name;
  TrialConfig config;
};

struct ExperimentConfig {
  RunDefaults defaults;
  std::vector<NamedTrial> trials;
};

// Flat key = value sections:
//   [defaults]            seeds, threads, format
//   [trial NAME]          setting, dim, points_per_axis, kernel, lengthscale,
//                         horizon, learner, adversary, candidates, centers,
//                         oblivious, rkhs_bound, delta, schedule, mig, seed,
//                         timing, eta, alpha, beta, c3, c4, lambda
// Unknown keys and malformed lines raise std::runtime_error with the line number.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace kbandit
