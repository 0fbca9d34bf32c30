#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kbandit/adversary.hpp"
#include "kbandit/gp.hpp"
#include "kbandit/kernel.hpp"
#include "kbandit/learner.hpp"

namespace kbandit {

enum class AdversaryKind {
  FullyAdversarial,  // candidate-pool argmax of conditional expected regret
  HardInstanceNoise, // base function plus truncated-Gaussian kernel bump
  ObliviousRandom,   // fixed random schedule, cycled
  Zero,              // reward identically zero
};

const char* adversary_name(AdversaryKind kind);

struct TrialConfig {
  std::string setting = "setting1";
  int dim = 1;
  int points_per_axis = 100;
  Kernel kernel = Kernel::se(0.3);
  int horizon = 150;
  LearnerKind learner = LearnerKind::KernelizedExp3;
  ScheduleMode schedule = ScheduleMode::TunedDefaults;
  MigMode mig = MigMode::ClosedFormRate;
  double rkhs_bound = 2.0;
  double delta = 0.1;
  AdversaryKind adversary = AdversaryKind::FullyAdversarial;
  int n_candidates = 300;
  int n_centers = 100;
  int n_oblivious = 5;
  std::uint64_t seed = 1;
  bool timing = true;
  // Explicit overrides of the derived schedule, applied after derivation.
  std::optional<double> eta;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<ScheduleConstants> constants;
};

// Derives the learner parameters a trial will run with: MIG surrogate, then
// the schedule for the configured mode, then any explicit overrides.
LearnerParams resolve_params(const TrialConfig& config);

struct TrialResult {
  std::uint64_t seed = 0;
  std::vector<int> arms;                  // chosen arm per round
  Eigen::VectorXd played_rewards;         // f_t(x_t)
  Eigen::MatrixXd cumulative_rewards;     // row t-1: sum_{i<=t} f_i(x) per arm
  Eigen::VectorXd regret;                 // R_t = max_x cum_t(x) - sum played
  std::vector<std::int64_t> round_ns;     // learner-step wall clock, 0 if timing off
  long fallback_count = 0;
  // FNV-1a over each round's committed reward values, then the chosen arm,
  // in protocol order; pins down that f_t was fixed before the draw.
  std::uint64_t commit_hash = 0;

  double final_regret() const {
    return regret.size() > 0 ? regret(regret.size() - 1) : 0.0;
  }
  double mean_round_ms() const;
};

// Executes one seeded trial: each round the adversary commits f_t from the
// current sampling distribution, the learner draws and observes, and the
// accounting updates. Learner/adversary failures are rethrown with the
// round index attached.
TrialResult run_trial(const TrialConfig& config);

struct SummaryRecord {
  std::string setting;
  std::string kernel;
  std::string learner;
  int horizon = 0;
  double mean_regret = 0.0;
  double two_se = 0.0;       // 2 * sd / sqrt(n)
  double mean_round_ms = 0.0;
  int n_trials = 0;
};

SummaryRecord summarize(const TrialConfig& config,
                        const std::vector<TrialResult>& trials);

struct ExperimentRun {
  std::vector<TrialResult> trials;  // seed order: base .. base+n-1
  SummaryRecord summary;
};

// Runs n_seeds trials (seeds config.seed .. config.seed + n_seeds - 1),
// concurrently up to `threads`. Results are ordered by seed, so the outcome
// is independent of scheduling. The first trial error aborts the experiment.
ExperimentRun run_experiment(const TrialConfig& config, int n_seeds,
                             int threads);

// The desk-scale results grid: cross product of two settings, two kernels
// per setting, all four learners and two horizons.
std::vector<TrialConfig> table2_grid(std::uint64_t base_seed);

// Friendly kernel label used in result files ("se", "matern32", ...).
std::string kernel_label(const Kernel& kernel);

}  // namespace kbandit
