#pragma once

#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "kbandit/domain.hpp"
#include "kbandit/exploration.hpp"
#include "kbandit/feature_map.hpp"
#include "kbandit/kernel.hpp"
#include "kbandit/rng.hpp"

namespace kbandit {

enum class LearnerKind {
  KernelizedExp3,
  RlsKernelizedExp3,
  RlsKernelizedExp3ApproxMvr,
  Random,
};

// Short stable identifier used in result files and the CLI.
const char* learner_name(LearnerKind kind);

// How eta and alpha are derived from (T, B, gamma_hat):
//  - TunedDefaults:    eta = c3 / sqrt(T * gamma_hat), alpha = c4 * eta * gamma_hat.
//  - TheoremConstants: same eta (clipped against eta_bar for the exact
//    learner), alpha from the variant-specific analytic form.
// beta is always the analytic width: B sqrt(lambda/T) for the exact learner
// and B (1 + sqrt 2) sqrt(lambda/T) for the sketched variants.
enum class ScheduleMode { TunedDefaults, TheoremConstants };

// Per-kernel tuning constants for the default schedule, exposed so configs
// can override them.
struct ScheduleConstants {
  double c3 = 5.0;
  double c4 = 0.1;
  double lambda = 1.0;
};

ScheduleConstants tuned_constants(const Kernel& kernel);

struct LearnerParams {
  double eta = 0.0;        // learning rate
  double alpha = 0.0;      // exploration mixing ratio, in (0, 1)
  double beta = 0.0;       // confidence width multiplier
  double lambda = 1.0;     // regularizer, >= 1
  double rkhs_bound = 1.0; // B
  int horizon = 0;         // T
  double delta = 0.1;      // confidence, sketched variants only
  double gamma_hat = 0.0;  // MIG surrogate the schedule was derived from
  // eta_bar = (2 (2 B gamma_hat + beta sqrt(gamma_hat)))^-1; the exact
  // learner's eta is clipped to 0.99 eta_bar in TheoremConstants mode.
  double eta_bar = std::numeric_limits<double>::infinity();
  bool eta_clipped = false;

  // ceil(T * alpha), the exploration-design length.
  int mvr_budget() const;
};

LearnerParams derive_params(LearnerKind kind, ScheduleMode mode,
                            double gamma_hat, int horizon, double rkhs_bound,
                            double delta, const ScheduleConstants& constants);

// Optional per-round capture for tests and diagnostics. `sampling` is the
// distribution the arm was drawn from, `estimates` and `widths` the reward
// estimate and the beta-scaled confidence bonus over all arms (empty for the
// Random learner), so the score increment is estimates + widths.
struct StepRecord {
  int arm = -1;
  double reward = 0.0;
  Eigen::VectorXd sampling;
  Eigen::VectorXd estimates;
  Eigen::VectorXd widths;
  bool used_fallback = false;
  bool sampling_full_identity = true;
  int sampling_columns = 0;
};

struct LearnerState {
  LearnerKind kind = LearnerKind::Random;
  LearnerParams params;
  Kernel kernel = Kernel::se(1.0);
  InputDomain domain;
  Eigen::MatrixXd gram;     // empty for Random
  FeatureMap features;      // empty for Random
  ExplorationDistribution exploration;
  Eigen::VectorXd exploration_weights;
  Eigen::VectorXd cumulative_scores;
  Eigen::VectorXd sampling; // current P_t
  int round = 0;            // completed rounds
  RngStream rng;
  long fallback_count = 0;  // sketched rounds that fell back to the exact step
  // Running diagnostics over all learning steps so far.
  double max_eta_score = -std::numeric_limits<double>::infinity();
  double max_abs_score = 0.0;

  int n_arms() const { return static_cast<int>(sampling.size()); }
};

// The mixed distribution alpha * exploration + (1 - alpha) * softmax(eta * scores),
// computed with max-subtraction. Exposed for shift-invariance tests; the
// steps use it internally after every score update.
Eigen::VectorXd mixed_sampling(const LearnerParams& params,
                               const Eigen::VectorXd& exploration_weights,
                               const Eigen::VectorXd& scores);

// Round-reward oracle: the learner calls it exactly once, at the arm it
// played. The environment must have committed the function before the call.
using RewardFn = std::function<double(int arm)>;

LearnerState kexp3_init(const Kernel& kernel, const InputDomain& domain,
                        const LearnerParams& params, RngStream rng);
int kexp3_step(LearnerState& state, const RewardFn& reward,
               StepRecord* record = nullptr);

LearnerState rls_kexp3_init(const Kernel& kernel, const InputDomain& domain,
                            const LearnerParams& params, RngStream rng);
int rls_kexp3_step(LearnerState& state, const RewardFn& reward,
                   StepRecord* record = nullptr);

LearnerState rls_kexp3_approx_mvr_init(const Kernel& kernel,
                                       const InputDomain& domain,
                                       const LearnerParams& params,
                                       RngStream rng);

LearnerState random_init(const Kernel& kernel, const InputDomain& domain,
                         const LearnerParams& params, RngStream rng);
int random_step(LearnerState& state, const RewardFn& reward,
                StepRecord* record = nullptr);

// Dispatch on state.kind.
LearnerState learner_init(LearnerKind kind, const Kernel& kernel,
                          const InputDomain& domain,
                          const LearnerParams& params, RngStream rng);
int learner_step(LearnerState& state, const RewardFn& reward,
                 StepRecord* record = nullptr);

}  // namespace kbandit
