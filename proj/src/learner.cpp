#include "kbandit/learner.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>

#include "kbandit/nystrom.hpp"

namespace kbandit {
namespace {

// Tags for child streams so the per-round sketching randomness never touches
// the arm-draw stream: the trajectory comparison between the exact and the
// sketched learner relies on both consuming exactly one parent uniform per
// round.
constexpr std::uint64_t kExplorationTag = 1;
constexpr std::uint64_t kRoundTagBase = 16;

bool is_learning(LearnerKind kind) { return kind != LearnerKind::Random; }

bool is_sketched(LearnerKind kind) {
  return kind == LearnerKind::RlsKernelizedExp3 ||
         kind == LearnerKind::RlsKernelizedExp3ApproxMvr;
}

void validate_params(LearnerKind kind, const LearnerParams& p) {
  if (p.horizon < 1) throw std::invalid_argument("learner: horizon must be >= 1");
  if (p.lambda < 1.0) throw std::invalid_argument("learner: lambda must be >= 1");
  if (!(p.rkhs_bound > 0.0))
    throw std::invalid_argument("learner: rkhs_bound must be positive");
  if (!is_learning(kind)) return;
  if (!(p.eta > 0.0)) throw std::invalid_argument("learner: eta must be positive");
  if (!(p.alpha > 0.0 && p.alpha < 1.0))
    throw std::invalid_argument("learner: alpha must lie in (0, 1)");
  if (!(p.beta >= 0.0)) throw std::invalid_argument("learner: beta must be >= 0");
  if (p.mvr_budget() < 1)
    throw std::invalid_argument("learner: ceil(T * alpha) must be >= 1");
  if (is_sketched(kind) && !(p.delta > 0.0 && p.delta < 1.0))
    throw std::invalid_argument("learner: delta must lie in (0, 1)");
}

// Shared clamp policy: quadratic forms that are nonnegative in exact
// arithmetic may come out a hair below zero; anything beyond rounding noise
// means the linear algebra went wrong.
double clamp_nonneg(double v, const char* what) {
  if (v >= 0.0) return v;
  if (v >= -1e-10) return 0.0;
  throw std::runtime_error(std::string("learner: negative ") + what);
}

void refresh_sampling(LearnerState& s) {
  s.sampling = mixed_sampling(s.params, s.exploration_weights, s.cumulative_scores);
}

int draw_arm(LearnerState& s) {
  // Inverse CDF over the fixed domain ordering, one uniform per round.
  const double u = s.rng.next_double();
  const int n = s.n_arms();
  double cum = 0.0;
  for (int i = 0; i < n; ++i) {
    cum += s.sampling(i);
    if (u < cum) return i;
  }
  return n - 1;
}

// Exact estimator and width at the current sampling distribution:
//   G = sum_x P(x) psi(x) psi(x)^T + (lambda/T) I,
//   estimate(x) = psi(x)^T G^-1 psi(x_t) f_t(x_t),
//   width(x)    = beta ||psi(x)||_{G^-1}.
std::pair<Eigen::VectorXd, Eigen::VectorXd> exact_scores(const LearnerState& s,
                                                         int x_played,
                                                         double reward) {
  const Eigen::MatrixXd& L = s.features.L;
  const int n = s.n_arms();
  Eigen::MatrixXd G = L.transpose() * s.sampling.asDiagonal() * L;
  G.diagonal().array() += s.params.lambda / s.params.horizon;
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("learner: Cholesky of the sampling design failed");
  Eigen::VectorXd estimates =
      reward * (L * llt.solve(L.row(x_played).transpose()));
  // Diagonal of L G^-1 L^T via one solve against all feature vectors.
  Eigen::MatrixXd W = llt.solve(L.transpose());
  Eigen::VectorXd widths(n);
  for (int i = 0; i < n; ++i) {
    double q = clamp_nonneg(L.row(i).dot(W.col(i)), "feature norm");
    widths(i) = s.params.beta * std::sqrt(q);
  }
  return {std::move(estimates), std::move(widths)};
}

void finish_step(LearnerState& s, int arm, double reward,
                 Eigen::VectorXd estimates, Eigen::VectorXd widths,
                 StepRecord* record, bool used_fallback, bool full_identity,
                 int sampling_columns) {
  if (record != nullptr) {
    record->arm = arm;
    record->reward = reward;
    record->sampling = s.sampling;
    record->estimates = estimates;
    record->widths = widths;
    record->used_fallback = used_fallback;
    record->sampling_full_identity = full_identity;
    record->sampling_columns = sampling_columns;
  }
  Eigen::VectorXd scores = std::move(estimates) + widths;
  s.cumulative_scores += scores;
  s.round += 1;
  s.max_eta_score = std::max(s.max_eta_score, s.params.eta * scores.maxCoeff());
  s.max_abs_score = std::max(s.max_abs_score, scores.cwiseAbs().maxCoeff());
  refresh_sampling(s);
}

void check_round(const LearnerState& s) {
  if (s.round >= s.params.horizon)
    throw std::invalid_argument("learner: horizon exhausted");
}

LearnerState init_core(LearnerKind kind, const Kernel& kernel,
                       const InputDomain& domain, const LearnerParams& params,
                       RngStream rng) {
  validate_params(kind, params);
  LearnerState s;
  s.kind = kind;
  s.params = params;
  s.kernel = kernel;
  s.domain = domain;
  s.rng = rng;
  const int n = domain.size();
  if (kind == LearnerKind::Random) {
    s.exploration = uniform_exploration(n);
    s.exploration_weights = s.exploration.weights();
    s.cumulative_scores = Eigen::VectorXd::Zero(n);
    s.sampling = Eigen::VectorXd::Constant(n, 1.0 / n);
    return s;
  }
  s.gram = kernel_matrix(kernel, domain);
  s.features = build_feature_map(s.gram);
  const int budget = params.mvr_budget();
  std::vector<int> design;
  if (kind == LearnerKind::RlsKernelizedExp3ApproxMvr) {
    design = approx_mvr_sequence(s.gram, params.lambda, budget,
                                 params.delta / 6.0, rng.split(kExplorationTag));
    s.exploration = empirical_distribution(design, n, ExplorationSource::ApproxMVR);
  } else {
    design = mvr_sequence(s.gram, params.lambda, budget);
    s.exploration = empirical_distribution(design, n, ExplorationSource::MVR);
  }
  s.exploration_weights = s.exploration.weights();
  s.cumulative_scores = Eigen::VectorXd::Zero(n);
  refresh_sampling(s);
  return s;
}

}  // namespace

const char* learner_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::KernelizedExp3: return "kexp3";
    case LearnerKind::RlsKernelizedExp3: return "rls_kexp3";
    case LearnerKind::RlsKernelizedExp3ApproxMvr: return "rls_kexp3_amvr";
    case LearnerKind::Random: return "random";
  }
  return "unknown";
}

ScheduleConstants tuned_constants(const Kernel& kernel) {
  if (kernel.family == KernelFamily::SquaredExponential) return {5.0, 0.1, 1.0};
  if (kernel.nu == 2.5) return {10.0, 0.1, 10.0};
  return {5.0, 0.1, 5.0};
}

int LearnerParams::mvr_budget() const {
  return static_cast<int>(std::ceil(static_cast<double>(horizon) * alpha));
}

LearnerParams derive_params(LearnerKind kind, ScheduleMode mode,
                            double gamma_hat, int horizon, double rkhs_bound,
                            double delta, const ScheduleConstants& constants) {
  if (horizon < 1) throw std::invalid_argument("derive_params: horizon must be >= 1");
  if (!(gamma_hat > 0.0))
    throw std::invalid_argument("derive_params: gamma_hat must be positive");
  if (!(rkhs_bound > 0.0))
    throw std::invalid_argument("derive_params: rkhs_bound must be positive");
  if (!(constants.c3 > 0.0 && constants.c4 > 0.0))
    throw std::invalid_argument("derive_params: tuning constants must be positive");
  if (constants.lambda < 1.0)
    throw std::invalid_argument("derive_params: lambda must be >= 1");

  LearnerParams p;
  p.lambda = constants.lambda;
  p.rkhs_bound = rkhs_bound;
  p.horizon = horizon;
  p.delta = delta;
  p.gamma_hat = gamma_hat;
  const double ratio = std::sqrt(p.lambda / horizon);
  const bool sketched = is_sketched(kind);
  p.beta = sketched ? rkhs_bound * (1.0 + std::sqrt(2.0)) * ratio
                    : rkhs_bound * ratio;
  p.eta = constants.c3 / std::sqrt(static_cast<double>(horizon) * gamma_hat);
  const double root_gamma = std::sqrt(gamma_hat);
  p.eta_bar =
      1.0 / (2.0 * (2.0 * rkhs_bound * gamma_hat + p.beta * root_gamma));
  if (mode == ScheduleMode::TheoremConstants &&
      kind == LearnerKind::KernelizedExp3 && p.eta >= p.eta_bar) {
    // The analysis needs eta strictly below eta_bar; the tuned rate can land
    // far above it at short horizons.
    p.eta = 0.99 * p.eta_bar;
    p.eta_clipped = true;
    std::cerr << "derive_params: eta clipped to 0.99 * eta_bar = " << p.eta
              << "\n";
  }
  double alpha = 0.0;
  if (mode == ScheduleMode::TunedDefaults) {
    alpha = constants.c4 * p.eta * gamma_hat;
  } else {
    switch (kind) {
      case LearnerKind::KernelizedExp3:
      case LearnerKind::Random:
        alpha = 2.0 * p.eta *
                (2.0 * rkhs_bound * gamma_hat + p.beta * root_gamma);
        break;
      case LearnerKind::RlsKernelizedExp3:
        alpha = 2.0 * p.eta * std::sqrt(3.0) *
                (2.0 * std::sqrt(2.0) * rkhs_bound * gamma_hat +
                 p.beta * root_gamma);
        break;
      case LearnerKind::RlsKernelizedExp3ApproxMvr:
        alpha = p.eta * (36.0 * std::sqrt(6.0) * rkhs_bound * gamma_hat +
                         p.beta * std::sqrt(108.0 * gamma_hat));
        break;
    }
  }
  p.alpha = std::min(alpha, 0.999);
  return p;
}

Eigen::VectorXd mixed_sampling(const LearnerParams& params,
                               const Eigen::VectorXd& exploration_weights,
                               const Eigen::VectorXd& scores) {
  Eigen::VectorXd z = params.eta * scores;
  Eigen::VectorXd soft = (z.array() - z.maxCoeff()).exp();
  soft /= soft.sum();
  Eigen::VectorXd p =
      params.alpha * exploration_weights + (1.0 - params.alpha) * soft;
  if (std::abs(p.sum() - 1.0) > 1e-12)
    throw std::runtime_error("learner: sampling distribution does not sum to 1");
  return p;
}

LearnerState kexp3_init(const Kernel& kernel, const InputDomain& domain,
                        const LearnerParams& params, RngStream rng) {
  return init_core(LearnerKind::KernelizedExp3, kernel, domain, params, rng);
}

int kexp3_step(LearnerState& s, const RewardFn& reward_fn, StepRecord* record) {
  if (s.kind != LearnerKind::KernelizedExp3)
    throw std::invalid_argument("kexp3_step: wrong learner kind");
  check_round(s);
  const int arm = draw_arm(s);
  const double reward = reward_fn(arm);
  auto [estimates, widths] = exact_scores(s, arm, reward);
  finish_step(s, arm, reward, std::move(estimates), std::move(widths), record,
              false, true, s.n_arms());
  return arm;
}

LearnerState rls_kexp3_init(const Kernel& kernel, const InputDomain& domain,
                            const LearnerParams& params, RngStream rng) {
  return init_core(LearnerKind::RlsKernelizedExp3, kernel, domain, params, rng);
}

int rls_kexp3_step(LearnerState& s, const RewardFn& reward_fn,
                   StepRecord* record) {
  if (!is_sketched(s.kind))
    throw std::invalid_argument("rls_kexp3_step: wrong learner kind");
  check_round(s);
  const int arm = draw_arm(s);
  const double reward = reward_fn(arm);
  const int t = s.round + 1;
  Eigen::VectorXd estimates, widths;
  bool used_fallback = false;
  bool full_identity = true;
  int columns = 0;
  try {
    WeightedKernelView view =
        WeightedKernelView::weighted_full(s.gram, s.sampling);
    const double lambda_eff = s.params.lambda / s.params.horizon;
    const double round_delta = s.params.delta / (3.0 * s.params.horizon);
    SamplingMatrix S = recursive_rls_nystrom(view, lambda_eff, round_delta,
                                             s.rng.split(kRoundTagBase + t));
    NystromEmbedding emb = nystrom_embedding(view, S);
    ApproxPosterior post =
        build_approx_posterior(view, emb, s.sampling, s.params.lambda,
                               s.params.horizon);
    estimates = approx_estimate(post, arm, reward);
    Eigen::VectorXd variance = approx_variance_all(view, post);
    widths.resize(variance.size());
    for (int i = 0; i < variance.size(); ++i)
      widths(i) = s.params.beta *
                  std::sqrt(clamp_nonneg(variance(i), "sketched variance"));
    full_identity = S.is_full_identity();
    columns = S.cols();
  } catch (const std::runtime_error& err) {
    std::cerr << "rls_kexp3_step: round " << t << " sketch failed ("
              << err.what() << "); using the exact step\n";
    std::tie(estimates, widths) = exact_scores(s, arm, reward);
    used_fallback = true;
    s.fallback_count += 1;
    full_identity = true;
    columns = s.n_arms();
  }
  finish_step(s, arm, reward, std::move(estimates), std::move(widths), record,
              used_fallback, full_identity, columns);
  return arm;
}

LearnerState rls_kexp3_approx_mvr_init(const Kernel& kernel,
                                       const InputDomain& domain,
                                       const LearnerParams& params,
                                       RngStream rng) {
  return init_core(LearnerKind::RlsKernelizedExp3ApproxMvr, kernel, domain,
                   params, rng);
}

LearnerState random_init(const Kernel& kernel, const InputDomain& domain,
                         const LearnerParams& params, RngStream rng) {
  return init_core(LearnerKind::Random, kernel, domain, params, rng);
}

int random_step(LearnerState& s, const RewardFn& reward_fn, StepRecord* record) {
  if (s.kind != LearnerKind::Random)
    throw std::invalid_argument("random_step: wrong learner kind");
  check_round(s);
  const int arm = s.rng.next_index(s.n_arms());
  const double reward = reward_fn(arm);
  if (record != nullptr) {
    record->arm = arm;
    record->reward = reward;
    record->sampling = s.sampling;
    record->estimates.resize(0);
    record->widths.resize(0);
    record->used_fallback = false;
    record->sampling_full_identity = true;
    record->sampling_columns = 0;
  }
  s.round += 1;
  return arm;
}

LearnerState learner_init(LearnerKind kind, const Kernel& kernel,
                          const InputDomain& domain,
                          const LearnerParams& params, RngStream rng) {
  return init_core(kind, kernel, domain, params, rng);
}

int learner_step(LearnerState& s, const RewardFn& reward_fn,
                 StepRecord* record) {
  switch (s.kind) {
    case LearnerKind::KernelizedExp3:
      return kexp3_step(s, reward_fn, record);
    case LearnerKind::RlsKernelizedExp3:
    case LearnerKind::RlsKernelizedExp3ApproxMvr:
      return rls_kexp3_step(s, reward_fn, record);
    case LearnerKind::Random:
      return random_step(s, reward_fn, record);
  }
  throw std::invalid_argument("learner_step: unknown learner kind");
}

}  // namespace kbandit
