#include "kbandit/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "kbandit/adversary.hpp"
#include "kbandit/domain.hpp"
#include "kbandit/exploration.hpp"
#include "kbandit/feature_map.hpp"
#include "kbandit/gp.hpp"
#include "kbandit/harness.hpp"
#include "kbandit/kernel.hpp"
#include "kbandit/learner.hpp"
#include "kbandit/nystrom.hpp"
#include "kbandit/report.hpp"
#include "kbandit/rkhs.hpp"
#include "kbandit/rng.hpp"

namespace kbandit {

namespace {

std::string num(double v) { return format_number(v); }

Eigen::VectorXd random_probability(RngStream& rng, int n, double floor) {
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p(i) = floor + rng.next_double();
  return p / p.sum();
}

int draw_from(const Eigen::VectorXd& p, RngStream& rng) {
  double u = rng.next_double();
  double acc = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    acc += p(i);
    if (u < acc) return i;
  }
  return static_cast<int>(p.size()) - 1;
}

Eigen::MatrixXd dense_view(const WeightedKernelView& view) {
  Eigen::MatrixXd K(view.size(), view.size());
  for (int i = 0; i < view.size(); ++i)
    for (int j = 0; j < view.size(); ++j) K(i, j) = view.entry(i, j);
  return K;
}

// Orthogonal projector onto the column space of U. A nonnegative `rank`
// fixes the dimension kept (the production embedding's own pseudo-inverse
// cut), so both computation routes project onto the same span even when the
// spectrum decays smoothly through the drop threshold.
Eigen::MatrixXd projector_onto(const Eigen::MatrixXd& U, int rank = -1) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(U, Eigen::ComputeThinU);
  if (rank < 0) {
    const double tol = 1e-10 * svd.singularValues().maxCoeff();
    rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > tol) ++rank;
  }
  rank = std::min<int>(rank, static_cast<int>(svd.matrixU().cols()));
  const Eigen::MatrixXd Uk = svd.matrixU().leftCols(rank);
  return Uk * Uk.transpose();
}

double min_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

int default_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

// ---------------------------------------------------------------------------
// 1. Sampled-design quadratic form vs Monte-Carlo mean posterior variance:
//    psi(z)^T G^-1 psi(z) <= (T/lambda) E[sigma^2(z; X_T, lambda)] within
//    three MC standard errors, across kernels and random designs.
CheckResult check_lemma1() {
  CheckResult r;
  r.name = "lemma1";
  const int n = 15, T = 100, samples = 2000, queries = 5;
  const double lambda = 1.0;
  const InputDomain domain = build_grid_domain(1, n);
  int violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (int inst = 0; inst < 20; ++inst) {
    const Kernel kernel =
        (inst % 2 == 0) ? Kernel::se(0.3) : Kernel::matern(1.5, 0.3);
    const Eigen::MatrixXd K = kernel_matrix(kernel, domain);
    const FeatureMap fm = build_feature_map(K);
    RngStream rng = make_stream(600 + static_cast<std::uint64_t>(inst), 9);
    const Eigen::VectorXd p = random_probability(rng, n, 0.05);

    Eigen::MatrixXd G = (lambda / T) * Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
      G.noalias() += p(i) * fm.psi(i) * fm.psi(i).transpose();
    const Eigen::LLT<Eigen::MatrixXd> llt(G);

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < samples; ++s) {
      TrainingSet train(T);
      for (int t = 0; t < T; ++t) train[t] = draw_from(p, rng);
      const Eigen::VectorXd all = posterior_variance_all(K, train, lambda);
      sum += all;
      sumsq += all.cwiseProduct(all);
    }
    for (int q = 0; q < queries; ++q) {
      const int z = rng.next_index(n);
      const double quad = fm.psi(z).dot(llt.solve(fm.psi(z)));
      const double mean = sum(z) / samples;
      const double var =
          (sumsq(z) - samples * mean * mean) / (samples - 1.0);
      const double se = std::sqrt(std::max(var, 0.0) / samples);
      const double bound = (T / lambda) * (mean + 3.0 * se);
      min_slack = std::min(min_slack, bound - quad);
      if (quad > bound) ++violations;
    }
  }
  r.passed = violations == 0;
  r.detail = "20 instances x 5 queries, 2000 MC samples each: " +
             std::to_string(violations) + " violations, min slack " +
             num(min_slack);
  return r;
}

// ---------------------------------------------------------------------------
// 2. The sketched estimator and variance from the embedding path match the
//    explicit |X|-dimensional projected-design computation within 1e-6.
CheckResult check_nystrom_identity() {
  CheckResult r;
  r.name = "nystrom_identity";
  RngStream rng(7701);
  double max_est = 0.0, max_var = 0.0;
  int violations = 0;
  for (int inst = 0; inst < 50; ++inst) {
    Kernel kernel = Kernel::matern(0.5, 0.3);
    int n_max = 30;
    switch (inst % 4) {
      case 0: kernel = Kernel::matern(0.5, 0.25 + 0.25 * rng.next_double()); break;
      case 1: kernel = Kernel::matern(1.5, 0.25 + 0.25 * rng.next_double()); break;
      case 2: kernel = Kernel::matern(2.5, 0.25 + 0.2 * rng.next_double()); break;
      case 3:
        // SE grams get stiff quickly in 1D; keep them small enough that the
        // factorization surrogate stays essentially exact.
        kernel = Kernel::se(0.2 + 0.15 * rng.next_double());
        n_max = 20;
        break;
    }
    const int n = 8 + rng.next_index(n_max - 7);
    const int T = rng.next_double() < 0.5 ? 20 : 50;
    const double lambda = 1.0 + rng.next_double();
    const InputDomain domain = build_grid_domain(1, n);
    const Eigen::MatrixXd K = kernel_matrix(kernel, domain);
    const Eigen::VectorXd P = random_probability(rng, n, 0.05);
    const WeightedKernelView view = WeightedKernelView::weighted_full(K, P);

    SamplingMatrix S;
    S.source_size = n;
    std::vector<double> w;
    for (int i = 0; i < n; ++i) {
      if (rng.next_double() < 0.7) {
        S.rows.push_back(i);
        w.push_back(1.0 / std::sqrt(0.3 + 0.7 * rng.next_double()));
      }
    }
    if (S.rows.empty()) {
      S.rows.push_back(0);
      w.push_back(1.0);
    }
    S.weights =
        Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<long>(w.size()));

    const NystromEmbedding emb = nystrom_embedding(view, S);
    const ApproxPosterior post = build_approx_posterior(view, emb, P, lambda, T);

    const FeatureMap fm = build_feature_map(K);
    if (fm.jitter > 1e-10)
      throw std::runtime_error("oracle feature map needed jitter " +
                               std::to_string(fm.jitter));
    const Eigen::MatrixXd Psibar =
        fm.L.transpose() * P.cwiseSqrt().asDiagonal();
    Eigen::MatrixXd PsiS(n, S.cols());
    for (int j = 0; j < S.cols(); ++j)
      PsiS.col(j) = S.weights(j) * Psibar.col(S.rows[j]);
    const Eigen::MatrixXd Q = projector_onto(PsiS, emb.rank);
    const Eigen::MatrixXd Gtilde =
        Q * (Psibar * Psibar.transpose()) * Q +
        (lambda / T) * Eigen::MatrixXd::Identity(n, n);
    const Eigen::LLT<Eigen::MatrixXd> llt(Gtilde);

    const int played = rng.next_index(n);
    const double reward =
        (rng.next_double() < 0.5 ? -1.0 : 1.0) * (0.5 + 1.5 * rng.next_double());
    const Eigen::VectorXd fast_est = approx_estimate(post, played, reward);
    const Eigen::VectorXd fast_var = approx_variance_all(view, post);
    const Eigen::VectorXd solve = llt.solve(Q * fm.psi(played));
    for (int x = 0; x < n; ++x) {
      const double est_oracle = reward * fm.psi(x).dot(solve);
      const double var_oracle = fm.psi(x).dot(llt.solve(fm.psi(x)));
      const double de = std::abs(fast_est(x) - est_oracle);
      const double dv = std::abs(fast_var(x) - var_oracle);
      max_est = std::max(max_est, de);
      max_var = std::max(max_var, dv);
      if (de > 1e-6 || dv > 1e-6) ++violations;
    }
  }
  r.passed = violations == 0;
  r.detail = "50 instances: max |d estimate| " + num(max_est) +
             ", max |d variance| " + num(max_var) + " (tolerance 1e-6)";
  return r;
}

// ---------------------------------------------------------------------------
// 3. Spectral sandwich frequency: 500 sampler runs on a 300-point weighted
//    kernel at delta = 0.05. At this size the sampler's base case returns the
//    exact identity, for which the sandwich holds with equality; runs are
//    counted through that exactness argument and a subset is additionally
//    verified by eigendecomposition.
CheckResult check_sandwich() {
  CheckResult r;
  r.name = "sandwich";
  const int n = 300, runs = 500;
  const double delta = 0.05, lambda_eff = 1.0 / 150.0;
  const InputDomain domain = build_grid_domain(1, n);
  const Eigen::MatrixXd K = kernel_matrix(Kernel::se(0.3), domain);
  RngStream rng(3301);
  int success = 0, eigen_checked = 0, identity_runs = 0;
  for (int run = 0; run < runs; ++run) {
    const Eigen::VectorXd P = random_probability(rng, n, 0.01);
    const WeightedKernelView view = WeightedKernelView::weighted_full(K, P);
    const SamplingMatrix S = recursive_rls_nystrom(
        view, lambda_eff, delta,
        make_stream(2000 + static_cast<std::uint64_t>(run), 11));

    bool holds = false;
    const bool exact_identity = S.is_full_identity();
    if (exact_identity) {
      ++identity_runs;
      holds = true;
    }
    if (!exact_identity || run % 100 == 0) {
      // Explicit eigenvalue check of
      //   1/2 (A + lam I) <= Psi_S Psi_S^T + lam I <= 3/2 (A + lam I).
      const Eigen::MatrixXd Ktil = dense_view(view);
      const FeatureMap fm = build_feature_map(Ktil);
      const Eigen::MatrixXd Psibar = fm.L.transpose();
      Eigen::MatrixXd PsiS(n, S.cols());
      for (int j = 0; j < S.cols(); ++j)
        PsiS.col(j) = S.weights(j) * Psibar.col(S.rows[j]);
      const Eigen::MatrixXd A = Psibar * Psibar.transpose();
      const Eigen::MatrixXd sampled = PsiS * PsiS.transpose();
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      const bool lower =
          min_eig(sampled + lambda_eff * I - 0.5 * (A + lambda_eff * I)) >=
          -1e-8;
      const bool upper =
          min_eig(1.5 * (A + lambda_eff * I) - sampled - lambda_eff * I) >=
          -1e-8;
      holds = lower && upper;
      ++eigen_checked;
    }
    if (holds) ++success;
  }
  const double sigma = std::sqrt(runs * 0.85 * 0.15);
  const double threshold = 0.85 * runs - 3.0 * sigma;
  r.passed = success >= threshold;
  r.detail = std::to_string(success) + "/" + std::to_string(runs) +
             " runs satisfy the sandwich (need >= " + num(threshold) + "); " +
             std::to_string(identity_runs) +
             " exact-identity base cases, eigen-verified on " +
             std::to_string(eigen_checked);
  return r;
}

// ---------------------------------------------------------------------------
// 4. Greedy max-variance design chain on a 200-point SE grid:
//    max_x s2(x; X_M) <= (1/M) sum_t s2(x_t; X_{t-1}) <= 2 IG(X_M)/(M log 2).
CheckResult check_mvr_chain() {
  CheckResult r;
  r.name = "mvr_chain";
  const InputDomain domain = build_grid_domain(1, 200);
  const Eigen::MatrixXd K = kernel_matrix(Kernel::se(0.3), domain);
  const double lambda = 1.0, tol = 1e-8;
  std::ostringstream detail;
  bool ok = true;
  for (int M : {10, 25, 50}) {
    std::vector<Eigen::VectorXd> trace;
    const std::vector<int> seq = mvr_sequence(K, lambda, M, &trace);
    double pick_sum = K(seq[0], seq[0]);  // prior variance of the first pick
    for (int t = 1; t < M; ++t) pick_sum += trace[t - 1](seq[t]);
    const double max_after = trace.back().maxCoeff();
    const double middle = pick_sum / M;
    const double ig = information_gain(K, seq, lambda);
    const double right = 2.0 * ig / (M * std::log(2.0));
    const bool first = max_after <= middle + tol;
    const bool second = middle <= right + tol;
    ok = ok && first && second;
    detail << "M=" << M << ": " << num(max_after) << " <= " << num(middle)
           << " <= " << num(right) << (first && second ? "" : " VIOLATED")
           << "; ";
  }
  r.passed = ok;
  r.detail = detail.str() + "tolerance 1e-8";
  return r;
}

// ---------------------------------------------------------------------------
// 5. Estimator bias identity on |X| = 20: the exhaustive conditional
//    expectation of the one-sample estimate equals
//    f(x) - (lambda/T) psi(x)^T G^-1 theta within 1e-8, on 10 live rounds.
CheckResult check_bias_identity() {
  CheckResult r;
  r.name = "bias_identity";
  const int n = 20, rounds = 10;
  const Kernel kernel = Kernel::se(0.3);
  const InputDomain domain = build_grid_domain(1, n);
  const Eigen::MatrixXd K = kernel_matrix(kernel, domain);
  const double B = 2.0;

  LearnerParams params;
  params.eta = 0.1;
  params.alpha = 0.2;
  params.beta = 0.1;
  params.lambda = 1.0;
  params.rkhs_bound = B;
  params.horizon = rounds;
  params.gamma_hat = 5.0;
  LearnerState state = kexp3_init(kernel, domain, params, make_stream(77, 0));
  RngStream frng = make_stream(77, 1);

  double worst = 0.0;
  for (int t = 0; t < rounds; ++t) {
    Eigen::VectorXd coeff(n);
    for (int i = 0; i < n; ++i) coeff(i) = 2.0 * frng.next_double() - 1.0;
    const RkhsFunction f = clip_to_ball(make_rkhs_function(K, coeff), K, B);

    const Eigen::VectorXd P = state.sampling;
    const double lt = params.lambda / params.horizon;
    const FeatureMap& fm = state.features;
    Eigen::MatrixXd G = lt * Eigen::MatrixXd::Identity(n, n);
    G.noalias() += fm.L.transpose() * P.asDiagonal() * fm.L;
    const Eigen::LLT<Eigen::MatrixXd> llt(G);

    // E_{y~P}[f_hat(.)] = psi(.)^T G^-1 sum_y P(y) f(y) psi(y).
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int y = 0; y < n; ++y) v += P(y) * f.values(y) * fm.psi(y);
    const Eigen::VectorXd expectation = fm.L * llt.solve(v);

    // f(x) - (lambda/T) psi(x)^T G^-1 theta with L theta = values.
    const Eigen::VectorXd theta =
        fm.L.triangularView<Eigen::Lower>().solve(f.values);
    const Eigen::VectorXd predicted = f.values - lt * (fm.L * llt.solve(theta));

    worst = std::max(worst,
                     (expectation - predicted).cwiseAbs().maxCoeff());
    kexp3_step(state, [&](int arm) { return f.value(arm); });
  }
  r.passed = worst <= 1e-8;
  r.detail = "10 rounds on |X|=20: max |E[f_hat] - identity| = " + num(worst) +
             " (tolerance 1e-8)";
  return r;
}

// ---------------------------------------------------------------------------
// 6. Uniform estimator bounds over a full desk-scale adversarial run
//    (|X| = 100, T = 150, analytic schedule): eta * u <= 1 and
//    u <= (2/alpha)(2 B gamma + beta sqrt(gamma)) for the exact learner,
//    |u~| <= B T/lambda + beta sqrt(T/lambda) for the sketched one.
CheckResult check_estimator_bounds() {
  CheckResult r;
  r.name = "estimator_bounds";
  const int n = 100, T = 150;
  const double B = 2.0, delta = 0.1;
  const Kernel kernel = Kernel::se(0.3);
  const InputDomain domain = build_grid_domain(1, n);
  const Eigen::MatrixXd K = kernel_matrix(kernel, domain);
  const ScheduleConstants constants;  // lambda = 1
  const double gamma =
      mig_surrogate(K, kernel, 1, T, constants.lambda, MigMode::GreedyEmpirical)
          .value;

  long violations = 0;
  double max_eta_u = -1e300, max_u = -1e300, max_abs_sketch = 0.0;

  // Exact learner.
  {
    const LearnerParams params =
        derive_params(LearnerKind::KernelizedExp3, ScheduleMode::TheoremConstants,
                      gamma, T, B, delta, constants);
    const double lemma_bound =
        (2.0 / params.alpha) *
        (2.0 * B * gamma + params.beta * std::sqrt(gamma));
    LearnerState state = kexp3_init(kernel, domain, params, make_stream(42, 0));
    const CandidateSet pool = sample_candidate_set(
        kernel, domain, B, 300, 100, make_stream(42, 1).split(1));
    for (int t = 0; t < T; ++t) {
      const int choice = fully_adversarial_choice(pool, state.sampling);
      const RkhsFunction& f = pool.functions[static_cast<std::size_t>(choice)];
      StepRecord rec;
      kexp3_step(state, [&](int arm) { return f.value(arm); }, &rec);
      const Eigen::VectorXd u = rec.estimates + rec.widths;
      for (int x = 0; x < n; ++x) {
        max_u = std::max(max_u, u(x));
        max_eta_u = std::max(max_eta_u, params.eta * u(x));
        if (params.eta * u(x) > 1.0 + 1e-9) ++violations;
        if (u(x) > lemma_bound + 1e-9) ++violations;
      }
    }
    r.detail = "exact: max eta*u " + num(max_eta_u) + ", max u " + num(max_u) +
               " vs bound " + num(lemma_bound);
  }

  // Sketched learner: sup bound on the optimistic estimate.
  {
    const LearnerParams params = derive_params(
        LearnerKind::RlsKernelizedExp3, ScheduleMode::TheoremConstants, gamma,
        T, B, delta, constants);
    const double sup_bound =
        B * T / params.lambda +
        params.beta * std::sqrt(T / params.lambda);
    LearnerState state =
        rls_kexp3_init(kernel, domain, params, make_stream(43, 0));
    const CandidateSet pool = sample_candidate_set(
        kernel, domain, B, 300, 100, make_stream(43, 1).split(1));
    for (int t = 0; t < T; ++t) {
      const int choice = fully_adversarial_choice(pool, state.sampling);
      const RkhsFunction& f = pool.functions[static_cast<std::size_t>(choice)];
      StepRecord rec;
      rls_kexp3_step(state, [&](int arm) { return f.value(arm); }, &rec);
      for (int x = 0; x < n; ++x) {
        const double mag = std::abs(rec.estimates(x) + rec.widths(x));
        max_abs_sketch = std::max(max_abs_sketch, mag);
        if (mag > sup_bound + 1e-6) ++violations;
      }
    }
    if (state.fallback_count != 0) ++violations;
    r.detail += "; sketched: max |u~| " + num(max_abs_sketch) + " vs bound " +
                num(sup_bound) + ", fallbacks " +
                std::to_string(state.fallback_count);
  }

  r.passed = violations == 0;
  r.detail += "; violations " + std::to_string(violations);
  return r;
}

// ---------------------------------------------------------------------------
// 7. Desk-scale regret ordering, 10 seeds each on the |X| = 100 adversarial
//    setting: exp-weights learner beats Random by at least 2x, and the
//    sketched variant stays within 2x of the exact one.
CheckResult check_regret_ordering() {
  CheckResult r;
  r.name = "regret_ordering";
  TrialConfig config;
  config.timing = false;
  const int seeds = 10, threads = default_threads();

  config.learner = LearnerKind::Random;
  const double random_mean =
      run_experiment(config, seeds, threads).summary.mean_regret;
  config.learner = LearnerKind::KernelizedExp3;
  const double kexp3_mean =
      run_experiment(config, seeds, threads).summary.mean_regret;
  config.learner = LearnerKind::RlsKernelizedExp3;
  const double rls_mean =
      run_experiment(config, seeds, threads).summary.mean_regret;

  const bool first = kexp3_mean <= 0.5 * random_mean;
  const bool second = rls_mean <= 2.0 * kexp3_mean;
  r.passed = first && second;
  r.detail = "mean regret over 10 seeds: random " + num(random_mean) +
             ", kexp3 " + num(kexp3_mean) + " (need <= " +
             num(0.5 * random_mean) + "), rls_kexp3 " + num(rls_mean) +
             " (need <= " + num(2.0 * kexp3_mean) + ")";
  return r;
}

// ---------------------------------------------------------------------------
// 8. Computational crossover at |X| = 2000: the sketched learner's measured
//    mean per-round time beats a one-round probe of the exact learner.
CheckResult check_crossover() {
  CheckResult r;
  r.name = "crossover";
  TrialConfig config;
  config.setting = "setting3";
  config.points_per_axis = 2000;
  config.kernel = Kernel::matern(2.5, 0.3);
  config.learner = LearnerKind::RlsKernelizedExp3;
  config.seed = 7;
  config.timing = true;

  const TrialResult trial = run_trial(config);
  const double rls_ms = trial.mean_round_ms();

  // One-round probe of the exact learner at the same scale and schedule
  // family; init cost (shared by both variants) is excluded.
  const InputDomain domain = build_grid_domain(config.dim, config.points_per_axis);
  TrialConfig exact_cfg = config;
  exact_cfg.learner = LearnerKind::KernelizedExp3;
  const LearnerParams params = resolve_params(exact_cfg);
  LearnerState state =
      kexp3_init(config.kernel, domain, params, make_stream(config.seed, 0));
  const auto t0 = std::chrono::steady_clock::now();
  kexp3_step(state, [](int) { return 0.5; });
  const auto t1 = std::chrono::steady_clock::now();
  const double exact_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();

  r.passed = rls_ms < exact_ms && trial.fallback_count == 0;
  r.detail = "per-round at |X|=2000: rls_kexp3 " + num(rls_ms) +
             " ms (150-round mean) vs kexp3 " + num(exact_ms) +
             " ms (one-round probe), speedup " + num(exact_ms / rls_ms) +
             "x, fallbacks " + std::to_string(trial.fallback_count);
  return r;
}

// ---------------------------------------------------------------------------
// 9. Hard-instance adversary compliance: 1e4 emissions stay inside the RKHS
//    ball, and the truncation branch stays within its binomial envelope.
CheckResult check_hard_instance() {
  CheckResult r;
  r.name = "hard_instance";
  const int n = 50, T = 150, draws = 10000;
  const double B = 2.0;
  const InputDomain domain = build_grid_domain(1, n);
  const Eigen::MatrixXd K = kernel_matrix(Kernel::se(0.3), domain);
  RngStream rng = make_stream(91, 1);

  Eigen::VectorXd coeff(n);
  for (int i = 0; i < n; ++i) coeff(i) = 2.0 * rng.next_double() - 1.0;
  const RkhsFunction base =
      clip_to_ball(make_rkhs_function(K, coeff), K, B / 2.0);
  const HardInstance inst = make_hard_instance(K, domain, base, B, T);

  double max_norm = 0.0;
  int truncations = 0;
  for (int i = 0; i < draws; ++i) {
    bool truncated = false;
    const RkhsFunction f = hard_instance_reward(inst, rng, &truncated);
    max_norm = std::max(max_norm, rkhs_norm(K, f.coefficients));
    if (truncated) ++truncations;
  }
  const double p = 1.0 / (static_cast<double>(T) * T);
  const double limit = draws * p + 4.0 * std::sqrt(draws * p * (1.0 - p));
  r.passed = max_norm <= B + 1e-9 && truncations <= limit;
  r.detail = "10000 draws: max norm " + num(max_norm) + " (ball " + num(B) +
             "), truncations " + std::to_string(truncations) + " (limit " +
             num(limit) + ")";
  return r;
}

// ---------------------------------------------------------------------------
// 10. Determinism of the results pipeline: the full desk-scale grid with
//     3 seeds, run twice under different thread counts, yields byte-identical
//     CSV.
CheckResult check_determinism() {
  CheckResult r;
  r.name = "determinism";
  const auto render = [](int threads) {
    std::vector<SummaryRecord> records;
    for (const TrialConfig& config : table2_grid(1))
      records.push_back(run_experiment(config, 3, threads).summary);
    return results_csv(records);
  };
  const std::string first = render(default_threads());
  const std::string second = render(std::max(1, default_threads() / 2));
  r.passed = first == second;
  r.detail = "desk-scale grid, 3 seeds, two runs under different thread "
             "counts: " +
             std::string(r.passed ? "byte-identical CSV ("
                                  : "CSV DIFFERS (") +
             std::to_string(first.size()) + " bytes)";
  return r;
}

struct CheckEntry {
  const char* name;
  CheckResult (*fn)();
};

constexpr CheckEntry kChecks[] = {
    {"lemma1", check_lemma1},
    {"nystrom_identity", check_nystrom_identity},
    {"sandwich", check_sandwich},
    {"mvr_chain", check_mvr_chain},
    {"bias_identity", check_bias_identity},
    {"estimator_bounds", check_estimator_bounds},
    {"regret_ordering", check_regret_ordering},
    {"crossover", check_crossover},
    {"hard_instance", check_hard_instance},
    {"determinism", check_determinism},
};

}  // namespace

std::vector<std::string> verify_names() {
  std::vector<std::string> names;
  for (const CheckEntry& e : kChecks) names.emplace_back(e.name);
  return names;
}

CheckResult run_check(const std::string& name) {
  for (const CheckEntry& e : kChecks) {
    if (name != e.name) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = e.fn();
    } catch (const std::exception& ex) {
      r.name = name;
      r.passed = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    return r;
  }
  throw std::invalid_argument("unknown check '" + name + "'");
}

int run_and_report(const std::vector<std::string>& names, std::ostream& out) {
  std::vector<std::string> selected = names.empty() ? verify_names() : names;
  const std::vector<std::string> known = verify_names();
  for (const std::string& n : selected) {
    if (std::find(known.begin(), known.end(), n) == known.end())
      throw std::invalid_argument("unknown check '" + n + "'");
  }
  int failures = 0;
  for (const std::string& n : selected) {
    const CheckResult r = run_check(n);
    char secs[32];
    std::snprintf(secs, sizeof(secs), "%.1f", r.seconds);
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " — " << r.detail
        << " (" << secs << " s)" << std::endl;
    if (!r.passed) ++failures;
  }
  return failures;
}

}  // namespace kbandit
