#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "kbandit/domain.hpp"
#include "kbandit/exploration.hpp"
#include "kbandit/gp.hpp"
#include "kbandit/kernel.hpp"

using namespace kbandit;

namespace {

// Brute-force greedy: recompute every posterior variance from scratch at
// every step. Shares no code with the incremental implementation.
std::vector<int> naive_mvr(const Eigen::MatrixXd& gram, double lambda, int budget,
                           std::vector<Eigen::VectorXd>* trace = nullptr) {
  std::vector<int> seq;
  for (int t = 0; t < budget; ++t) {
    const Eigen::VectorXd s2 = posterior_variance_all(gram, seq, lambda);
    int pick = 0;
    for (int i = 1; i < s2.size(); ++i)
      if (s2(i) > s2(pick)) pick = i;
    seq.push_back(pick);
    if (trace) trace->push_back(posterior_variance_all(gram, seq, lambda));
  }
  return seq;
}

}  // namespace

TEST_CASE("mvr first pick breaks ties at index zero", "[exploration]") {
  const InputDomain domain = build_grid_domain(1, 8);
  const Eigen::MatrixXd K = kernel_matrix(Kernel::se(0.3), domain);
  // Stationary kernel: all prior variances equal 1, so the tie-break decides.
  REQUIRE(mvr_sequence(K, 1.0, 1) == std::vector<int>{0});
}

TEST_CASE("mvr matches a from-scratch greedy oracle", "[exploration]") {
  const InputDomain domain = build_grid_domain(1, 10);
  const Eigen::MatrixXd K = kernel_matrix(Kernel::matern(1.5, 0.3), domain);

  std::vector<Eigen::VectorXd> fast_trace, slow_trace;
  const std::vector<int> fast = mvr_sequence(K, 1.0, 5, &fast_trace);
  const std::vector<int> slow = naive_mvr(K, 1.0, 5, &slow_trace);
  REQUIRE(fast == slow);
  for (int t = 0; t < 5; ++t) {
    REQUIRE((fast_trace[t] - slow_trace[t]).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("incremental variances stay within 1e-8 of direct solves",
          "[exploration]") {
  const InputDomain domain = build_grid_domain(2, 7);  // 49 points
  const Eigen::MatrixXd K =
      kernel_matrix(Kernel::se(0.3 * std::sqrt(2.0)), domain);

  std::vector<Eigen::VectorXd> trace;
  const std::vector<int> seq = mvr_sequence(K, 2.0, 30, &trace);
  for (size_t t = 0; t < seq.size(); ++t) {
    const TrainingSet prefix(seq.begin(), seq.begin() + t + 1);
    const Eigen::VectorXd direct = posterior_variance_all(K, prefix, 2.0);
    REQUIRE((trace[t] - direct).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("max variance trajectory is non-increasing", "[exploration]") {
  const InputDomain domain = build_grid_domain(1, 40);
  const Eigen::MatrixXd K = kernel_matrix(Kernel::matern(2.5, 0.3), domain);
  std::vector<Eigen::VectorXd> trace;
  mvr_sequence(K, 1.0, 25, &trace);
  double prev = K.diagonal().maxCoeff();
  for (const auto& s2 : trace) {
    const double cur = s2.maxCoeff();
    REQUIRE(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("mvr variance decay closes through information gain", "[exploration]") {
  const InputDomain domain = build_grid_domain(1, 60);
  const Eigen::MatrixXd K = kernel_matrix(Kernel::se(0.3), domain);
  const double lambda = 1.0;
  const int M = 20;

  std::vector<Eigen::VectorXd> trace;
  const std::vector<int> seq = mvr_sequence(K, lambda, M, &trace);

  // Sum over steps of the variance of the point about to be chosen.
  double cumulative = 0.0;
  for (int t = 0; t < M; ++t) {
    const TrainingSet prefix(seq.begin(), seq.begin() + t);
    cumulative += posterior_variance(K, prefix, lambda, seq[t]);
  }
  const double ig = information_gain(K, seq, lambda);

  const Eigen::VectorXd final_s2 = posterior_variance_all(K, seq, lambda);
  const double chain_mid = cumulative / M;
  const double chain_end = 2.0 * ig / (M * std::log(1.0 + 1.0 / lambda));
  REQUIRE(final_s2.maxCoeff() <= chain_mid + 1e-10);
  REQUIRE(chain_mid <= chain_end + 1e-10);
}

TEST_CASE("approx mvr preconditions and empty-prefix round", "[exploration]") {
  const InputDomain domain = build_grid_domain(1, 12);
  const Eigen::MatrixXd K = kernel_matrix(Kernel::se(0.3), domain);

  // First pick scores k(x,x)/lambda, so the unit diagonal ties to index 0.
  std::vector<Eigen::VectorXd> trace;
  const std::vector<int> one =
      approx_mvr_sequence(K, 2.0, 1, 1.0 / 64, kbandit::make_stream(1, 9), &trace);
  REQUIRE(one == std::vector<int>{0});
  REQUIRE(trace.size() == 1);
  for (int x = 0; x < 12; ++x) REQUIRE(trace[0](x) == K(x, x) / 2.0);

  // delta must stay below min{1, M/32}.
  REQUIRE_THROWS_AS(
      approx_mvr_sequence(K, 1.0, 10, 0.5, kbandit::make_stream(1, 9)),
      std::invalid_argument);
  REQUIRE_THROWS_AS(
      approx_mvr_sequence(K, 1.0, 40, 1.0, kbandit::make_stream(1, 9)),
      std::invalid_argument);
  REQUIRE_NOTHROW(
      approx_mvr_sequence(K, 1.0, 40, 0.9, kbandit::make_stream(1, 9)));
}

TEST_CASE("approx mvr equals exact mvr while the base case is active",
          "[exploration]") {
  // Prefixes of length < 192 log(M/delta) are sampled by the identity, so
  // every approximate score is the exact posterior variance over lambda.
  const InputDomain domain = build_grid_domain(1, 30);
  const Eigen::MatrixXd K = kernel_matrix(Kernel::matern(1.5, 0.3), domain);
  const int M = 12;
  const double lambda = 1.0, delta = 0.3;

  std::vector<Eigen::VectorXd> scores;
  const std::vector<int> approx =
      approx_mvr_sequence(K, lambda, M, delta, kbandit::make_stream(4, 9), &scores);
  const std::vector<int> exact = mvr_sequence(K, lambda, M);
  REQUIRE(approx == exact);

  // Before-pick scores match sigma^2/lambda on the same prefix to 1e-8.
  for (int t = 0; t < M; ++t) {
    const TrainingSet prefix(approx.begin(), approx.begin() + t);
    const Eigen::VectorXd s2 = posterior_variance_all(K, prefix, lambda);
    for (int x = 0; x < 30; ++x) {
      REQUIRE(scores[t](x) == Catch::Approx(s2(x) / lambda).margin(1e-8));
    }
  }
}

TEST_CASE("approx mvr sandwich against exact variance", "[exploration]") {
  const InputDomain domain = build_grid_domain(1, 80);
  const Eigen::MatrixXd K = kernel_matrix(Kernel::se(0.3), domain);
  const int M = 20;
  const double lambda = 1.0;

  std::vector<Eigen::VectorXd> scores;
  const std::vector<int> seq = approx_mvr_sequence(K, lambda, M, 0.25,
                                                   kbandit::make_stream(8, 9), &scores);
  for (int t = 0; t < M; ++t) {
    const TrainingSet prefix(seq.begin(), seq.begin() + t);
    const Eigen::VectorXd s2 = posterior_variance_all(K, prefix, lambda);
    for (int x = 0; x < 80; ++x) {
      REQUIRE(scores[t](x) >= s2(x) / (3.0 * lambda) - 1e-8);
      REQUIRE(scores[t](x) <= 3.0 * s2(x) / lambda + 1e-8);
    }
  }
}

TEST_CASE("approx mvr variance decay closes through information gain",
          "[exploration]") {
  const InputDomain domain = build_grid_domain(1, 60);
  const Eigen::MatrixXd K = kernel_matrix(Kernel::se(0.3), domain);
  const double lambda = 1.0;
  const int M = 16;

  const std::vector<int> seq =
      approx_mvr_sequence(K, lambda, M, 0.25, kbandit::make_stream(3, 9));

  double cumulative = 0.0;
  for (int t = 0; t < M; ++t) {
    const TrainingSet prefix(seq.begin(), seq.begin() + t);
    cumulative += posterior_variance(K, prefix, lambda, seq[t]);
  }
  const double ig = information_gain(K, seq, lambda);
  const Eigen::VectorXd final_s2 = posterior_variance_all(K, seq, lambda);

  REQUIRE(final_s2.maxCoeff() <= (9.0 / M) * cumulative + 1e-8);
  REQUIRE(cumulative <= 2.0 * ig / std::log(1.0 + 1.0 / lambda) + 1e-8);
}

TEST_CASE("empirical distribution counts and normalization", "[exploration]") {
  const ExplorationDistribution one =
      empirical_distribution({3}, 6, ExplorationSource::MVR);
  REQUIRE(one.support_size() == 1);
  REQUIRE(one.weight(3) == 1.0);

  const ExplorationDistribution d =
      empirical_distribution({0, 0, 1, 2}, 5, ExplorationSource::MVR);
  REQUIRE(d.weight(0) == 0.5);
  REQUIRE(d.weight(1) == 0.25);
  REQUIRE(d.weight(2) == 0.25);
  REQUIRE(d.weight(3) == 0.0);
  REQUIRE(d.weight(4) == 0.0);
  REQUIRE(d.weights().sum() == 1.0);

  // Every weight is an exact multiple of 1/total.
  for (int i = 0; i < d.size(); ++i) {
    REQUIRE(d.weight(i) == static_cast<double>(d.counts[i]) / 4.0);
  }

  REQUIRE_THROWS_AS(empirical_distribution({}, 5, ExplorationSource::MVR),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(empirical_distribution({5}, 5, ExplorationSource::MVR),
                    std::invalid_argument);

  const ExplorationDistribution u = uniform_exploration(4);
  REQUIRE(u.weights().sum() == 1.0);
  REQUIRE(u.weight(2) == 0.25);
  REQUIRE(u.support_size() == 4);
}
