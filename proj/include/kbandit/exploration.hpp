#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kbandit/rng.hpp"

namespace kbandit {

enum class ExplorationSource { MVR, ApproxMVR, Uniform };

// Exploration distribution over the arms, stored as integer counts over a
// total so every weight is an exact multiple of 1/total and the weights sum
// to 1 in exact arithmetic.
struct ExplorationDistribution {
  std::vector<long> counts;
  long total = 0;
  ExplorationSource source = ExplorationSource::Uniform;

  int size() const { return static_cast<int>(counts.size()); }
  double weight(int i) const {
    return static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  Eigen::VectorXd weights() const;
  int support_size() const;
};

// Greedy maximum-variance-reduction sequence of length `budget` over the
// domain of the Gram matrix: at each step pick argmax_x sigma^2(x; chosen, lambda),
// lowest index on ties. Posterior variances are maintained by rank-one
// updates (an incrementally grown Cholesky row), O(|X| * t) per step.
// If `variance_trace` is non-null it receives, per step, the updated
// variance vector sigma^2(.; first t picks, lambda).
std::vector<int> mvr_sequence(const Eigen::MatrixXd& gram, double lambda,
                              int budget,
                              std::vector<Eigen::VectorXd>* variance_trace = nullptr);

// Greedy sequence like mvr_sequence, but scored by the Nystrom-approximated
// variance: each round re-samples the chosen prefix with confidence delta/M
// (ridge lambda) and picks argmax of
//   (1/lambda)(k(x,x) - phi^T phi) + phi^T (sum_prefix phi phi^T + lambda I)^-1 phi,
// lowest index on ties. An empty prefix scores k(x,x)/lambda. Note the
// 1/lambda scale: at full sampling rank this equals sigma^2/lambda exactly.
// Requires delta in (0, min{1, M/32}). If `score_trace` is non-null it
// receives, per round, the approximate scores the pick was based on.
std::vector<int> approx_mvr_sequence(const Eigen::MatrixXd& gram, double lambda,
                                     int budget, double delta, RngStream rng,
                                     std::vector<Eigen::VectorXd>* score_trace = nullptr);

// Normalized visit counts of a sequence. The sequence must be nonempty and
// every index must lie in [0, domain_size).
ExplorationDistribution empirical_distribution(const std::vector<int>& sequence,
                                               int domain_size,
                                               ExplorationSource source);

ExplorationDistribution uniform_exploration(int domain_size);

}  // namespace kbandit
