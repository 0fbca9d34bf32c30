#include "kbandit/exploration.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kbandit {

Eigen::VectorXd ExplorationDistribution::weights() const {
  Eigen::VectorXd w(size());
  for (int i = 0; i < size(); ++i) w(i) = weight(i);
  return w;
}

int ExplorationDistribution::support_size() const {
  int s = 0;
  for (long c : counts) s += (c > 0);
  return s;
}

std::vector<int> mvr_sequence(const Eigen::MatrixXd& gram, double lambda,
                              int budget,
                              std::vector<Eigen::VectorXd>* variance_trace) {
  const int n = static_cast<int>(gram.rows());
  if (n == 0 || gram.cols() != n) {
    throw std::invalid_argument("mvr_sequence: gram must be square and non-empty");
  }
  if (budget < 1) throw std::invalid_argument("mvr_sequence: budget must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("mvr_sequence: lambda must be positive");

  // sigma2 tracks sigma^2(x; chosen prefix, lambda) for every x. Row t of A
  // holds the new Cholesky cross terms a_x introduced by the t-th pick, so
  // sigma2(x) = k(x,x) - sum_t A(t,x)^2.
  Eigen::VectorXd sigma2 = gram.diagonal();
  Eigen::MatrixXd A(budget, n);
  std::vector<int> seq;
  seq.reserve(budget);

  for (int t = 0; t < budget; ++t) {
    int pick = 0;
    for (int i = 1; i < n; ++i) {
      if (sigma2(i) > sigma2(pick)) pick = i;
    }
    seq.push_back(pick);

    const double l_pp = std::sqrt(sigma2(pick) + lambda);
    Eigen::RowVectorXd a_new = gram.row(pick);
    if (t > 0) {
      a_new.noalias() -= A.col(pick).head(t).transpose() * A.topRows(t);
    }
    a_new /= l_pp;
    A.row(t) = a_new;

    sigma2 -= a_new.array().square().matrix().transpose();
    for (int i = 0; i < n; ++i) {
      if (sigma2(i) < 0.0) {
        if (sigma2(i) < -1e-10) {
          throw std::runtime_error("mvr_sequence: variance went negative beyond "
                                   "rounding tolerance at step " + std::to_string(t));
        }
        sigma2(i) = 0.0;
      }
    }
    if (variance_trace) variance_trace->push_back(sigma2);
  }
  return seq;
}

ExplorationDistribution empirical_distribution(const std::vector<int>& sequence,
                                               int domain_size,
                                               ExplorationSource source) {
  if (sequence.empty()) {
    throw std::invalid_argument("empirical_distribution: sequence must be nonempty");
  }
  if (domain_size < 1) {
    throw std::invalid_argument("empirical_distribution: domain_size must be >= 1");
  }
  ExplorationDistribution dist;
  dist.source = source;
  dist.counts.assign(domain_size, 0);
  dist.total = static_cast<long>(sequence.size());
  for (int idx : sequence) {
    if (idx < 0 || idx >= domain_size) {
      throw std::invalid_argument("empirical_distribution: index " +
                                  std::to_string(idx) + " out of range");
    }
    ++dist.counts[idx];
  }
  return dist;
}

ExplorationDistribution uniform_exploration(int domain_size) {
  if (domain_size < 1) {
    throw std::invalid_argument("uniform_exploration: domain_size must be >= 1");
  }
  ExplorationDistribution dist;
  dist.source = ExplorationSource::Uniform;
  dist.counts.assign(domain_size, 1);
  dist.total = domain_size;
  return dist;
}

}  // namespace kbandit
