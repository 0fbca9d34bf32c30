#include "kbandit/gp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kbandit/exploration.hpp"

namespace kbandit {

namespace {

void check_train(const TrainingSet& train, int domain_size, const char* where) {
  for (int idx : train) {
    if (idx < 0 || idx >= domain_size) {
      throw std::invalid_argument(std::string(where) + ": training index " +
                                  std::to_string(idx) + " out of range");
    }
  }
}

double clamp_variance(double v, const char* where) {
  if (v < 0.0) {
    if (v < -1e-10) {
      throw std::runtime_error(std::string(where) + ": variance " +
                               std::to_string(v) +
                               " negative beyond rounding tolerance");
    }
    return 0.0;
  }
  return v;
}

// Cholesky of K_X + lambda I restricted to the training indices.
Eigen::LLT<Eigen::MatrixXd> factor_train(const Eigen::MatrixXd& gram,
                                         const TrainingSet& train, double lambda) {
  const int t = static_cast<int>(train.size());
  Eigen::MatrixXd m(t, t);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j) m(i, j) = gram(train[i], train[j]);
  m.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("posterior_variance: Cholesky of K+lambda*I failed");
  }
  return llt;
}

}  // namespace

double posterior_variance(const Eigen::MatrixXd& gram, const TrainingSet& train,
                          double lambda, int query) {
  if (!(lambda > 0.0)) throw std::invalid_argument("posterior_variance: lambda must be positive");
  check_train(train, static_cast<int>(gram.rows()), "posterior_variance");
  if (query < 0 || query >= gram.rows()) {
    throw std::invalid_argument("posterior_variance: query index out of range");
  }
  if (train.empty()) return gram(query, query);

  const int t = static_cast<int>(train.size());
  const auto llt = factor_train(gram, train, lambda);
  Eigen::VectorXd kx(t);
  for (int i = 0; i < t; ++i) kx(i) = gram(train[i], query);
  const double v = gram(query, query) - kx.dot(llt.solve(kx));
  return clamp_variance(v, "posterior_variance");
}

Eigen::VectorXd posterior_variance_all(const Eigen::MatrixXd& gram,
                                       const TrainingSet& train, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("posterior_variance_all: lambda must be positive");
  const int n = static_cast<int>(gram.rows());
  check_train(train, n, "posterior_variance_all");
  if (train.empty()) return gram.diagonal();

  const int t = static_cast<int>(train.size());
  const auto llt = factor_train(gram, train, lambda);
  Eigen::MatrixXd cross(t, n);
  for (int i = 0; i < t; ++i) cross.row(i) = gram.row(train[i]);
  // sigma^2_j = k(j,j) - ||L^-1 cross_col_j||^2, one triangular solve for all j.
  const Eigen::MatrixXd half =
      llt.matrixL().solve(cross);  // t x n
  Eigen::VectorXd out(n);
  for (int j = 0; j < n; ++j) {
    out(j) = clamp_variance(gram(j, j) - half.col(j).squaredNorm(),
                            "posterior_variance_all");
  }
  return out;
}

double posterior_variance_feature(const FeatureMap& fm, const TrainingSet& train,
                                  double lambda, int query) {
  if (!(lambda > 0.0)) throw std::invalid_argument("posterior_variance_feature: lambda must be positive");
  const int n = fm.dim();
  check_train(train, static_cast<int>(fm.L.rows()), "posterior_variance_feature");
  if (query < 0 || query >= fm.L.rows()) {
    throw std::invalid_argument("posterior_variance_feature: query index out of range");
  }
  Eigen::MatrixXd G = lambda * Eigen::MatrixXd::Identity(n, n);
  for (int idx : train) {
    const Eigen::VectorXd psi = fm.psi(idx);
    G.selfadjointView<Eigen::Lower>().rankUpdate(psi, 1.0);
  }
  G = G.selfadjointView<Eigen::Lower>();
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("posterior_variance_feature: Cholesky failed");
  }
  const Eigen::VectorXd psi_q = fm.psi(query);
  const double v = lambda * psi_q.dot(llt.solve(psi_q));
  return clamp_variance(v, "posterior_variance_feature");
}

double information_gain(const Eigen::MatrixXd& gram, const TrainingSet& train,
                        double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("information_gain: lambda must be positive");
  check_train(train, static_cast<int>(gram.rows()), "information_gain");
  if (train.empty()) return 0.0;

  const int t = static_cast<int>(train.size());
  Eigen::MatrixXd m(t, t);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j) m(i, j) = gram(train[i], train[j]) / lambda;
  m.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("information_gain: Cholesky of I + K/lambda failed");
  }
  // (1/2) log det(M) = sum_i log L_ii for M = L L^T.
  const Eigen::MatrixXd L = llt.matrixL();
  double ig = 0.0;
  for (int i = 0; i < t; ++i) ig += std::log(L(i, i));
  return ig;
}

MigSurrogate mig_surrogate(const Eigen::MatrixXd& gram, const Kernel& kernel,
                           int dim, int T, double lambda, MigMode mode) {
  if (!(lambda > 0.0)) throw std::invalid_argument("mig_surrogate: lambda must be positive");
  if (T < 1) throw std::invalid_argument("mig_surrogate: T must be >= 1");

  MigSurrogate out;
  out.mode = mode;
  out.horizon = T;
  out.lambda = lambda;

  if (mode == MigMode::GreedyEmpirical) {
    const int steps = std::min<int>(T, static_cast<int>(gram.rows()));
    const std::vector<int> seq = mvr_sequence(gram, lambda, steps);
    out.value = information_gain(gram, seq, lambda);
    return out;
  }

  if (T < 3) {
    throw std::invalid_argument("mig_surrogate: ClosedFormRate requires T >= 3");
  }
  const double logT = std::log(static_cast<double>(T));
  if (kernel.family == KernelFamily::SquaredExponential) {
    out.value = std::pow(logT, dim + 1) * std::pow(std::log(logT), -dim);
  } else if (kernel.family == KernelFamily::Matern) {
    const double nu = kernel.nu;
    const double denom = 2.0 * nu + dim;
    out.value = std::pow(static_cast<double>(T), dim / denom) *
                std::pow(logT, (4.0 * nu + dim) / denom);
  } else {
    throw std::invalid_argument("mig_surrogate: unsupported kernel family");
  }
  return out;
}

}  // namespace kbandit
