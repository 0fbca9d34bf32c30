#pragma once

#include <Eigen/Dense>

#include "kbandit/domain.hpp"
#include "kbandit/kernel.hpp"

namespace kbandit {

// Finite-dimensional feature map for a kernel restricted to a fixed domain.
// L is the lower-triangular Cholesky factor of K + jitter*I, and psi(x_i) is
// row i of L, so psi(x_i)^T psi(x_j) reproduces the (jittered) Gram matrix.
struct FeatureMap {
  Eigen::MatrixXd L;   // |X| x |X|, lower triangular
  double jitter = 0.0; // diagonal shift actually applied

  int dim() const { return static_cast<int>(L.cols()); }
  // Feature vector of arm i as a column vector.
  Eigen::VectorXd psi(int i) const { return L.row(i).transpose(); }
};

// Cholesky-factors the Gram matrix, escalating the diagonal jitter through
// {0, 1e-12, 1e-10, 1e-8, 1e-6} until the factorization succeeds and
// L L^T reproduces K + jitter*I entrywise within 1e-8. Throws
// std::runtime_error if even the largest jitter fails.
FeatureMap build_feature_map(const Kernel& kernel, const InputDomain& domain);

// Same ladder applied to a caller-supplied symmetric PSD matrix.
FeatureMap build_feature_map(const Eigen::MatrixXd& gram);

}  // namespace kbandit
