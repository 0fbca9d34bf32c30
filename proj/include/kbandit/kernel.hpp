#pragma once

#include <Eigen/Dense>

#include "kbandit/domain.hpp"

namespace kbandit {

enum class KernelFamily { SquaredExponential, Matern };

// Stationary unit-variance kernel, k(x,x) = 1.
//
// SquaredExponential:  k(x,x') = exp(-||x-x'||^2 / (2 l^2))
// Matern(1/2):         k(x,x') = exp(-r/l)
// Matern(3/2):         k(x,x') = (1 + sqrt(3) r/l) exp(-sqrt(3) r/l)
// Matern(5/2):         k(x,x') = (1 + sqrt(5) r/l + 5 r^2/(3 l^2)) exp(-sqrt(5) r/l)
// with r = ||x-x'||.
struct Kernel {
  KernelFamily family = KernelFamily::SquaredExponential;
  double lengthscale = 1.0;
  // Smoothness parameter; only used by the Matern family. Must be one of
  // 0.5, 1.5, 2.5 — other values are rejected at evaluation time.
  double nu = 2.5;

  static Kernel se(double lengthscale);
  static Kernel matern(double nu, double lengthscale);
};

double eval_kernel(const Kernel& kernel, const Eigen::RowVectorXd& x,
                   const Eigen::RowVectorXd& y);

// Full Gram matrix over the domain. Each unordered pair is evaluated once and
// mirrored, so the result is exactly symmetric and the diagonal is exactly 1.
Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const InputDomain& domain);

}  // namespace kbandit
