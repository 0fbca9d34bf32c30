#include "kbandit/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kbandit {

namespace {

void check_kernel(const Kernel& kernel) {
  if (!(kernel.lengthscale > 0.0)) {
    throw std::invalid_argument("kernel: lengthscale must be positive");
  }
  if (kernel.family == KernelFamily::Matern && kernel.nu != 0.5 &&
      kernel.nu != 1.5 && kernel.nu != 2.5) {
    throw std::invalid_argument("kernel: Matern nu must be 0.5, 1.5 or 2.5, got " +
                                std::to_string(kernel.nu));
  }
}

}  // namespace

Kernel Kernel::se(double lengthscale) {
  Kernel k;
  k.family = KernelFamily::SquaredExponential;
  k.lengthscale = lengthscale;
  return k;
}

Kernel Kernel::matern(double nu, double lengthscale) {
  Kernel k;
  k.family = KernelFamily::Matern;
  k.nu = nu;
  k.lengthscale = lengthscale;
  return k;
}

double eval_kernel(const Kernel& kernel, const Eigen::RowVectorXd& x,
                   const Eigen::RowVectorXd& y) {
  check_kernel(kernel);
  if (x.size() != y.size()) {
    throw std::invalid_argument("eval_kernel: dimension mismatch");
  }
  const double l = kernel.lengthscale;
  if (kernel.family == KernelFamily::SquaredExponential) {
    const double sq = (x - y).squaredNorm();
    return std::exp(-sq / (2.0 * l * l));
  }
  const double r = (x - y).norm();
  if (kernel.nu == 0.5) {
    return std::exp(-r / l);
  }
  if (kernel.nu == 1.5) {
    const double s = std::sqrt(3.0) * r / l;
    return (1.0 + s) * std::exp(-s);
  }
  // nu == 2.5 after check_kernel
  const double s = std::sqrt(5.0) * r / l;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const InputDomain& domain) {
  check_kernel(kernel);
  const int n = domain.size();
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i) {
    gram(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double v = eval_kernel(kernel, domain.points.row(i), domain.points.row(j));
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  return gram;
}

}  // namespace kbandit
