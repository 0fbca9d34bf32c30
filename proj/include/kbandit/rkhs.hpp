#pragma once

#include <Eigen/Dense>

#include "kbandit/domain.hpp"
#include "kbandit/kernel.hpp"

namespace kbandit {

// Function in the kernel's RKHS restricted to the domain, represented by
// coefficients over the arms: f = sum_j c_j k(x_j, .). `values` caches the
// evaluation f(x_i) = (K c)_i at every arm so reward lookups are O(1).
struct RkhsFunction {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd values;

  double value(int arm) const { return values(arm); }
};

RkhsFunction make_rkhs_function(const Eigen::MatrixXd& gram,
                                const Eigen::VectorXd& coefficients);

// RKHS norm sqrt(c^T K c). Values of c^T K c in [-1e-10, 0) are treated as
// rounding noise and clamped to zero; anything more negative throws
// std::runtime_error (the Gram matrix was not PSD to working precision).
double rkhs_norm(const Eigen::MatrixXd& gram, const Eigen::VectorXd& coefficients);

// Scales the function so its RKHS norm is at most `radius` (no-op when it
// already is). Both the coefficients and the cached values are rescaled.
RkhsFunction clip_to_ball(const RkhsFunction& f, const Eigen::MatrixXd& gram,
                          double radius);

}  // namespace kbandit
