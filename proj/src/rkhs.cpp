#include "kbandit/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kbandit {

RkhsFunction make_rkhs_function(const Eigen::MatrixXd& gram,
                                const Eigen::VectorXd& coefficients) {
  if (gram.rows() != coefficients.size()) {
    throw std::invalid_argument("make_rkhs_function: coefficient size mismatch");
  }
  RkhsFunction f;
  f.coefficients = coefficients;
  f.values = gram * coefficients;
  return f;
}

double rkhs_norm(const Eigen::MatrixXd& gram, const Eigen::VectorXd& coefficients) {
  if (gram.rows() != coefficients.size()) {
    throw std::invalid_argument("rkhs_norm: coefficient size mismatch");
  }
  double sq = coefficients.dot(gram * coefficients);
  if (sq < 0.0) {
    if (sq < -1e-10) {
      throw std::runtime_error("rkhs_norm: c^T K c = " + std::to_string(sq) +
                               " is negative beyond rounding tolerance");
    }
    sq = 0.0;
  }
  return std::sqrt(sq);
}

RkhsFunction clip_to_ball(const RkhsFunction& f, const Eigen::MatrixXd& gram,
                          double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("clip_to_ball: radius must be positive");
  }
  const double norm = rkhs_norm(gram, f.coefficients);
  if (norm <= radius) return f;
  const double scale = radius / norm;
  RkhsFunction clipped;
  clipped.coefficients = f.coefficients * scale;
  clipped.values = f.values * scale;
  return clipped;
}

}  // namespace kbandit
