#include "kbandit/domain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kbandit {

InputDomain build_grid_domain(int dim, int points_per_axis) {
  if (dim < 1 || dim > 3) {
    throw std::invalid_argument("build_grid_domain: dim must be 1, 2 or 3, got " +
                                std::to_string(dim));
  }
  if (points_per_axis < 1) {
    throw std::invalid_argument("build_grid_domain: points_per_axis must be >= 1");
  }

  const int n = points_per_axis;
  long total = 1;
  for (int a = 0; a < dim; ++a) total *= n;

  InputDomain domain;
  domain.dim = dim;
  domain.points.resize(total, dim);

  const double step = (n > 1) ? 1.0 / static_cast<double>(n - 1) : 0.0;
  for (long idx = 0; idx < total; ++idx) {
    // Row-major decode: axis 0 varies slowest.
    long rem = idx;
    for (int a = dim - 1; a >= 0; --a) {
      domain.points(idx, a) = static_cast<double>(rem % n) * step;
      rem /= n;
    }
  }
  return domain;
}

int closest_to_origin(const InputDomain& domain) {
  if (domain.size() == 0) {
    throw std::invalid_argument("closest_to_origin: empty domain");
  }
  int best = 0;
  double best_sq = domain.points.row(0).squaredNorm();
  for (int i = 1; i < domain.size(); ++i) {
    const double sq = domain.points.row(i).squaredNorm();
    if (sq < best_sq) {
      best_sq = sq;
      best = i;
    }
  }
  return best;
}

}  // namespace kbandit
