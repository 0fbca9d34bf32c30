#pragma once

#include <Eigen/Dense>

namespace kbandit {

// A finite set of arms in [0,1]^d. The row order fixed at construction is the
// indexing contract for every matrix and probability vector downstream.
struct InputDomain {
  Eigen::MatrixXd points;  // |X| x d, row i = coordinates of arm i
  int dim = 0;

  int size() const { return static_cast<int>(points.rows()); }
  Eigen::RowVectorXd point(int i) const { return points.row(i); }
};

// Uniform grid with points_per_axis^d points, coordinates i/(n-1) per axis
// (the single-point grid n=1 degenerates to coordinate 0). Ordering is
// row-major: axis 0 varies slowest. Dimensions above 3 are rejected.
InputDomain build_grid_domain(int dim, int points_per_axis);

// Index of the domain point closest to the origin (lowest index on ties).
int closest_to_origin(const InputDomain& domain);

}  // namespace kbandit
