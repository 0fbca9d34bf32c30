#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kbandit/feature_map.hpp"
#include "kbandit/kernel.hpp"

namespace kbandit {

// Ordered list of domain-point indices used as GP training inputs.
// Duplicates are allowed; order only matters for prefix-based checks.
using TrainingSet = std::vector<int>;

// Posterior variance sigma^2(x; X, lambda) = k(x,x) - k_x^T (K + lambda I)^-1 k_x,
// computed from the Gram matrix over the domain via Cholesky. Values in
// [-1e-10, 0) are clamped to 0; anything more negative throws.
double posterior_variance(const Eigen::MatrixXd& gram, const TrainingSet& train,
                          double lambda, int query);

// Posterior variance at every arm for a fixed training set. Shares one
// factorization, so it is the cheap way to scan argmax candidates.
Eigen::VectorXd posterior_variance_all(const Eigen::MatrixXd& gram,
                                       const TrainingSet& train, double lambda);

// Feature-space form lambda * psi(x)^T (sum_i psi(x_i) psi(x_i)^T + lambda I)^-1 psi(x).
// Kept as an independent route for cross-checking the kernel-space path.
double posterior_variance_feature(const FeatureMap& fm, const TrainingSet& train,
                                  double lambda, int query);

// Information gain (1/2) log det(I + lambda^-1 K_X) of a training set.
double information_gain(const Eigen::MatrixXd& gram, const TrainingSet& train,
                        double lambda);

enum class MigMode {
  // Information gain of the greedy max-variance set of size min(T, |X|).
  GreedyEmpirical,
  // Known growth-rate formula per kernel family; no domain needed.
  ClosedFormRate,
};

struct MigSurrogate {
  MigMode mode = MigMode::GreedyEmpirical;
  double value = 0.0;
  int horizon = 0;
  double lambda = 1.0;
};

// Surrogate for the maximum information gain gamma_T used in parameter
// schedules. ClosedFormRate requires T >= 3:
//   SE:           (log T)^(d+1) (log log T)^(-d)
//   Matern(nu):   T^(d/(2nu+d)) (log T)^((4nu+d)/(2nu+d))
MigSurrogate mig_surrogate(const Eigen::MatrixXd& gram, const Kernel& kernel,
                           int dim, int T, double lambda, MigMode mode);

}  // namespace kbandit
