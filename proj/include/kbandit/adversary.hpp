#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kbandit/domain.hpp"
#include "kbandit/kernel.hpp"
#include "kbandit/rkhs.hpp"
#include "kbandit/rng.hpp"

namespace kbandit {

// Fixed pool of candidate reward functions, all inside the RKHS ball of the
// stated radius, with their arm evaluations cached as rows so the per-round
// argmax costs O(|F| |X|) and never re-evaluates a kernel.
struct CandidateSet {
  std::vector<RkhsFunction> functions;
  Eigen::MatrixXd evaluations;  // |F| x |X|; row i caches functions[i].values

  int size() const { return static_cast<int>(functions.size()); }
};

// Validates every norm against `bound` (within 1e-9) and builds the cache.
CandidateSet make_candidate_set(std::vector<RkhsFunction> functions,
                                const Eigen::MatrixXd& gram, double bound);

// Random pool: each function places `n_centers` kernel bumps at arms drawn
// uniformly from the domain with coefficients uniform on (-1, 1), then is
// clipped into the RKHS ball of radius `bound`.
CandidateSet sample_candidate_set(const Kernel& kernel, const InputDomain& domain,
                                  double bound, int n_functions, int n_centers,
                                  RngStream rng);

// Index of the candidate maximizing  max_x f(x) - sum_x P(x) f(x), the
// conditional expected instantaneous regret of a learner sampling from P.
// Ties resolve to the lowest index. P must be a distribution over the arms.
int fully_adversarial_choice(const CandidateSet& set,
                             const Eigen::VectorXd& sampling);

// Parameter-noise instance: each round emits
//   base + clip(eta) * k(anchor, .)
// where eta ~ N(0,1) scaled by noise_scale while |eta| < threshold and the
// coefficient saturates at +/- bound/2 beyond it, so the triangle inequality
// keeps every emission inside the ball of radius `bound`.
struct HardInstance {
  RkhsFunction base;            // norm at most bound/2
  double noise_scale = 0.0;     // bound / (2 threshold)
  double bound = 0.0;
  int anchor = 0;               // domain point closest to the origin
  double threshold = 0.0;       // sqrt(2 log(2 T^2))
  Eigen::VectorXd anchor_column; // k(anchor, x) over the domain
};

HardInstance make_hard_instance(const Eigen::MatrixXd& gram,
                                const InputDomain& domain, RkhsFunction base,
                                double bound, int horizon);

// Deterministic emission for a given standard-normal draw.
RkhsFunction hard_instance_emit(const HardInstance& inst, double eta_draw);

// Draws eta from `rng` and emits; `truncated`, when given, reports whether
// the saturation branch fired.
RkhsFunction hard_instance_reward(const HardInstance& inst, RngStream& rng,
                                  bool* truncated = nullptr);

// Fixed cyclic schedule of reward functions, indexed by completed rounds.
struct ObliviousSequence {
  std::vector<RkhsFunction> functions;

  const RkhsFunction& at(long step) const {
    return functions[static_cast<std::size_t>(step) % functions.size()];
  }
};

ObliviousSequence make_oblivious_sequence(std::vector<RkhsFunction> functions,
                                          const Eigen::MatrixXd& gram,
                                          double bound);

}  // namespace kbandit
