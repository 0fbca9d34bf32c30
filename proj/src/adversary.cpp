#include "kbandit/adversary.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace kbandit {

CandidateSet make_candidate_set(std::vector<RkhsFunction> functions,
                                const Eigen::MatrixXd& gram, double bound) {
  if (functions.empty())
    throw std::invalid_argument("make_candidate_set: empty candidate pool");
  const int n = static_cast<int>(gram.rows());
  CandidateSet set;
  set.evaluations.resize(static_cast<int>(functions.size()), n);
  for (int i = 0; i < static_cast<int>(functions.size()); ++i) {
    if (functions[i].values.size() != n)
      throw std::invalid_argument("make_candidate_set: value size mismatch");
    if (rkhs_norm(gram, functions[i].coefficients) > bound + 1e-9)
      throw std::invalid_argument("make_candidate_set: candidate outside the ball");
    set.evaluations.row(i) = functions[i].values.transpose();
  }
  set.functions = std::move(functions);
  return set;
}

CandidateSet sample_candidate_set(const Kernel& kernel, const InputDomain& domain,
                                  double bound, int n_functions, int n_centers,
                                  RngStream rng) {
  if (n_functions < 1 || n_centers < 1)
    throw std::invalid_argument("sample_candidate_set: need at least one function and center");
  if (!(bound > 0.0))
    throw std::invalid_argument("sample_candidate_set: bound must be positive");
  Eigen::MatrixXd gram = kernel_matrix(kernel, domain);
  const int n = domain.size();
  std::vector<RkhsFunction> pool;
  pool.reserve(n_functions);
  for (int i = 0; i < n_functions; ++i) {
    // Bump centers land on arms, so the coefficient vector lives on the
    // domain; repeated centers just accumulate.
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (int m = 0; m < n_centers; ++m) {
      int center = rng.next_index(n);
      c(center) += 2.0 * rng.next_double() - 1.0;
    }
    pool.push_back(clip_to_ball(make_rkhs_function(gram, c), gram, bound));
  }
  return make_candidate_set(std::move(pool), gram, bound);
}

int fully_adversarial_choice(const CandidateSet& set,
                             const Eigen::VectorXd& sampling) {
  if (sampling.size() != set.evaluations.cols())
    throw std::invalid_argument("fully_adversarial_choice: distribution size mismatch");
  if (std::abs(sampling.sum() - 1.0) > 1e-9 || sampling.minCoeff() < -1e-12)
    throw std::invalid_argument("fully_adversarial_choice: not a distribution");
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < set.size(); ++i) {
    double score =
        set.evaluations.row(i).maxCoeff() - set.evaluations.row(i) * sampling;
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

HardInstance make_hard_instance(const Eigen::MatrixXd& gram,
                                const InputDomain& domain, RkhsFunction base,
                                double bound, int horizon) {
  if (horizon < 2)
    throw std::invalid_argument("make_hard_instance: horizon must be >= 2");
  if (!(bound > 0.0))
    throw std::invalid_argument("make_hard_instance: bound must be positive");
  if (base.values.size() != gram.rows() || gram.rows() != domain.size())
    throw std::invalid_argument("make_hard_instance: size mismatch");
  if (rkhs_norm(gram, base.coefficients) > bound / 2.0 + 1e-9)
    throw std::invalid_argument("make_hard_instance: base norm exceeds bound/2");
  HardInstance inst;
  inst.base = std::move(base);
  inst.bound = bound;
  inst.threshold =
      std::sqrt(2.0 * std::log(2.0 * static_cast<double>(horizon) * horizon));
  inst.noise_scale = bound / (2.0 * inst.threshold);
  inst.anchor = closest_to_origin(domain);
  inst.anchor_column = gram.col(inst.anchor);
  return inst;
}

RkhsFunction hard_instance_emit(const HardInstance& inst, double eta_draw) {
  double coeff;
  if (std::abs(eta_draw) < inst.threshold) {
    coeff = inst.noise_scale * eta_draw;
  } else {
    coeff = (eta_draw >= 0.0 ? 1.0 : -1.0) * inst.bound / 2.0;
  }
  RkhsFunction f;
  f.coefficients = inst.base.coefficients;
  f.coefficients(inst.anchor) += coeff;
  f.values = inst.base.values + coeff * inst.anchor_column;
  return f;
}

RkhsFunction hard_instance_reward(const HardInstance& inst, RngStream& rng,
                                  bool* truncated) {
  const double eta = rng.next_gaussian();
  if (truncated != nullptr) *truncated = std::abs(eta) >= inst.threshold;
  return hard_instance_emit(inst, eta);
}

ObliviousSequence make_oblivious_sequence(std::vector<RkhsFunction> functions,
                                          const Eigen::MatrixXd& gram,
                                          double bound) {
  if (functions.empty())
    throw std::invalid_argument("make_oblivious_sequence: empty schedule");
  for (const RkhsFunction& f : functions)
    if (rkhs_norm(gram, f.coefficients) > bound + 1e-9)
      throw std::invalid_argument("make_oblivious_sequence: function outside the ball");
  ObliviousSequence seq;
  seq.functions = std::move(functions);
  return seq;
}

}  // namespace kbandit
