#pragma once

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "kbandit/rng.hpp"

namespace kbandit {

// Weighted kernel k~(x,z) = sqrt(w(x) w(z)) k(x,z) restricted to an index
// set, evaluated lazily from the base Gram matrix: nothing |set|x|set| is
// ever materialized here, because the sampler only touches the diagonal and
// the rows its columns select.
class WeightedKernelView {
 public:
  // `weights` has one entry per arm of the base Gram (all 1 for the plain
  // kernel); `index_set` lists the arms forming the rows of this view.
  WeightedKernelView(const Eigen::MatrixXd* base, Eigen::VectorXd weights,
                     std::vector<int> index_set);

  static WeightedKernelView plain(const Eigen::MatrixXd& base,
                                  std::vector<int> index_set);
  static WeightedKernelView weighted_full(const Eigen::MatrixXd& base,
                                          const Eigen::VectorXd& weights);

  int size() const { return static_cast<int>(set_.size()); }
  int n_arms() const { return static_cast<int>(base_->rows()); }
  int arm_of(int pos) const { return set_[pos]; }
  const Eigen::MatrixXd& base() const { return *base_; }

  // k~ between two positions of the index set.
  double entry(int i, int j) const {
    return sqrt_w_(set_[i]) * sqrt_w_(set_[j]) * (*base_)(set_[i], set_[j]);
  }
  double diag(int i) const {
    return sqrt_w_(set_[i]) * sqrt_w_(set_[i]) * (*base_)(set_[i], set_[i]);
  }
  // k~ between position i and an arbitrary arm, leaving out the arm's own
  // sqrt-weight factor (the caller reattaches it when it cannot underflow).
  double cross_unit(int i, int arm) const {
    return sqrt_w_(set_[i]) * (*base_)(set_[i], arm);
  }
  double arm_weight(int arm) const { return sqrt_w_(arm) * sqrt_w_(arm); }
  double sqrt_arm_weight(int arm) const { return sqrt_w_(arm); }
  double base_diag(int arm) const { return (*base_)(arm, arm); }

 private:
  const Eigen::MatrixXd* base_;
  Eigen::VectorXd sqrt_w_;
  std::vector<int> set_;
};

// Weighted column selection S: column j picks row `rows[j]` of the view's
// index set with weight 1/sqrt(p_j) >= 1.
struct SamplingMatrix {
  std::vector<int> rows;     // distinct, ascending positions into the view
  Eigen::VectorXd weights;   // one per selected column, all >= 1
  int source_size = 0;

  int cols() const { return static_cast<int>(rows.size()); }
  bool is_full_identity() const;
};

SamplingMatrix identity_sampling(int source_size);

// Ridge-leverage-score sampling by halving recursion: below the base-case
// size 192 log(1/delta) the identity is returned; otherwise a Bernoulli(1/2)
// row subset is recursed on with confidence delta/3, approximate leverage
// scores l~_i = (3/(2 lambda_eff)) (K~ - K~S(S^T K~ S + lambda_eff I)^-1 S^T K~)_ii
// are formed from that recursive sample, and column i enters with probability
// p_i = min{1, 16 l~_i log(sum(l~)/delta)} and weight 1/sqrt(p_i).
//
// An empty draw is retried once with fresh randomness; a second empty draw
// throws. `leverage_trace`, when given, receives the l~ vector of every
// recursion level in order of computation (deepest first).
SamplingMatrix recursive_rls_nystrom(
    const WeightedKernelView& view, double lambda_eff, double delta,
    RngStream rng, std::vector<Eigen::VectorXd>* leverage_trace = nullptr);

// Embedding phi(x) = [(S^T K~ S)^{1/2}]^+ S^T k~(x). The basis transform is
// the square-root pseudo-inverse computed by symmetric eigendecomposition;
// eigenvalues at or below 1e-10 times the largest are dropped.
struct NystromEmbedding {
  SamplingMatrix S;
  Eigen::MatrixXd basis_transform;  // s x s, symmetric
  int rank = 0;                     // eigenvalues kept by the pseudo-inverse
};

NystromEmbedding nystrom_embedding(const WeightedKernelView& view,
                                   const SamplingMatrix& S);

// phi at a position of the view's index set.
Eigen::VectorXd embedding_at(const WeightedKernelView& view,
                             const NystromEmbedding& emb, int pos);

// phi at an arbitrary arm with the arm's own sqrt-weight factored out:
// phi(arm) = sqrt(w(arm)) * embedding_at_arm_unit(arm). Working with the
// unit-weight vector keeps tiny sampling probabilities out of the arithmetic.
Eigen::VectorXd embedding_at_arm_unit(const WeightedKernelView& view,
                                      const NystromEmbedding& emb, int arm);

// Unit-weight embeddings of every arm as columns of an s x n_arms matrix.
Eigen::MatrixXd embedding_all_unit(const WeightedKernelView& view,
                                   const NystromEmbedding& emb);

// Shared per-round state for the closed-form approximate estimator and
// variance: the unit embeddings and the Cholesky factor of
// M = sum_x P(x) phi_unit(x) phi_unit(x)^T + (lambda/T) I  (= sum_x phi phi^T + (lambda/T) I).
struct ApproxPosterior {
  Eigen::MatrixXd phi_unit;            // s x n_arms
  Eigen::LLT<Eigen::MatrixXd> m_llt;
  Eigen::VectorXd sampling;            // the P used to build M
  double lambda = 1.0;
  double horizon = 1.0;
};

ApproxPosterior build_approx_posterior(const WeightedKernelView& view,
                                       const NystromEmbedding& emb,
                                       const Eigen::VectorXd& sampling,
                                       double lambda, int horizon);

// Reward estimate f~(x) for every arm from the single observed reward:
// f~(x) = (reward / sqrt(P(x) P(x_played))) phi(x)^T M^-1 phi(x_played),
// evaluated in the cancellation form reward * phi_unit(x)^T M^-1 phi_unit(x_played).
Eigen::VectorXd approx_estimate(const ApproxPosterior& post, int x_played,
                                double reward);

// Approximate variance
// sigma~^2(x) = (T/(lambda P(x)))(k~(x,x) - phi^T phi) + (1/P(x)) phi^T M^-1 phi,
// returned for every arm; the residual first term is clamped at zero.
Eigen::VectorXd approx_variance_all(const WeightedKernelView& view,
                                    const ApproxPosterior& post);

double approx_variance(const WeightedKernelView& view, const ApproxPosterior& post,
                       int arm);

// Diagnostic trace formula Tr(K~ (K~ + lambda_eff I)^-1); materializes the
// full view, so keep it out of hot paths.
double effective_dimension(const WeightedKernelView& view, double lambda_eff);

}  // namespace kbandit
