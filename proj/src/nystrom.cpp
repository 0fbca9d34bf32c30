#include "kbandit/nystrom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace kbandit {

namespace {

constexpr double kUnderflowGuard = 1e-300;

void check_sampling_vector(const Eigen::VectorXd& p, int arm, const char* where) {
  if (p(arm) < kUnderflowGuard) {
    throw std::runtime_error(std::string(where) + ": sampling probability " +
                             std::to_string(p(arm)) + " at arm " +
                             std::to_string(arm) + " underflows");
  }
}

}  // namespace

WeightedKernelView::WeightedKernelView(const Eigen::MatrixXd* base,
                                       Eigen::VectorXd weights,
                                       std::vector<int> index_set)
    : base_(base), set_(std::move(index_set)) {
  if (base_ == nullptr || base_->rows() != base_->cols()) {
    throw std::invalid_argument("WeightedKernelView: base Gram must be square");
  }
  if (weights.size() != base_->rows()) {
    throw std::invalid_argument("WeightedKernelView: one weight per arm required");
  }
  for (int idx : set_) {
    if (idx < 0 || idx >= base_->rows()) {
      throw std::invalid_argument("WeightedKernelView: index out of range");
    }
  }
  if ((weights.array() < 0.0).any()) {
    throw std::invalid_argument("WeightedKernelView: weights must be non-negative");
  }
  sqrt_w_ = weights.cwiseSqrt();
}

WeightedKernelView WeightedKernelView::plain(const Eigen::MatrixXd& base,
                                             std::vector<int> index_set) {
  return WeightedKernelView(&base, Eigen::VectorXd::Ones(base.rows()),
                            std::move(index_set));
}

WeightedKernelView WeightedKernelView::weighted_full(const Eigen::MatrixXd& base,
                                                     const Eigen::VectorXd& weights) {
  std::vector<int> all(base.rows());
  std::iota(all.begin(), all.end(), 0);
  return WeightedKernelView(&base, weights, std::move(all));
}

bool SamplingMatrix::is_full_identity() const {
  if (cols() != source_size) return false;
  for (int j = 0; j < cols(); ++j) {
    if (rows[j] != j || weights(j) != 1.0) return false;
  }
  return true;
}

SamplingMatrix identity_sampling(int source_size) {
  SamplingMatrix S;
  S.source_size = source_size;
  S.rows.resize(source_size);
  std::iota(S.rows.begin(), S.rows.end(), 0);
  S.weights = Eigen::VectorXd::Ones(source_size);
  return S;
}

namespace {

// One Bernoulli(p) inclusion pass over `active`; returns chosen positions.
std::vector<int> bernoulli_subset(const std::vector<int>& active,
                                  const Eigen::VectorXd& probs, RngStream& rng) {
  std::vector<int> out;
  for (size_t i = 0; i < active.size(); ++i) {
    if (rng.next_double() < probs(static_cast<int>(i))) out.push_back(active[i]);
  }
  return out;
}

struct LevelSample {
  std::vector<int> rows;      // positions into the view
  Eigen::VectorXd weights;
};

LevelSample rls_recurse(const WeightedKernelView& view,
                        const std::vector<int>& active, double lambda_eff,
                        double delta, RngStream rng,
                        std::vector<Eigen::VectorXd>* leverage_trace) {
  const int n = static_cast<int>(active.size());

  // Base case: the set is already small enough to keep whole.
  if (static_cast<double>(n) <= 192.0 * std::log(1.0 / delta)) {
    LevelSample s;
    s.rows = active;
    s.weights = Eigen::VectorXd::Ones(n);
    return s;
  }

  // Halve, recurse on the halved set with confidence delta/3.
  const Eigen::VectorXd half = Eigen::VectorXd::Constant(n, 0.5);
  RngStream halving = rng.split(1);
  std::vector<int> subset = bernoulli_subset(active, half, halving);
  if (subset.empty()) {
    subset = bernoulli_subset(active, half, halving);
    if (subset.empty()) {
      throw std::runtime_error("recursive_rls_nystrom: empty halving subset twice");
    }
  }
  const LevelSample inner =
      rls_recurse(view, subset, lambda_eff, delta / 3.0, rng.split(2), leverage_trace);

  // Approximate ridge leverage scores of every active row against the
  // recursive sample: l~_i = (3/(2 lambda)) (k~_ii - c_i^T (C + lambda I)^-1 c_i)
  // with C = S^T K~ S and c_i = S^T K~ e_i.
  const int m = static_cast<int>(inner.rows.size());
  Eigen::MatrixXd C(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      C(a, b) = inner.weights(a) * inner.weights(b) *
                view.entry(inner.rows[a], inner.rows[b]);
    }
  }
  C.diagonal().array() += lambda_eff;
  Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("recursive_rls_nystrom: leverage Cholesky failed");
  }

  Eigen::MatrixXd cross(m, n);
  for (int a = 0; a < m; ++a) {
    for (int i = 0; i < n; ++i) {
      cross(a, i) = inner.weights(a) * view.entry(inner.rows[a], active[i]);
    }
  }
  const Eigen::MatrixXd half_solve = llt.matrixL().solve(cross);

  Eigen::VectorXd leverage(n);
  for (int i = 0; i < n; ++i) {
    double resid = view.diag(active[i]) - half_solve.col(i).squaredNorm();
    if (resid < 0.0) {
      if (resid < -1e-10) {
        throw std::runtime_error(
            "recursive_rls_nystrom: leverage residual negative beyond tolerance");
      }
      resid = 0.0;
    }
    leverage(i) = 1.5 / lambda_eff * resid;
  }
  if (leverage_trace) leverage_trace->push_back(leverage);

  const double total = leverage.sum();
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(n);
  if (total > 0.0) {
    const double log_term = std::log(total / delta);
    if (log_term > 0.0) {
      for (int i = 0; i < n; ++i) {
        probs(i) = std::min(1.0, 16.0 * leverage(i) * log_term);
      }
    }
  }

  RngStream inclusion = rng.split(3);
  for (int attempt = 0; attempt < 2; ++attempt) {
    LevelSample out;
    for (int i = 0; i < n; ++i) {
      if (inclusion.next_double() < probs(i)) out.rows.push_back(active[i]);
    }
    if (out.rows.empty()) continue;
    out.weights.resize(static_cast<int>(out.rows.size()));
    int j = 0;
    for (int i = 0; i < n; ++i) {
      if (j < static_cast<int>(out.rows.size()) && out.rows[j] == active[i]) {
        out.weights(j) = 1.0 / std::sqrt(probs(i));
        ++j;
      }
    }
    return out;
  }
  throw std::runtime_error(
      "recursive_rls_nystrom: leverage sampling produced an empty set twice");
}

}  // namespace

SamplingMatrix recursive_rls_nystrom(const WeightedKernelView& view,
                                     double lambda_eff, double delta,
                                     RngStream rng,
                                     std::vector<Eigen::VectorXd>* leverage_trace) {
  if (!(lambda_eff > 0.0)) {
    throw std::invalid_argument("recursive_rls_nystrom: lambda_eff must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("recursive_rls_nystrom: delta must lie in (0,1)");
  }
  if (view.size() == 0) {
    throw std::invalid_argument("recursive_rls_nystrom: empty index set");
  }

  std::vector<int> all(view.size());
  std::iota(all.begin(), all.end(), 0);
  LevelSample s = rls_recurse(view, all, lambda_eff, delta, rng, leverage_trace);

  SamplingMatrix out;
  out.source_size = view.size();
  out.rows = std::move(s.rows);
  out.weights = std::move(s.weights);
  return out;
}

NystromEmbedding nystrom_embedding(const WeightedKernelView& view,
                                   const SamplingMatrix& S) {
  const int m = S.cols();
  if (m == 0) throw std::invalid_argument("nystrom_embedding: empty sampling matrix");
  if (S.source_size != view.size()) {
    throw std::invalid_argument("nystrom_embedding: sampling matrix size mismatch");
  }

  Eigen::MatrixXd C(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      C(a, b) = S.weights(a) * S.weights(b) * view.entry(S.rows[a], S.rows[b]);
    }
  }
  C = 0.5 * (C + C.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("nystrom_embedding: eigendecomposition failed");
  }
  const Eigen::VectorXd ev = es.eigenvalues();
  const double max_ev = ev.maxCoeff();
  if (!(max_ev > 0.0)) {
    throw std::runtime_error("nystrom_embedding: S^T K~ S has no positive eigenvalue");
  }
  const double threshold = 1e-10 * max_ev;

  Eigen::VectorXd inv_sqrt = Eigen::VectorXd::Zero(m);
  int rank = 0;
  for (int i = 0; i < m; ++i) {
    if (ev(i) > threshold) {
      inv_sqrt(i) = 1.0 / std::sqrt(ev(i));
      ++rank;
    }
  }
  if (rank == 0) {
    throw std::runtime_error("nystrom_embedding: all eigenvalues below threshold");
  }

  NystromEmbedding emb;
  emb.S = S;
  emb.rank = rank;
  emb.basis_transform =
      es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
  return emb;
}

Eigen::VectorXd embedding_at_arm_unit(const WeightedKernelView& view,
                                      const NystromEmbedding& emb, int arm) {
  const int m = emb.S.cols();
  Eigen::VectorXd sk(m);
  for (int a = 0; a < m; ++a) {
    sk(a) = emb.S.weights(a) * view.cross_unit(emb.S.rows[a], arm);
  }
  return emb.basis_transform * sk;
}

Eigen::VectorXd embedding_at(const WeightedKernelView& view,
                             const NystromEmbedding& emb, int pos) {
  const int arm = view.arm_of(pos);
  return view.sqrt_arm_weight(arm) * embedding_at_arm_unit(view, emb, arm);
}

Eigen::MatrixXd embedding_all_unit(const WeightedKernelView& view,
                                   const NystromEmbedding& emb) {
  const int m = emb.S.cols();
  const int n = view.n_arms();
  Eigen::MatrixXd sk(m, n);
  for (int a = 0; a < m; ++a) {
    const int arm_a = view.arm_of(emb.S.rows[a]);
    sk.row(a) = (emb.S.weights(a) * view.sqrt_arm_weight(arm_a)) *
                view.base().row(arm_a);
  }
  return emb.basis_transform * sk;
}

ApproxPosterior build_approx_posterior(const WeightedKernelView& view,
                                       const NystromEmbedding& emb,
                                       const Eigen::VectorXd& sampling,
                                       double lambda, int horizon) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("build_approx_posterior: lambda must be positive");
  }
  if (horizon < 1) {
    throw std::invalid_argument("build_approx_posterior: horizon must be >= 1");
  }
  if (sampling.size() != view.n_arms()) {
    throw std::invalid_argument("build_approx_posterior: sampling size mismatch");
  }

  ApproxPosterior post;
  post.phi_unit = embedding_all_unit(view, emb);
  post.sampling = sampling;
  post.lambda = lambda;
  post.horizon = static_cast<double>(horizon);

  Eigen::MatrixXd M =
      post.phi_unit * sampling.asDiagonal() * post.phi_unit.transpose();
  M = 0.5 * (M + M.transpose().eval());
  M.diagonal().array() += lambda / post.horizon;
  post.m_llt.compute(M);
  if (post.m_llt.info() != Eigen::Success) {
    throw std::runtime_error("build_approx_posterior: Cholesky of M failed");
  }
  return post;
}

Eigen::VectorXd approx_estimate(const ApproxPosterior& post, int x_played,
                                double reward) {
  if (x_played < 0 || x_played >= post.sampling.size()) {
    throw std::invalid_argument("approx_estimate: played arm out of range");
  }
  // Every arm is queried here, so the underflow guard covers them all.
  for (int i = 0; i < post.sampling.size(); ++i) {
    check_sampling_vector(post.sampling, i, "approx_estimate");
  }
  if (reward == 0.0) return Eigen::VectorXd::Zero(post.sampling.size());
  const Eigen::VectorXd v = post.m_llt.solve(post.phi_unit.col(x_played));
  return reward * (post.phi_unit.transpose() * v);
}

Eigen::VectorXd approx_variance_all(const WeightedKernelView& view,
                                    const ApproxPosterior& post) {
  const int n = view.n_arms();
  for (int i = 0; i < n; ++i) {
    check_sampling_vector(post.sampling, i, "approx_variance");
  }
  const double scale = post.horizon / post.lambda;
  const Eigen::MatrixXd solved = post.m_llt.solve(post.phi_unit);
  Eigen::VectorXd out(n);
  for (int x = 0; x < n; ++x) {
    double resid = view.base_diag(x) - post.phi_unit.col(x).squaredNorm();
    if (resid < 0.0) resid = 0.0;
    out(x) = scale * resid + post.phi_unit.col(x).dot(solved.col(x));
  }
  return out;
}

double approx_variance(const WeightedKernelView& view, const ApproxPosterior& post,
                       int arm) {
  if (arm < 0 || arm >= view.n_arms()) {
    throw std::invalid_argument("approx_variance: arm out of range");
  }
  check_sampling_vector(post.sampling, arm, "approx_variance");
  const double scale = post.horizon / post.lambda;
  const Eigen::VectorXd phi = post.phi_unit.col(arm);
  double resid = view.base_diag(arm) - phi.squaredNorm();
  if (resid < 0.0) resid = 0.0;
  return scale * resid + phi.dot(post.m_llt.solve(phi));
}

double effective_dimension(const WeightedKernelView& view, double lambda_eff) {
  if (!(lambda_eff > 0.0)) {
    throw std::invalid_argument("effective_dimension: lambda_eff must be positive");
  }
  const int n = view.size();
  // Diagnostic-only: materializing the view here is acceptable.
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) K(i, j) = view.entry(i, j);
  Eigen::MatrixXd shifted = K;
  shifted.diagonal().array() += lambda_eff;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("effective_dimension: Cholesky failed");
  }
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  return static_cast<double>(n) - lambda_eff * inv.trace();
}

}  // namespace kbandit
