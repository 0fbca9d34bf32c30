#include <cmath>
#include <stdexcept>

#include "kbandit/exploration.hpp"
#include "kbandit/nystrom.hpp"

namespace kbandit {

std::vector<int> approx_mvr_sequence(const Eigen::MatrixXd& gram, double lambda,
                                     int budget, double delta, RngStream rng,
                                     std::vector<Eigen::VectorXd>* score_trace) {
  const int n = static_cast<int>(gram.rows());
  if (n == 0 || gram.cols() != n) {
    throw std::invalid_argument("approx_mvr_sequence: gram must be square and non-empty");
  }
  if (budget < 1) {
    throw std::invalid_argument("approx_mvr_sequence: budget must be >= 1");
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("approx_mvr_sequence: lambda must be positive");
  }
  const double delta_cap = std::min(1.0, budget / 32.0);
  if (!(delta > 0.0 && delta < delta_cap)) {
    throw std::invalid_argument(
        "approx_mvr_sequence: delta must lie in (0, min{1, budget/32})");
  }

  std::vector<int> seq;
  seq.reserve(budget);
  const double per_round_delta = delta / budget;

  for (int t = 0; t < budget; ++t) {
    Eigen::VectorXd scores(n);
    if (seq.empty()) {
      scores = gram.diagonal() / lambda;
    } else {
      const WeightedKernelView view = WeightedKernelView::plain(gram, seq);
      const SamplingMatrix S = recursive_rls_nystrom(
          view, lambda, per_round_delta, rng.split(static_cast<uint64_t>(t)));
      const NystromEmbedding emb = nystrom_embedding(view, S);
      // Unit weights make embedding_all_unit the plain embedding of each arm.
      const Eigen::MatrixXd phi = embedding_all_unit(view, emb);

      const int s = static_cast<int>(phi.rows());
      Eigen::MatrixXd M = lambda * Eigen::MatrixXd::Identity(s, s);
      for (int i = 0; i < static_cast<int>(seq.size()); ++i) {
        const Eigen::VectorXd col = phi.col(seq[i]);
        M.selfadjointView<Eigen::Lower>().rankUpdate(col, 1.0);
      }
      M = M.selfadjointView<Eigen::Lower>();
      Eigen::LLT<Eigen::MatrixXd> llt(M);
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error("approx_mvr_sequence: Cholesky of prefix moment failed");
      }
      const Eigen::MatrixXd solved = llt.solve(phi);
      for (int x = 0; x < n; ++x) {
        double resid = gram(x, x) - phi.col(x).squaredNorm();
        if (resid < 0.0) resid = 0.0;
        scores(x) = resid / lambda + phi.col(x).dot(solved.col(x));
      }
    }

    if (score_trace) score_trace->push_back(scores);
    int pick = 0;
    for (int i = 1; i < n; ++i) {
      if (scores(i) > scores(pick)) pick = i;
    }
    seq.push_back(pick);
  }
  return seq;
}

}  // namespace kbandit
