#include "kbandit/feature_map.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>

namespace kbandit {

namespace {

constexpr double kReconstructionTol = 1e-8;

bool try_factor(const Eigen::MatrixXd& gram, double jitter, Eigen::MatrixXd& L_out) {
  Eigen::MatrixXd shifted = gram;
  shifted.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) return false;
  Eigen::MatrixXd L = llt.matrixL();
  const double err = (L * L.transpose() - shifted).cwiseAbs().maxCoeff();
  if (err > kReconstructionTol) return false;
  L_out = std::move(L);
  return true;
}

}  // namespace

FeatureMap build_feature_map(const Eigen::MatrixXd& gram) {
  if (gram.rows() != gram.cols() || gram.rows() == 0) {
    throw std::invalid_argument("build_feature_map: gram must be square and non-empty");
  }
  const double ladder[] = {0.0, 1e-12, 1e-10, 1e-8, 1e-6};
  FeatureMap map;
  for (double jitter : ladder) {
    if (try_factor(gram, jitter, map.L)) {
      map.jitter = jitter;
      return map;
    }
  }
  throw std::runtime_error(
      "build_feature_map: Cholesky failed up to jitter 1e-6; matrix is not "
      "numerically PSD");
}

FeatureMap build_feature_map(const Kernel& kernel, const InputDomain& domain) {
  return build_feature_map(kernel_matrix(kernel, domain));
}

}  // namespace kbandit
