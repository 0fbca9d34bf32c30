#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kbandit/domain.hpp"
#include "kbandit/feature_map.hpp"
#include "kbandit/kernel.hpp"
#include "kbandit/rkhs.hpp"
#include "kbandit/rng.hpp"

using namespace kbandit;

TEST_CASE("grid domain coordinates and ordering", "[domain]") {
  const InputDomain g1 = build_grid_domain(1, 5);
  REQUIRE(g1.size() == 5);
  REQUIRE(g1.points(0, 0) == 0.0);
  REQUIRE(g1.points(1, 0) == 0.25);
  REQUIRE(g1.points(4, 0) == 1.0);

  // Row-major: axis 0 varies slowest.
  const InputDomain g2 = build_grid_domain(2, 3);
  REQUIRE(g2.size() == 9);
  REQUIRE(g2.points(0, 0) == 0.0);
  REQUIRE(g2.points(0, 1) == 0.0);
  REQUIRE(g2.points(1, 0) == 0.0);
  REQUIRE(g2.points(1, 1) == 0.5);
  REQUIRE(g2.points(3, 0) == 0.5);
  REQUIRE(g2.points(3, 1) == 0.0);
  REQUIRE(g2.points(8, 0) == 1.0);
  REQUIRE(g2.points(8, 1) == 1.0);

  const InputDomain g3 = build_grid_domain(3, 2);
  REQUIRE(g3.size() == 8);
  REQUIRE(g3.points(1, 2) == 1.0);
  REQUIRE(g3.points(4, 0) == 1.0);

  // Single-point grid degenerates to the origin.
  const InputDomain g0 = build_grid_domain(1, 1);
  REQUIRE(g0.size() == 1);
  REQUIRE(g0.points(0, 0) == 0.0);

  REQUIRE_THROWS_AS(build_grid_domain(4, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(build_grid_domain(0, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(build_grid_domain(2, 0), std::invalid_argument);

  REQUIRE(closest_to_origin(g2) == 0);
}

TEST_CASE("kernel values against frozen references", "[kernel]") {
  Eigen::RowVectorXd x(1), y(1);
  x << 0.0;

  // r = lengthscale for each family.
  y << 0.3;
  REQUIRE(eval_kernel(Kernel::matern(0.5, 0.3), x, y) ==
          Catch::Approx(0.36787944117144233).epsilon(0).margin(1e-12));
  REQUIRE(eval_kernel(Kernel::matern(1.5, 0.3), x, y) ==
          Catch::Approx(0.4833577245965077).epsilon(0).margin(1e-12));
  REQUIRE(eval_kernel(Kernel::matern(2.5, 0.3), x, y) ==
          Catch::Approx(0.5239941088318203).epsilon(0).margin(1e-12));

  y << 0.35;
  REQUIRE(eval_kernel(Kernel::se(0.3), x, y) ==
          Catch::Approx(0.5063356166481007).epsilon(0).margin(1e-12));

  // 2-d Matern 3/2 with the experiment lengthscale 0.3*sqrt(d).
  Eigen::RowVectorXd p(2), q(2);
  p << 0.1, 0.2;
  q << 0.1, 0.45;  // r = 0.25
  REQUIRE(eval_kernel(Kernel::matern(1.5, 0.3 * std::sqrt(2.0)), p, q) ==
          Catch::Approx(0.7281734732264221).epsilon(0).margin(1e-12));

  // Unit variance at zero distance, always.
  REQUIRE(eval_kernel(Kernel::se(0.7), p, p) == 1.0);
  REQUIRE(eval_kernel(Kernel::matern(2.5, 0.7), p, p) == 1.0);

  REQUIRE_THROWS_AS(eval_kernel(Kernel::matern(2.0, 0.3), x, y),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(eval_kernel(Kernel::se(0.0), x, y), std::invalid_argument);
  REQUIRE_THROWS_AS(eval_kernel(Kernel::se(0.3), x, p), std::invalid_argument);
}

TEST_CASE("kernel matrix is exactly symmetric with unit diagonal", "[kernel]") {
  const InputDomain domain = build_grid_domain(2, 7);
  const Eigen::MatrixXd K = kernel_matrix(Kernel::se(0.3 * std::sqrt(2.0)), domain);
  REQUIRE(K.rows() == 49);
  for (int i = 0; i < K.rows(); ++i) {
    REQUIRE(K(i, i) == 1.0);
    for (int j = 0; j < i; ++j) {
      // Bitwise equality: each unordered pair must be evaluated once.
      REQUIRE(K(i, j) == K(j, i));
    }
  }
}

TEST_CASE("feature map reproduces the jittered Gram matrix", "[feature_map]") {
  const InputDomain domain = build_grid_domain(1, 40);
  const Kernel kernel = Kernel::matern(2.5, 0.3);
  const Eigen::MatrixXd K = kernel_matrix(kernel, domain);
  const FeatureMap map = build_feature_map(kernel, domain);

  Eigen::MatrixXd target = K;
  target.diagonal().array() += map.jitter;
  REQUIRE((map.L * map.L.transpose() - target).cwiseAbs().maxCoeff() < 1e-8);
  REQUIRE(map.jitter <= 1e-6);

  // Lower triangular by construction.
  for (int i = 0; i < map.L.rows(); ++i)
    for (int j = i + 1; j < map.L.cols(); ++j) REQUIRE(map.L(i, j) == 0.0);
}

TEST_CASE("feature map escalates jitter for near-singular Gram", "[feature_map]") {
  // SE kernel on a dense grid with a long lengthscale is numerically rank
  // deficient, so plain Cholesky needs a diagonal shift.
  const InputDomain domain = build_grid_domain(1, 60);
  const FeatureMap map = build_feature_map(Kernel::se(1.5), domain);
  REQUIRE(map.jitter > 0.0);
  REQUIRE(map.jitter <= 1e-6);

  // A matrix that is genuinely not PSD exhausts the ladder.
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  REQUIRE_THROWS_AS(build_feature_map(bad), std::runtime_error);
}

TEST_CASE("rkhs function values, norm and clipping", "[rkhs]") {
  InputDomain domain;
  domain.dim = 1;
  domain.points.resize(3, 1);
  domain.points << 0.0, 0.5, 1.0;
  const Eigen::MatrixXd K = kernel_matrix(Kernel::se(0.5), domain);

  Eigen::VectorXd c(3);
  c << 1.0, -2.0, 0.5;
  const RkhsFunction f = make_rkhs_function(K, c);
  REQUIRE(f.value(0) == Catch::Approx(-0.1453936778069605).margin(1e-12));
  REQUIRE(f.value(1) == Catch::Approx(-1.0902040104310498).margin(1e-12));
  REQUIRE(f.value(2) == Catch::Approx(-0.577726036188654).margin(1e-12));

  const double norm = rkhs_norm(K, c);
  REQUIRE(norm == Catch::Approx(1.3214201924296496).margin(1e-12));

  // Clipping to a larger ball is the identity.
  const RkhsFunction same = clip_to_ball(f, K, 2.0);
  REQUIRE(same.coefficients == f.coefficients);

  // Clipping to a smaller ball lands exactly on the boundary.
  const RkhsFunction clipped = clip_to_ball(f, K, 1.0);
  REQUIRE(rkhs_norm(K, clipped.coefficients) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(clipped.values.isApprox(f.values * (1.0 / norm), 1e-12));

  REQUIRE_THROWS_AS(clip_to_ball(f, K, 0.0), std::invalid_argument);
}

TEST_CASE("function evaluation agrees with the feature representation", "[rkhs]") {
  // f(x_i) = (K c)_i must match psi(x_i)^T theta with theta = L^T c, up to
  // the jitter the factorization introduced.
  RngStream rng(2024);
  const InputDomain domain = build_grid_domain(1, 30);
  const Kernel kernel = Kernel::matern(1.5, 0.3);
  const Eigen::MatrixXd K = kernel_matrix(kernel, domain);
  const FeatureMap map = build_feature_map(kernel, domain);

  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd c(domain.size());
    for (int i = 0; i < c.size(); ++i) c(i) = 2.0 * rng.next_double() - 1.0;
    const RkhsFunction f = make_rkhs_function(K, c);
    const Eigen::VectorXd theta = map.L.transpose() * c;
    const double tol = 1e-6 * (1.0 + c.lpNorm<1>());
    for (int i = 0; i < domain.size(); ++i) {
      REQUIRE(std::abs(f.value(i) - map.psi(i).dot(theta)) < tol);
    }
  }
}

TEST_CASE("sup norm is bounded by the rkhs norm", "[rkhs]") {
  RngStream rng(77);
  const InputDomain domain = build_grid_domain(2, 6);
  const Eigen::MatrixXd K =
      kernel_matrix(Kernel::matern(2.5, 0.3 * std::sqrt(2.0)), domain);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(domain.size());
    for (int j = 0; j < 5; ++j)
      c(rng.next_index(domain.size())) += rng.next_gaussian();
    const RkhsFunction f = make_rkhs_function(K, c);
    // |f(x)| = |<f, k(x,.)>| <= ||f|| * sqrt(k(x,x)) = ||f||.
    REQUIRE(f.values.cwiseAbs().maxCoeff() <= rkhs_norm(K, c) + 1e-8);
  }
}
