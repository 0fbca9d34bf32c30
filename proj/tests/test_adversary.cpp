#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>

#include "kbandit/adversary.hpp"
#include "kbandit/domain.hpp"
#include "kbandit/kernel.hpp"
#include "kbandit/rkhs.hpp"
#include "kbandit/rng.hpp"

using namespace kbandit;

TEST_CASE("negligible coefficients survive clipping unchanged", "[adversary]") {
  InputDomain dom = build_grid_domain(1, 10);
  Eigen::MatrixXd gram = kernel_matrix(Kernel::se(0.4), dom);
  Eigen::VectorXd c = Eigen::VectorXd::Constant(10, 1e-13);
  RkhsFunction f = clip_to_ball(make_rkhs_function(gram, c), gram, 2.0);
  REQUIRE(f.coefficients == c);  // scale factor is exactly 1
  REQUIRE(f.values.cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("sampled candidate pools respect the norm budget", "[adversary]") {
  InputDomain dom = build_grid_domain(1, 100);
  Kernel k = Kernel::se(0.3);
  Eigen::MatrixXd gram = kernel_matrix(k, dom);
  CandidateSet set =
      sample_candidate_set(k, dom, 2.0, 1000, 100, make_stream(21, 0));
  REQUIRE(set.size() == 1000);
  REQUIRE(set.evaluations.rows() == 1000);
  REQUIRE(set.evaluations.cols() == 100);
  double max_norm = 0.0;
  for (const RkhsFunction& f : set.functions)
    max_norm = std::max(max_norm, rkhs_norm(gram, f.coefficients));
  REQUIRE(max_norm <= 2.0 + 1e-9);
  // Clipping binds for essentially all of them at 100 centers.
  REQUIRE(max_norm > 1.9);
  // Sup norm never exceeds the RKHS norm.
  REQUIRE(set.evaluations.cwiseAbs().maxCoeff() <= 2.0 + 1e-8);
}

TEST_CASE("candidate cache agrees with direct kernel sums", "[adversary]") {
  InputDomain dom = build_grid_domain(2, 7);
  Kernel k = Kernel::matern(1.5, 0.3 * std::sqrt(2.0));
  CandidateSet set = sample_candidate_set(k, dom, 2.0, 5, 40, make_stream(22, 0));
  RngStream probe_rng = make_stream(22, 1);
  for (const RkhsFunction& f : set.functions) {
    for (int probe = 0; probe < 10; ++probe) {
      int x = probe_rng.next_index(dom.size());
      double direct = 0.0;
      for (int j = 0; j < dom.size(); ++j)
        direct += f.coefficients(j) * eval_kernel(k, dom.point(j), dom.point(x));
      REQUIRE(std::abs(direct - f.value(x)) <= 1e-10);
    }
  }
  // Cache rows are the function values verbatim.
  for (int i = 0; i < set.size(); ++i)
    REQUIRE((set.evaluations.row(i).transpose() - set.functions[i].values)
                .cwiseAbs()
                .maxCoeff() == 0.0);
}

TEST_CASE("adversarial choice maximizes expected instantaneous regret",
          "[adversary]") {
  InputDomain dom = build_grid_domain(1, 3);
  Eigen::MatrixXd gram = kernel_matrix(Kernel::se(0.5), dom);

  SECTION("single candidate") {
    CandidateSet one =
        sample_candidate_set(Kernel::se(0.5), dom, 2.0, 1, 3, make_stream(23, 0));
    Eigen::VectorXd p = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    REQUIRE(fully_adversarial_choice(one, p) == 0);
  }

  SECTION("mirrored pair ties to the lowest index") {
    CandidateSet set;
    RkhsFunction f, g;
    f.values = Eigen::VectorXd(3);
    f.values << -1.0, 0.0, 1.0;
    g.values = -f.values;
    f.coefficients = Eigen::VectorXd::Zero(3);
    g.coefficients = Eigen::VectorXd::Zero(3);
    set.functions = {f, g};
    set.evaluations.resize(2, 3);
    set.evaluations.row(0) = f.values.transpose();
    set.evaluations.row(1) = g.values.transpose();
    Eigen::VectorXd p = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    // Both score max - mean = 1; the first wins.
    REQUIRE(fully_adversarial_choice(set, p) == 0);
  }

  SECTION("hand-computed scores on four arms") {
    InputDomain dom4 = build_grid_domain(1, 4);
    CandidateSet set;
    set.functions.resize(3);
    set.evaluations.resize(3, 4);
    set.evaluations.row(0) << 1.0, 0.0, 0.0, 0.0;   // max 1, mean 0.7 -> 0.3
    set.evaluations.row(1) << 0.0, 2.0, 0.0, 0.0;   // max 2, mean 0.2 -> 1.8
    set.evaluations.row(2) << 0.5, 0.5, 0.5, 0.5;   // constant -> 0
    Eigen::VectorXd p(4);
    p << 0.7, 0.1, 0.1, 0.1;
    REQUIRE(fully_adversarial_choice(set, p) == 1);
    Eigen::VectorXd bad = Eigen::VectorXd::Constant(4, 0.3);
    REQUIRE_THROWS_AS(fully_adversarial_choice(set, bad), std::invalid_argument);
  }
}

TEST_CASE("hard instance branches and norm compliance", "[adversary]") {
  InputDomain dom = build_grid_domain(1, 31);
  Kernel k = Kernel::se(0.3);
  Eigen::MatrixXd gram = kernel_matrix(k, dom);
  const double B = 2.0;
  const int T = 150;
  RngStream base_rng = make_stream(24, 0);
  Eigen::VectorXd c(31);
  for (int i = 0; i < 31; ++i) c(i) = 2.0 * base_rng.next_double() - 1.0;
  RkhsFunction base =
      clip_to_ball(make_rkhs_function(gram, c), gram, B / 2.0);
  HardInstance inst = make_hard_instance(gram, dom, base, B, T);
  REQUIRE(inst.anchor == 0);  // grid starts at the origin
  REQUIRE(inst.threshold ==
          Catch::Approx(std::sqrt(2.0 * std::log(2.0 * 150.0 * 150.0))));
  REQUIRE(inst.noise_scale == Catch::Approx(B / (2.0 * inst.threshold)));

  SECTION("forced draws") {
    RkhsFunction calm = hard_instance_emit(inst, 0.0);
    REQUIRE((calm.values - base.values).cwiseAbs().maxCoeff() == 0.0);
    RkhsFunction up = hard_instance_emit(inst, 1e9);
    RkhsFunction down = hard_instance_emit(inst, -1e9);
    REQUIRE((up.values - base.values - (B / 2.0) * gram.col(0))
                .cwiseAbs()
                .maxCoeff() <= 1e-12);
    REQUIRE((down.values - base.values + (B / 2.0) * gram.col(0))
                .cwiseAbs()
                .maxCoeff() <= 1e-12);
    REQUIRE(rkhs_norm(gram, up.coefficients) <= B + 1e-9);
    REQUIRE(rkhs_norm(gram, down.coefficients) <= B + 1e-9);
  }

  SECTION("Monte-Carlo norm and truncation frequency") {
    RngStream rng = make_stream(24, 1);
    long truncations = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      bool trunc = false;
      RkhsFunction f = hard_instance_reward(inst, rng, &trunc);
      truncations += trunc ? 1 : 0;
      REQUIRE(rkhs_norm(gram, f.coefficients) <= B + 1e-9);
    }
    // Tail probability is at most 1/T^2; allow four binomial sigmas on top.
    const double p = 1.0 / (150.0 * 150.0);
    const double slack = 4.0 * std::sqrt(draws * p * (1.0 - p));
    REQUIRE(static_cast<double>(truncations) <= draws * p + slack);
  }

  SECTION("oversized base rejected") {
    RkhsFunction fat = clip_to_ball(make_rkhs_function(gram, c), gram, B);
    if (rkhs_norm(gram, fat.coefficients) > B / 2.0 + 1e-9)
      REQUIRE_THROWS_AS(make_hard_instance(gram, dom, fat, B, T),
                        std::invalid_argument);
    REQUIRE_THROWS_AS(make_hard_instance(gram, dom, base, B, 1),
                      std::invalid_argument);
  }
}

TEST_CASE("oblivious schedules cycle and validate", "[adversary]") {
  InputDomain dom = build_grid_domain(1, 5);
  Eigen::MatrixXd gram = kernel_matrix(Kernel::se(0.5), dom);
  RkhsFunction f = make_rkhs_function(gram, Eigen::VectorXd::Unit(5, 2));
  RkhsFunction zero = make_rkhs_function(gram, Eigen::VectorXd::Zero(5));
  ObliviousSequence seq = make_oblivious_sequence({f, zero}, gram, 2.0);
  REQUIRE(&seq.at(0) == &seq.functions[0]);
  REQUIRE(&seq.at(1) == &seq.functions[1]);
  REQUIRE(&seq.at(4) == &seq.functions[0]);
  REQUIRE_THROWS_AS(make_oblivious_sequence({}, gram, 2.0),
                    std::invalid_argument);
  Eigen::VectorXd big = Eigen::VectorXd::Constant(5, 10.0);
  RkhsFunction fat = make_rkhs_function(gram, big);
  REQUIRE_THROWS_AS(make_oblivious_sequence({fat}, gram, 2.0),
                    std::invalid_argument);
}
