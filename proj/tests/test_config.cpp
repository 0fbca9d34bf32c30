#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "kbandit/config.hpp"

using namespace kbandit;

TEST_CASE("full config parses every key", "[config]") {
  const std::string text = R"(
# experiment description
[defaults]
seeds = 5
threads = 4
format = json

[trial main]
setting = setting2
dim = 2
points_per_axis = 10
kernel = matern52
lengthscale = 0.42
horizon = 75
learner = rls_kexp3
adversary = oblivious_random
candidates = 120
centers = 40
oblivious = 7
rkhs_bound = 1.5
delta = 0.05
schedule = theorem
mig = greedy
seed = 9
timing = off
eta = 0.07
alpha = 0.2
beta = 0.3
c3 = 6.5
lambda = 2.0
)";
  const ExperimentConfig cfg = parse_config_text(text);
  REQUIRE(cfg.defaults.seeds == 5);
  REQUIRE(cfg.defaults.threads == 4);
  REQUIRE(cfg.defaults.format == "json");
  REQUIRE(cfg.trials.size() == 1);
  const TrialConfig& t = cfg.trials[0].config;
  REQUIRE(cfg.trials[0].name == "main");
  REQUIRE(t.setting == "setting2");
  REQUIRE(t.dim == 2);
  REQUIRE(t.points_per_axis == 10);
  REQUIRE(t.kernel.family == KernelFamily::Matern);
  REQUIRE(t.kernel.nu == 2.5);
  REQUIRE(t.kernel.lengthscale == 0.42);
  REQUIRE(t.horizon == 75);
  REQUIRE(t.learner == LearnerKind::RlsKernelizedExp3);
  REQUIRE(t.adversary == AdversaryKind::ObliviousRandom);
  REQUIRE(t.n_candidates == 120);
  REQUIRE(t.n_centers == 40);
  REQUIRE(t.n_oblivious == 7);
  REQUIRE(t.rkhs_bound == 1.5);
  REQUIRE(t.delta == 0.05);
  REQUIRE(t.schedule == ScheduleMode::TheoremConstants);
  REQUIRE(t.mig == MigMode::GreedyEmpirical);
  REQUIRE(t.seed == 9);
  REQUIRE_FALSE(t.timing);
  REQUIRE(t.eta.value() == 0.07);
  REQUIRE(t.alpha.value() == 0.2);
  REQUIRE(t.beta.value() == 0.3);
  // c3/lambda given, c4 keeps the tuned per-kernel value.
  REQUIRE(t.constants.has_value());
  REQUIRE(t.constants->c3 == 6.5);
  REQUIRE(t.constants->lambda == 2.0);
  REQUIRE(t.constants->c4 == tuned_constants(t.kernel).c4);
}

TEST_CASE("defaults fill in when keys are absent", "[config]") {
  const ExperimentConfig cfg = parse_config_text("[trial a]\nhorizon = 20\n");
  REQUIRE(cfg.defaults.seeds == 10);
  REQUIRE(cfg.defaults.format == "csv");
  const TrialConfig& t = cfg.trials[0].config;
  REQUIRE(t.horizon == 20);
  REQUIRE(t.dim == 1);
  REQUIRE(t.points_per_axis == 100);
  REQUIRE(t.kernel.family == KernelFamily::SquaredExponential);
  // Default lengthscale is 0.3 sqrt(dim).
  REQUIRE(t.kernel.lengthscale == Catch::Approx(0.3));
  REQUIRE(t.learner == LearnerKind::KernelizedExp3);
  REQUIRE(t.adversary == AdversaryKind::FullyAdversarial);
  REQUIRE_FALSE(t.eta.has_value());
  REQUIRE_FALSE(t.constants.has_value());
}

TEST_CASE("default lengthscale scales with dim", "[config]") {
  const ExperimentConfig cfg =
      parse_config_text("[trial b]\ndim = 2\npoints_per_axis = 10\n");
  REQUIRE(cfg.trials[0].config.kernel.lengthscale ==
          Catch::Approx(0.3 * std::sqrt(2.0)));
}

TEST_CASE("multiple trials keep section order", "[config]") {
  const ExperimentConfig cfg = parse_config_text(
      "[trial one]\nhorizon = 10\n[trial two]\nhorizon = 20\nlearner = random\n");
  REQUIRE(cfg.trials.size() == 2);
  REQUIRE(cfg.trials[0].name == "one");
  REQUIRE(cfg.trials[1].name == "two");
  REQUIRE(cfg.trials[1].config.learner == LearnerKind::Random);
}

TEST_CASE("malformed configs report the line", "[config]") {
  using Catch::Matchers::ContainsSubstring;
  REQUIRE_THROWS_WITH(parse_config_text("[trial a]\nbogus = 1\n"),
                      ContainsSubstring("line 2") &&
                          ContainsSubstring("unknown trial key 'bogus'"));
  REQUIRE_THROWS_WITH(parse_config_text("horizon = 5\n"),
                      ContainsSubstring("outside any section"));
  REQUIRE_THROWS_WITH(parse_config_text("[trial a]\nhorizon = abc\n"),
                      ContainsSubstring("expected an integer"));
  REQUIRE_THROWS_WITH(parse_config_text("[trial a]\nkernel = rbf\n"),
                      ContainsSubstring("kernel"));
  REQUIRE_THROWS_WITH(parse_config_text("[trial a]\n[trial a]\n"),
                      ContainsSubstring("duplicate trial name"));
  REQUIRE_THROWS_WITH(parse_config_text("[mystery]\n"),
                      ContainsSubstring("unknown section"));
  REQUIRE_THROWS_WITH(parse_config_text("[defaults]\nformat = xml\n"),
                      ContainsSubstring("format"));
  REQUIRE_THROWS_WITH(parse_config_text("[trial a]\nhorizon\n"),
                      ContainsSubstring("key = value"));
  REQUIRE_THROWS_AS(parse_config_file("/nonexistent/path.cfg"),
                    std::runtime_error);
}

TEST_CASE("comments and blank lines are ignored", "[config]") {
  const ExperimentConfig cfg = parse_config_text(
      "# comment\n\n; another\n[trial x]\n  horizon = 30  \n\n");
  REQUIRE(cfg.trials.size() == 1);
  REQUIRE(cfg.trials[0].config.horizon == 30);
}
