#include "kbandit/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "kbandit/domain.hpp"
#include "kbandit/gp.hpp"

namespace kbandit {
namespace {

constexpr std::uint64_t kLearnerRole = 0;
constexpr std::uint64_t kAdversaryRole = 1;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

void fnv_vector(std::uint64_t& h, const Eigen::VectorXd& v) {
  fnv_bytes(h, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

void fnv_int(std::uint64_t& h, std::int64_t v) { fnv_bytes(h, &v, sizeof(v)); }

RkhsFunction random_clipped(const Eigen::MatrixXd& gram, double radius,
                            RngStream& rng) {
  Eigen::VectorXd c(gram.rows());
  for (int i = 0; i < c.size(); ++i) c(i) = 2.0 * rng.next_double() - 1.0;
  return clip_to_ball(make_rkhs_function(gram, c), gram, radius);
}

// Round-wise reward committer; owns whatever the adversary kind needs.
using Committer = std::function<const RkhsFunction&(const Eigen::VectorXd&)>;

Committer make_adversary(const TrialConfig& config, const InputDomain& domain,
                         RngStream adv_rng) {
  switch (config.adversary) {
    case AdversaryKind::FullyAdversarial: {
      auto pool = std::make_shared<CandidateSet>(sample_candidate_set(
          config.kernel, domain, config.rkhs_bound, config.n_candidates,
          config.n_centers, adv_rng.split(1)));
      return [pool](const Eigen::VectorXd& sampling) -> const RkhsFunction& {
        return pool->functions[fully_adversarial_choice(*pool, sampling)];
      };
    }
    case AdversaryKind::HardInstanceNoise: {
      Eigen::MatrixXd gram = kernel_matrix(config.kernel, domain);
      RngStream base_rng = adv_rng.split(1);
      RkhsFunction base =
          random_clipped(gram, config.rkhs_bound / 2.0, base_rng);
      auto inst = std::make_shared<HardInstance>(make_hard_instance(
          gram, domain, std::move(base), config.rkhs_bound, config.horizon));
      auto draw_rng = std::make_shared<RngStream>(adv_rng.split(2));
      auto current = std::make_shared<RkhsFunction>();
      return [inst, draw_rng, current](const Eigen::VectorXd&) -> const RkhsFunction& {
        *current = hard_instance_reward(*inst, *draw_rng);
        return *current;
      };
    }
    case AdversaryKind::ObliviousRandom: {
      Eigen::MatrixXd gram = kernel_matrix(config.kernel, domain);
      RngStream fn_rng = adv_rng.split(1);
      std::vector<RkhsFunction> fs;
      for (int i = 0; i < std::max(1, config.n_oblivious); ++i)
        fs.push_back(random_clipped(gram, config.rkhs_bound, fn_rng));
      auto seq = std::make_shared<ObliviousSequence>(
          make_oblivious_sequence(std::move(fs), gram, config.rkhs_bound));
      auto step = std::make_shared<long>(0);
      return [seq, step](const Eigen::VectorXd&) -> const RkhsFunction& {
        return seq->at((*step)++);
      };
    }
    case AdversaryKind::Zero: {
      auto zero = std::make_shared<RkhsFunction>();
      zero->coefficients = Eigen::VectorXd::Zero(domain.size());
      zero->values = Eigen::VectorXd::Zero(domain.size());
      return [zero](const Eigen::VectorXd&) -> const RkhsFunction& {
        return *zero;
      };
    }
  }
  throw std::invalid_argument("make_adversary: unknown adversary kind");
}

}  // namespace

const char* adversary_name(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::FullyAdversarial: return "fully_adversarial";
    case AdversaryKind::HardInstanceNoise: return "hard_instance";
    case AdversaryKind::ObliviousRandom: return "oblivious_random";
    case AdversaryKind::Zero: return "zero";
  }
  return "unknown";
}

std::string kernel_label(const Kernel& kernel) {
  if (kernel.family == KernelFamily::SquaredExponential) return "se";
  if (kernel.nu == 0.5) return "matern12";
  if (kernel.nu == 1.5) return "matern32";
  return "matern52";
}

LearnerParams resolve_params(const TrialConfig& config) {
  ScheduleConstants constants =
      config.constants ? *config.constants : tuned_constants(config.kernel);
  double gamma;
  if (config.mig == MigMode::ClosedFormRate) {
    gamma = mig_surrogate(Eigen::MatrixXd(), config.kernel, config.dim,
                          config.horizon, constants.lambda, config.mig)
                .value;
  } else {
    InputDomain domain = build_grid_domain(config.dim, config.points_per_axis);
    Eigen::MatrixXd gram = kernel_matrix(config.kernel, domain);
    gamma = mig_surrogate(gram, config.kernel, config.dim, config.horizon,
                          constants.lambda, config.mig)
                .value;
  }
  LearnerParams params =
      derive_params(config.learner, config.schedule, gamma, config.horizon,
                    config.rkhs_bound, config.delta, constants);
  if (config.eta) params.eta = *config.eta;
  if (config.alpha) params.alpha = *config.alpha;
  if (config.beta) params.beta = *config.beta;
  return params;
}

double TrialResult::mean_round_ms() const {
  if (round_ns.empty()) return 0.0;
  double total = 0.0;
  for (std::int64_t ns : round_ns) total += static_cast<double>(ns);
  return total / (1e6 * static_cast<double>(round_ns.size()));
}

TrialResult run_trial(const TrialConfig& config) {
  const InputDomain domain =
      build_grid_domain(config.dim, config.points_per_axis);
  const int n = domain.size();
  const int T = config.horizon;
  TrialResult result;
  result.seed = config.seed;
  try {
    LearnerParams params = resolve_params(config);
    LearnerState state =
        learner_init(config.learner, config.kernel, domain, params,
                     make_stream(config.seed, kLearnerRole));
    Committer commit =
        make_adversary(config, domain, make_stream(config.seed, kAdversaryRole));

    result.arms.reserve(T);
    result.played_rewards.resize(T);
    result.cumulative_rewards.resize(T, n);
    result.regret.resize(T);
    result.round_ns.assign(T, 0);
    std::uint64_t hash = 1469598103934665603ULL;
    Eigen::VectorXd cumulative = Eigen::VectorXd::Zero(n);
    double played_sum = 0.0;
    for (int t = 0; t < T; ++t) {
      try {
        const RkhsFunction& f = commit(state.sampling);
        fnv_vector(hash, f.values);
        int arm;
        if (config.timing) {
          auto start = std::chrono::steady_clock::now();
          arm = learner_step(state, [&f](int a) { return f.value(a); });
          auto stop = std::chrono::steady_clock::now();
          result.round_ns[t] =
              std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
                  .count();
        } else {
          arm = learner_step(state, [&f](int a) { return f.value(a); });
        }
        fnv_int(hash, arm);
        result.arms.push_back(arm);
        result.played_rewards(t) = f.value(arm);
        cumulative += f.values;
        played_sum += f.value(arm);
        result.cumulative_rewards.row(t) = cumulative.transpose();
        result.regret(t) = cumulative.maxCoeff() - played_sum;
      } catch (const std::exception& err) {
        throw std::runtime_error("round " + std::to_string(t + 1) + ": " +
                                 err.what());
      }
    }
    result.fallback_count = state.fallback_count;
    result.commit_hash = hash;
  } catch (const std::exception& err) {
    throw std::runtime_error("trial seed " + std::to_string(config.seed) +
                             ": " + err.what());
  }
  return result;
}

SummaryRecord summarize(const TrialConfig& config,
                        const std::vector<TrialResult>& trials) {
  SummaryRecord rec;
  rec.setting = config.setting;
  rec.kernel = kernel_label(config.kernel);
  rec.learner = learner_name(config.learner);
  rec.horizon = config.horizon;
  rec.n_trials = static_cast<int>(trials.size());
  if (trials.empty()) return rec;
  double sum = 0.0;
  for (const TrialResult& t : trials) sum += t.final_regret();
  rec.mean_regret = sum / rec.n_trials;
  if (rec.n_trials > 1) {
    double ss = 0.0;
    for (const TrialResult& t : trials) {
      double d = t.final_regret() - rec.mean_regret;
      ss += d * d;
    }
    double sd = std::sqrt(ss / (rec.n_trials - 1));
    rec.two_se = 2.0 * sd / std::sqrt(static_cast<double>(rec.n_trials));
  }
  double ns_total = 0.0;
  long rounds = 0;
  for (const TrialResult& t : trials) {
    for (std::int64_t ns : t.round_ns) ns_total += static_cast<double>(ns);
    rounds += static_cast<long>(t.round_ns.size());
  }
  rec.mean_round_ms = rounds > 0 ? ns_total / (1e6 * rounds) : 0.0;
  return rec;
}

ExperimentRun run_experiment(const TrialConfig& config, int n_seeds,
                             int threads) {
  if (n_seeds < 1)
    throw std::invalid_argument("run_experiment: need at least one seed");
  threads = std::max(1, std::min(threads, n_seeds));
  std::vector<TrialResult> trials(n_seeds);
  std::vector<char> done(n_seeds, 0);
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::string first_error;
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n_seeds) return;
      TrialConfig c = config;
      c.seed = config.seed + static_cast<std::uint64_t>(i);
      try {
        trials[i] = run_trial(c);
        done[i] = 1;
      } catch (const std::exception& err) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) first_error = err.what();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (!first_error.empty())
    throw std::runtime_error("run_experiment: " + first_error);
  ExperimentRun run;
  run.summary = summarize(config, trials);
  run.trials = std::move(trials);
  return run;
}

std::vector<TrialConfig> table2_grid(std::uint64_t base_seed) {
  std::vector<TrialConfig> grid;
  const LearnerKind learners[] = {
      LearnerKind::Random, LearnerKind::KernelizedExp3,
      LearnerKind::RlsKernelizedExp3, LearnerKind::RlsKernelizedExp3ApproxMvr};
  const int horizons[] = {75, 150};
  struct SettingSpec {
    const char* name;
    int dim;
    int ppa;
    Kernel kernels[2];
  };
  const double l1 = 0.3;
  const double l2 = 0.3 * std::sqrt(2.0);
  const SettingSpec settings[] = {
      {"setting1", 1, 100, {Kernel::se(l1), Kernel::matern(1.5, l1)}},
      {"setting2", 2, 10, {Kernel::matern(2.5, l2), Kernel::se(l2)}},
  };
  for (const SettingSpec& s : settings) {
    for (const Kernel& k : s.kernels) {
      for (LearnerKind learner : learners) {
        for (int T : horizons) {
          TrialConfig c;
          c.setting = s.name;
          c.dim = s.dim;
          c.points_per_axis = s.ppa;
          c.kernel = k;
          c.horizon = T;
          c.learner = learner;
          c.adversary = AdversaryKind::FullyAdversarial;
          c.n_candidates = 300;
          c.n_centers = 100;
          c.seed = base_seed;
          c.timing = false;  // keeps repeated runs byte-identical
          grid.push_back(c);
        }
      }
    }
  }
  return grid;
}

}  // namespace kbandit
