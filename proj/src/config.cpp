#include "kbandit/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kbandit {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

double to_double(int line, const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    fail(line, key + ": expected a number, got '" + v + "'");
  }
}

int to_int(int line, const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return static_cast<int>(d);
  } catch (const std::exception&) {
    fail(line, key + ": expected an integer, got '" + v + "'");
  }
}

bool to_bool(int line, const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  fail(line, key + ": expected on/off, got '" + v + "'");
}

// Kernel construction is deferred to the end of a section because the
// default lengthscale depends on `dim`.
struct TrialDraft {
  std::string name;
  TrialConfig config;
  std::string kernel_name = "se";
  std::optional<double> lengthscale;
  std::optional<double> c3, c4, lambda;
  int first_line = 0;
};

Kernel build_kernel(const TrialDraft& d) {
  const double ell =
      d.lengthscale ? *d.lengthscale : 0.3 * std::sqrt(static_cast<double>(d.config.dim));
  if (d.kernel_name == "se") return Kernel::se(ell);
  if (d.kernel_name == "matern12") return Kernel::matern(0.5, ell);
  if (d.kernel_name == "matern32") return Kernel::matern(1.5, ell);
  if (d.kernel_name == "matern52") return Kernel::matern(2.5, ell);
  throw std::runtime_error("config: unknown kernel '" + d.kernel_name + "' in [trial " + d.name +
                           "]");
}

NamedTrial finalize(TrialDraft&& d) {
  d.config.kernel = build_kernel(d);
  if (d.c3 || d.c4 || d.lambda) {
    ScheduleConstants c = tuned_constants(d.config.kernel);
    if (d.c3) c.c3 = *d.c3;
    if (d.c4) c.c4 = *d.c4;
    if (d.lambda) c.lambda = *d.lambda;
    d.config.constants = c;
  }
  return {std::move(d.name), std::move(d.config)};
}

void apply_trial_key(TrialDraft& d, int line, const std::string& key, const std::string& v) {
  TrialConfig& c = d.config;
  if (key == "setting") {
    c.setting = v;
  } else if (key == "dim") {
    c.dim = to_int(line, key, v);
  } else if (key == "points_per_axis") {
    c.points_per_axis = to_int(line, key, v);
  } else if (key == "kernel") {
    if (v != "se" && v != "matern12" && v != "matern32" && v != "matern52")
      fail(line, "kernel: expected se|matern12|matern32|matern52, got '" + v + "'");
    d.kernel_name = v;
  } else if (key == "lengthscale") {
    d.lengthscale = to_double(line, key, v);
  } else if (key == "horizon") {
    c.horizon = to_int(line, key, v);
  } else if (key == "learner") {
    if (v == "kexp3") c.learner = LearnerKind::KernelizedExp3;
    else if (v == "rls_kexp3") c.learner = LearnerKind::RlsKernelizedExp3;
    else if (v == "rls_kexp3_amvr") c.learner = LearnerKind::RlsKernelizedExp3ApproxMvr;
    else if (v == "random") c.learner = LearnerKind::Random;
    else fail(line, "learner: expected kexp3|rls_kexp3|rls_kexp3_amvr|random, got '" + v + "'");
  } else if (key == "adversary") {
    if (v == "fully_adversarial") c.adversary = AdversaryKind::FullyAdversarial;
    else if (v == "hard_instance") c.adversary = AdversaryKind::HardInstanceNoise;
    else if (v == "oblivious_random") c.adversary = AdversaryKind::ObliviousRandom;
    else if (v == "zero") c.adversary = AdversaryKind::Zero;
    else
      fail(line, "adversary: expected fully_adversarial|hard_instance|oblivious_random|zero, "
                 "got '" + v + "'");
  } else if (key == "candidates") {
    c.n_candidates = to_int(line, key, v);
  } else if (key == "centers") {
    c.n_centers = to_int(line, key, v);
  } else if (key == "oblivious") {
    c.n_oblivious = to_int(line, key, v);
  } else if (key == "rkhs_bound") {
    c.rkhs_bound = to_double(line, key, v);
  } else if (key == "delta") {
    c.delta = to_double(line, key, v);
  } else if (key == "schedule") {
    if (v == "tuned") c.schedule = ScheduleMode::TunedDefaults;
    else if (v == "theorem") c.schedule = ScheduleMode::TheoremConstants;
    else fail(line, "schedule: expected tuned|theorem, got '" + v + "'");
  } else if (key == "mig") {
    if (v == "rate") c.mig = MigMode::ClosedFormRate;
    else if (v == "greedy") c.mig = MigMode::GreedyEmpirical;
    else fail(line, "mig: expected rate|greedy, got '" + v + "'");
  } else if (key == "seed") {
    long s = to_int(line, key, v);
    if (s < 0) fail(line, "seed: must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "timing") {
    c.timing = to_bool(line, key, v);
  } else if (key == "eta") {
    c.eta = to_double(line, key, v);
  } else if (key == "alpha") {
    c.alpha = to_double(line, key, v);
  } else if (key == "beta") {
    c.beta = to_double(line, key, v);
  } else if (key == "c3") {
    d.c3 = to_double(line, key, v);
  } else if (key == "c4") {
    d.c4 = to_double(line, key, v);
  } else if (key == "lambda") {
    d.lambda = to_double(line, key, v);
  } else {
    fail(line, "unknown trial key '" + key + "'");
  }
}

void apply_defaults_key(RunDefaults& d, int line, const std::string& key, const std::string& v) {
  if (key == "seeds") {
    d.seeds = to_int(line, key, v);
    if (d.seeds < 1) fail(line, "seeds: must be >= 1");
  } else if (key == "threads") {
    d.threads = to_int(line, key, v);
    if (d.threads < 0) fail(line, "threads: must be >= 0");
  } else if (key == "format") {
    if (v != "csv" && v != "json") fail(line, "format: expected csv|json, got '" + v + "'");
    d.format = v;
  } else {
    fail(line, "unknown defaults key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig out;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  enum class Section { None, Defaults, Trial } section = Section::None;
  std::optional<TrialDraft> draft;

  auto close_draft = [&]() {
    if (draft) {
      out.trials.push_back(finalize(std::move(*draft)));
      draft.reset();
    }
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      std::string header = trim(line.substr(1, line.size() - 2));
      if (header == "defaults") {
        close_draft();
        section = Section::Defaults;
      } else if (header.rfind("trial", 0) == 0) {
        std::string name = trim(header.substr(5));
        if (name.empty()) fail(line_no, "trial section needs a name: [trial NAME]");
        for (const auto& t : out.trials)
          if (t.name == name) fail(line_no, "duplicate trial name '" + name + "'");
        if (draft && draft->name == name) fail(line_no, "duplicate trial name '" + name + "'");
        close_draft();
        draft = TrialDraft{};
        draft->name = name;
        draft->first_line = line_no;
        section = Section::Trial;
      } else {
        fail(line_no, "unknown section '[" + header + "]'");
      }
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    if (value.empty()) fail(line_no, "empty value for '" + key + "'");
    switch (section) {
      case Section::None:
        fail(line_no, "key '" + key + "' outside any section");
      case Section::Defaults:
        apply_defaults_key(out.defaults, line_no, key, value);
        break;
      case Section::Trial:
        apply_trial_key(*draft, line_no, key, value);
        break;
    }
  }
  close_draft();
  return out;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string(e.what()) + " (" + path + ")");
  }
}

}  // namespace kbandit
