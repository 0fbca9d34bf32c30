#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kbandit {

// One named verification check. These are the release-gate properties of the
// simulator: concentration and identity checks on the estimators, the
// exploration-design chain, regret orderings at desk scale, the sketched
// learner's computational advantage at large domains, adversary compliance,
// and bit-level determinism of the results pipeline. Tolerances are pinned
// in the implementations.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Canonical check order. run_check throws std::invalid_argument for an
// unknown name; an exception escaping a check body is converted into a
// failed result instead of propagating.
std::vector<std::string> verify_names();
CheckResult run_check(const std::string& name);

// Runs the given checks (all of them when `names` is empty), printing one
//   [PASS]/[FAIL] name — detail (seconds)
// line per check to `out` as results arrive. Returns the failure count.
// Unknown names are rejected up front before anything runs.
int run_and_report(const std::vector<std::string>& names, std::ostream& out);

}  // namespace kbandit
