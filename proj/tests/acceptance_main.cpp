// Release acceptance gate: runs every verification check in order and prints
// one [PASS]/[FAIL] line per check. Exits nonzero if any check fails.

#include <cstdio>
#include <exception>
#include <iostream>

#include "kbandit/verify.hpp"

int main() {
  try {
    const int failures = kbandit::run_and_report({}, std::cout);
    if (failures != 0) {
      std::printf("%d check(s) failed\n", failures);
      return 1;
    }
    std::printf("all checks passed\n");
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "acceptance suite aborted: " << e.what() << "\n";
    return 2;
  }
}
