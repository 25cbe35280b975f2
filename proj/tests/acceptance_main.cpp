// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runtime limits from the criteria are enforced here as part of
// the gate, not just reported.

#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "hanoiflow/verification.hpp"

int main() {
  using hanoiflow::CheckResult;
  hanoiflow::VerifyOptions opt;
  opt.seed = 0;
  unsigned hw = std::thread::hardware_concurrency();
  opt.workers = hw == 0 ? 1 : static_cast<int>(hw);

  struct Limit {
    int id;
    double seconds;
  };
  const std::vector<Limit> limits = {{1, 10.0}, {2, 60.0}, {4, 300.0}};

  std::vector<CheckResult> results = hanoiflow::run_acceptance(opt);
  int failures = 0;
  for (auto& c : results) {
    for (const auto& lim : limits) {
      if (c.id == lim.id && c.seconds >= lim.seconds) {
        c.passed = false;
        c.details.push_back("runtime limit exceeded: " +
                            std::to_string(c.seconds) + "s >= " +
                            std::to_string(lim.seconds) + "s");
      }
    }
    std::printf("[%s] %d %s (%.2fs)\n", c.passed ? "PASS" : "FAIL", c.id,
                c.name.c_str(), c.seconds);
    for (const auto& d : c.details) std::printf("    %s\n", d.c_str());
    if (!c.passed) ++failures;
  }
  if (failures == 0) {
    std::printf("acceptance: all %zu criteria passed\n", results.size());
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", failures);
  return 1;
}
