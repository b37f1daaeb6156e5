// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is 0 iff all criteria pass.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "nichelab/acceptance.hpp"

int main(int argc, char** argv) {
  nichelab::acceptance::Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seed" && i + 1 < argc) {
      opt.master_seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (arg == "--workers" && i + 1 < argc) {
      opt.exec.workers = std::strtoull(argv[++i], nullptr, 10);
    } else {
      std::fprintf(stderr, "usage: acceptance [--seed N] [--workers N]\n");
      return 1;
    }
  }
  opt.on_result = [](const nichelab::acceptance::CriterionResult& r) {
    std::printf("%s\n", nichelab::acceptance::format_line(r).c_str());
    std::fflush(stdout);
  };
  const auto results = nichelab::acceptance::run_all(opt);
  int failed = 0;
  for (const auto& r : results) {
    failed += r.passed ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? 0 : 1;
}
