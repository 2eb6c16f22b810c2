#include <cstdio>
#include <cstring>

#include "fpp/acceptance.hpp"

// One line per criterion; exit status 0 only if all pass.
int main(int argc, char** argv) {
  fpp::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) options.quick = true;
  }
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  int failed = 0;
  fpp::run_acceptance(options, [&failed](const fpp::CriterionResult& r) {
    failed += !r.passed;
    std::printf("[%s] criterion %d: %s | metric %.3g (threshold %.3g) | %.1f s | %s\n",
                r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.metric, r.threshold,
                r.seconds, r.detail.c_str());
  });
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
