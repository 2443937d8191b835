#include <cstdio>

#include "wassim/acceptance.hpp"

int main() {
  const auto results = wassim::run_acceptance_suite();
  int failures = 0;
  for (const auto& r : results) {
    std::printf("%s [%2d] %s (%.2f s)%s%s\n", r.pass ? "PASS" : "FAIL", r.index,
                r.name.c_str(), r.seconds, r.detail.empty() ? "" : " ",
                r.detail.c_str());
    if (!r.pass) ++failures;
  }
  std::printf("%d/%d criteria passed\n", static_cast<int>(results.size()) - failures,
              static_cast<int>(results.size()));
  return failures == 0 ? 0 : 1;
}
