// Runs every acceptance criterion and prints one verdict line per criterion.
// Exit status is 0 only when all pass.

#include <cstdio>

#include "acceptance.hpp"

int main() {
  int passed = 0;
  const int n = convec::acceptance::count();
  for (int i = 1; i <= n; ++i) {
    const auto r = convec::acceptance::run_one(i);
    std::printf("%s\n", convec::acceptance::format_row(r).c_str());
    std::fflush(stdout);
    passed += r.passed;
  }
  std::printf("acceptance: %d criteria evaluated, %d passed, %d failed\n", n, passed, n - passed);
  return passed == n ? 0 : 5;
}
