// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.
// Usage: bwa_acceptance [id ...]

#include <cstdlib>
#include <iostream>
#include <set>
#include <string>

#include "bwa/verify.hpp"

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const auto results = bwa::verify::run_acceptance(std::cout, only);
  int failed = 0;
  for (const auto& r : results) failed += !r.passed;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 && !results.empty() ? 0 : 1;
}
