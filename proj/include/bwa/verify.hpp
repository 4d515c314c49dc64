#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bwa::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::string detail;
};

/// Runs the acceptance criteria (all of them when `only` is empty), printing one
/// PASS/FAIL line per criterion as it finishes. A criterion also fails when it
/// exceeds its time budget.
std::vector<CriterionResult> run_acceptance(std::ostream& out, const std::set<int>& only = {});

/// Number of acceptance criteria.
inline constexpr int kCriteria = 11;

}  // namespace bwa::verify
