#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fpp {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// The quantity compared against `threshold` (smaller is better).
  double metric = 0.0;
  double threshold = 0.0;
  double seconds = 0.0;
  std::string detail;
};

struct AcceptanceOptions {
  /// Smaller ensembles for the statistical criteria.
  bool quick = false;
  /// Replaces every criterion's threshold; used to exercise the failure path.
  std::optional<double> tolerance_override;
  std::uint64_t seed = 20240917;
  unsigned threads = 0;
  /// Criterion ids to run; empty runs all eight.
  std::vector<int> only;
};

/// Runs the acceptance criteria in order, calling on_result after each one.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options,
    const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace fpp
