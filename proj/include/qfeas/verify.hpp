#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qfeas {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  /// Ensemble file to load and validate as one more check.
  std::optional<std::filesystem::path> fixture;
};

/// Per-module invariant checks at fixed seeds. A check that throws is
/// reported as failed with the exception text. Output is identical from run
/// to run.
std::vector<CheckResult> run_invariant_battery(const VerifyOptions& opts = {});

/// One "PASS|FAIL  name  detail" line per check, then a summary line.
void print_check_table(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace qfeas
