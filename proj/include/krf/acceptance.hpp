#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace krf {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240601;
  std::string work_dir;  // scratch space for persistence checks; a temp dir if empty
};

inline constexpr int kCriterionCount = 14;

std::string criterion_name(int id);
// Runs one criterion; errors thrown inside become a failed result.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});
std::string format_result(const CriterionResult& r);

}  // namespace krf
