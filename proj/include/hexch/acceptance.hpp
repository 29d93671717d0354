#ifndef HEXCH_ACCEPTANCE_HPP_
#define HEXCH_ACCEPTANCE_HPP_

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexch/definetti.hpp"

namespace hexch {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  double seconds = 0.0;
  double limit_seconds = 0.0;
  std::string detail;

  auto to_json() const -> nlohmann::json;
};

struct SuiteOptions {
  // Convention used by resynthesis inside the round-trip criterion.
  QuantileConvention convention = QuantileConvention::left;
  // Called after each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

// Criterion ids run by a suite: "fast" or "full". Unknown names throw ConfigError.
auto suite_criteria(const std::string& suite) -> std::vector<int>;

auto run_criterion(int id, const SuiteOptions& options = {}) -> CriterionResult;
auto run_suite(const std::string& suite, const SuiteOptions& options = {}) -> std::vector<CriterionResult>;

// "PASS [3] title  12.3 s / 180 s  detail"
auto format_result(const CriterionResult& r) -> std::string;

}  // namespace hexch

#endif  // HEXCH_ACCEPTANCE_HPP_
