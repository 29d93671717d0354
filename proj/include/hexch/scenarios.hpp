#ifndef HEXCH_SCENARIOS_HPP_
#define HEXCH_SCENARIOS_HPP_

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexch/exch_tests.hpp"
#include "hexch/field.hpp"
#include "hexch/sampler.hpp"

namespace hexch {

enum class Verdict { null, violation };

auto verdict_name(Verdict v) -> std::string;
auto parse_verdict(const std::string& text) -> Verdict;

// How a scenario generates data:
//   tree   - X_alpha = sigma(v_{p(alpha)}) over one or several trees
//   ah     - X_{alpha,i} = sigma(v_{p(alpha)}, v^i_{p(alpha)})
//   ifield - I-field u plus X_alpha = tau(u_{p(alpha)}, v_{p(alpha)})
enum class ScenarioKind { tree, ah, ifield };

auto kind_name(ScenarioKind k) -> std::string;

struct ScenarioSpec {
  std::string name;
  ScenarioKind kind = ScenarioKind::tree;
  std::vector<int> depths;
  std::vector<Coord> sizes;
  Coord replicas = 0;
  std::map<std::string, double> params;
  std::map<std::string, Verdict> expected;
  std::string description;

  auto to_json() const -> nlohmann::json;
};

struct Scenario {
  ScenarioSpec spec;
  SigmaModel model;
  // ifield scenarios only: the levels the test is told to expect, and the ones sampled.
  IField::Levels declared;
  IField::Levels actual;
};

// Registered scenario at its default depths and parameters.
auto builtin(const std::string& name) -> Scenario;
// Same at other depths, with parameter overrides; unknown parameter names are rejected.
auto builtin(const std::string& name, const std::vector<int>& depths,
             const std::map<std::string, double>& overrides = {}) -> Scenario;

auto list_scenarios() -> std::vector<ScenarioSpec>;

// Array source for hexch_test. ifield scenarios return X driven by an I-field seeded from the
// same seed.
auto scenario_source(const Scenario& s, const ProductShape& shape) -> ArraySource;

// Shape actually sampled: for ah scenarios the replica tree is appended.
auto sampled_shape(const Scenario& s, const std::vector<Coord>& sizes, Coord replicas) -> ProductShape;

// Built-in generic maps, usable on any arity.
auto path_mean_model(std::size_t arity) -> SigmaModel;
auto last_value_model(std::size_t arity) -> SigmaModel;
auto first_value_model(std::size_t arity) -> SigmaModel;

}  // namespace hexch

#endif  // HEXCH_SCENARIOS_HPP_
