#ifndef HEXCH_DEFINETTI_HPP_
#define HEXCH_DEFINETTI_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hexch/array.hpp"
#include "hexch/tree_index.hpp"

namespace hexch {

// Finitely supported probability measure. Level 0 measures live on [0,1]; a level-k measure
// has level-(k-1) measures as atoms. Atoms are kept in canonical order (ascending locations,
// or ascending under compare() for nested atoms) and equal atoms are merged.
class EmpiricalMeasure {
 public:
  static auto from_atoms(std::vector<std::pair<double, double>> atoms) -> EmpiricalMeasure;
  static auto from_nested_atoms(std::vector<std::pair<EmpiricalMeasure, double>> atoms) -> EmpiricalMeasure;
  static auto point_mass(double c) -> EmpiricalMeasure { return from_atoms({{c, 1.0}}); }

  auto level() const -> int { return level_; }
  auto size() const -> std::size_t { return weights_.size(); }
  auto weight(std::size_t i) const -> double { return weights_[i]; }
  auto weights() const -> std::span<const double> { return weights_; }
  // Running sums of the weights, last entry 1 up to rounding.
  auto cumulative() const -> std::span<const double> { return cumulative_; }

  // Level 0 only.
  auto location(std::size_t i) const -> double { return locations_[i]; }
  auto locations() const -> std::span<const double> { return locations_; }
  auto cdf(double x) const -> double;
  auto cdf_left(double x) const -> double;

  // Level > 0 only.
  auto atom(std::size_t i) const -> const EmpiricalMeasure& { return children_[i]; }

  auto to_json() const -> nlohmann::json;

  // Canonical total order used for nested atoms: by level, then atom by atom.
  friend auto compare(const EmpiricalMeasure& a, const EmpiricalMeasure& b) -> int;
  friend auto operator==(const EmpiricalMeasure& a, const EmpiricalMeasure& b) -> bool { return compare(a, b) == 0; }

 private:
  EmpiricalMeasure() = default;
  auto finish() -> void;

  int level_ = 0;
  std::vector<double> locations_;
  std::vector<EmpiricalMeasure> children_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

// Atom at each distinct value with weight multiplicity / N.
auto empirical_measure(std::span<const double> samples) -> EmpiricalMeasure;
// Same one level up: atoms are the distinct measures among `samples`.
auto empirical_measure(std::span<const EmpiricalMeasure> samples) -> EmpiricalMeasure;

// Generalized inverse of the CDF. `left` is Q(v) = inf{x : F(x) >= v}, the convention used
// throughout; `right` is inf{x : F(x) > v} and exists only to check that the convention matters.
enum class QuantileConvention { left, right };

auto quantile_resample(const EmpiricalMeasure& mu, double v, QuantileConvention convention = QuantileConvention::left)
    -> double;

// Index of the atom selected by v under the given convention (any level).
auto select_atom(const EmpiricalMeasure& mu, double v, QuantileConvention convention = QuantileConvention::left)
    -> std::size_t;

// Directing measures of a single-tree array: each internal vertex at depth d carries a
// measure of level r-1-d built from the measures (or values) of its children.
struct DirectingHierarchy {
  int depth = 1;
  Coord size = 1;
  std::map<TreeVertex, EmpiricalMeasure> measures;

  auto at(const TreeVertex& v) const -> const EmpiricalMeasure&;
  auto root() const -> const EmpiricalMeasure& { return at(TreeVertex::root(depth)); }
  auto to_json() const -> nlohmann::json;
};

// Uses all m children of every vertex; sibling subtrees are processed in parallel.
auto extract_hierarchy(const LeafArray& x) -> DirectingHierarchy;

// New array on {1..m'}^r: every fresh vertex below the root picks an atom of its parent's
// nested measure, and leaves are drawn from the depth-(r-1) level-0 measure, all with the
// uniforms of UniformField{seed, "w"}.
auto resynthesize(const DirectingHierarchy& h, int r, Coord fresh_size, std::uint64_t seed,
                  QuantileConvention convention = QuantileConvention::left) -> LeafArray;

// Integral of |F_mu - F_nu| for level-0 measures.
auto wasserstein1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) -> double;
// W1 between a level-0 measure and Uniform[lo, hi], integrated exactly.
auto wasserstein1_uniform(const EmpiricalMeasure& mu, double lo, double hi) -> double;

// W1 at level 0; at level k the optimal-transport cost between the atom systems with
// nested_distance at level k-1 as ground cost.
auto nested_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) -> double;

}  // namespace hexch

#endif  // HEXCH_DEFINETTI_HPP_
