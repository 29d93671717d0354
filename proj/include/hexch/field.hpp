#ifndef HEXCH_FIELD_HPP_
#define HEXCH_FIELD_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexch/random.hpp"
#include "hexch/tree_index.hpp"

namespace hexch {

// i.i.d. Uniform[0,1) values attached lazily to tree vertices.
//
//   key   = FNV-1a-64(role bytes, 0x1F, canonical vertex encoding)
//   value = to_unit(keyed_mix(seed, key))
//
// A value depends only on (seed, role, vertex), never on the truncation it is queried in.
class UniformField {
 public:
  UniformField(std::uint64_t seed, std::string role);

  auto seed() const -> std::uint64_t { return seed_; }
  auto role() const -> const std::string& { return role_; }

  auto operator()(const TreeVertex& v) const -> double;
  auto operator()(const ProductVertex& v) const -> double;

  // Value at the ancestor of v at the given depth (tuple), without building the ancestor.
  auto at_prefix(const TreeVertex& v, int depth) const -> double;
  auto at_prefix(const ProductVertex& v, std::span<const int> depth_tuple) const -> double;

  friend auto operator==(const UniformField& a, const UniformField& b) -> bool {
    return a.seed_ == b.seed_ && a.role_ == b.role_;
  }

 private:
  std::uint64_t seed_;
  std::string role_;
  Fnv1a prefix_;
};

auto field_value(const UniformField& f, const TreeVertex& v) -> double;
auto field_value(const UniformField& f, const ProductVertex& v) -> double;

// A distribution on [0,1] described by a named family and numeric parameters.
//   uniform(lo, hi), point(c), discrete(atoms, weights), power(k): Q(u) = u^k,
//   quantile_table(q_0..q_K): Q piecewise linear through (j/K, q_j).
class DistSpec {
 public:
  enum class Family { uniform, point, discrete, power, quantile_table };

  static auto uniform(double lo = 0.0, double hi = 1.0) -> DistSpec;
  static auto point(double c) -> DistSpec;
  static auto discrete(std::vector<double> atoms, std::vector<double> weights) -> DistSpec;
  static auto power(double k) -> DistSpec;
  static auto quantile_table(std::vector<double> knots) -> DistSpec;

  auto family() const -> Family { return family_; }
  auto family_name() const -> std::string;

  // Left-continuous inverse CDF.
  auto quantile(double u) const -> double;
  // P(X <= x) and P(X < x).
  auto cdf(double x) const -> double;
  auto cdf_left(double x) const -> double;
  // Randomized probability integral transform: Uniform(0,1) under the null for any family.
  auto pit(double x, double w) const -> double { return cdf_left(x) + w * (cdf(x) - cdf_left(x)); }

  auto to_json() const -> nlohmann::json;
  static auto from_json(const nlohmann::json& j) -> DistSpec;

  friend auto operator==(const DistSpec&, const DistSpec&) -> bool = default;

 private:
  DistSpec(Family family, std::vector<double> a, std::vector<double> b);

  Family family_;
  std::vector<double> a_;  // parameters, atoms, or knots
  std::vector<double> b_;  // weights for discrete
};

// Independent vertex values whose law depends only on the depth tuple of the vertex.
class IField {
 public:
  using Levels = std::map<std::vector<int>, DistSpec>;

  IField(UniformField base, Levels levels);
  // The same spec at every depth tuple of the given shape.
  static auto homogeneous(UniformField base, const std::vector<int>& depths, const DistSpec& spec) -> IField;

  auto base() const -> const UniformField& { return base_; }
  auto levels() const -> const Levels& { return levels_; }
  auto level(const std::vector<int>& depth_tuple) const -> const DistSpec&;

  auto operator()(const TreeVertex& v) const -> double;
  auto operator()(const ProductVertex& v) const -> double;
  auto at_prefix(const ProductVertex& v, std::span<const int> depth_tuple) const -> double;

 private:
  UniformField base_;
  Levels levels_;
};

auto ifield_value(const IField& f, const TreeVertex& v) -> double;
auto ifield_value(const IField& f, const ProductVertex& v) -> double;

}  // namespace hexch

#endif  // HEXCH_FIELD_HPP_
