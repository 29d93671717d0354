#ifndef HEXCH_HPERM_HPP_
#define HEXCH_HPERM_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include <json.hpp>

#include "hexch/tree_index.hpp"

namespace hexch {

// Finitely supported permutation of the positive integers, stored as the images of 1..k.
// Everything above k is fixed.
class ChildPerm {
 public:
  ChildPerm() = default;
  explicit ChildPerm(std::vector<Coord> images);

  auto operator()(Coord n) const -> Coord { return n <= images_.size() ? images_[n - 1] : n; }
  auto support_size() const -> std::size_t { return images_.size(); }
  auto images() const -> const std::vector<Coord>& { return images_; }
  auto inverse() const -> ChildPerm;
  auto is_identity() const -> bool;

  friend auto operator==(const ChildPerm&, const ChildPerm&) -> bool = default;

 private:
  std::vector<Coord> images_;
};

// An element of H_r in recursive normal form: the child permutation applied below each
// internal vertex. The table is keyed by the source-side vertex, so
//   pi(alpha n) = pi(alpha) pi_alpha(n),
// where pi_alpha is looked up at alpha itself, not at its image. Vertices absent from the
// table rearrange nothing.
class HPerm {
 public:
  using Table = std::map<TreeVertex, ChildPerm>;

  explicit HPerm(int tree_depth);
  HPerm(int tree_depth, Table table);

  static auto identity(int tree_depth) -> HPerm { return HPerm{tree_depth}; }

  auto tree_depth() const -> int { return tree_depth_; }
  auto table() const -> const Table& { return table_; }
  auto child_perm(const TreeVertex& source) const -> const ChildPerm*;

  // Maps leaves and internal vertices alike; depth is preserved.
  auto operator()(const TreeVertex& v) const -> TreeVertex;

  friend auto operator==(const HPerm&, const HPerm&) -> bool = default;

 private:
  int tree_depth_;
  Table table_;
};

struct ProductHPerm {
  std::vector<HPerm> parts;

  auto operator()(const ProductVertex& v) const -> ProductVertex;
  friend auto operator==(const ProductHPerm&, const ProductHPerm&) -> bool = default;
};

auto apply(const HPerm& p, const TreeVertex& v) -> TreeVertex;
auto apply(const ProductHPerm& p, const ProductVertex& v) -> ProductVertex;

// compose(p, q) acts as v -> p(q(v)).
auto compose(const HPerm& p, const HPerm& q) -> HPerm;
auto compose(const ProductHPerm& p, const ProductHPerm& q) -> ProductHPerm;

auto invert(const HPerm& p) -> HPerm;
auto invert(const ProductHPerm& p) -> ProductHPerm;

// Independent uniform permutations of {1..m} at every internal vertex of {1..m}^r.
auto random_hperm(int r, Coord m, std::uint64_t seed) -> HPerm;
auto random_product_hperm(const ProductShape& shape, std::uint64_t seed) -> ProductHPerm;

// True iff wedge(p(a), p(b)) == wedge(a, b) for every pair of the given leaves.
auto verify_wedge_preservation(const HPerm& p, const std::vector<TreeVertex>& leaves) -> bool;
auto verify_wedge_preservation(const std::function<TreeVertex(const TreeVertex&)>& leaf_map,
                               const std::vector<TreeVertex>& leaves) -> bool;

// [{"vertex": "1/2", "perm": [2, 1, 3]}, ...] in table order.
auto to_json(const HPerm& p) -> nlohmann::json;
auto hperm_from_json(const nlohmann::json& j, int tree_depth) -> HPerm;

}  // namespace hexch

#endif  // HEXCH_HPERM_HPP_
