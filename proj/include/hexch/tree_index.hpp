#ifndef HEXCH_TREE_INDEX_HPP_
#define HEXCH_TREE_INDEX_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hexch {

using Coord = std::uint32_t;

// A vertex of the infinitary tree A(r): a path of positive integers of length at most r.
// The empty path is the root; paths of length r are leaves.
class TreeVertex {
 public:
  TreeVertex() = default;
  explicit TreeVertex(int tree_depth);
  TreeVertex(int tree_depth, std::vector<Coord> coords);

  static auto root(int tree_depth) -> TreeVertex { return TreeVertex{tree_depth}; }

  auto tree_depth() const -> int { return tree_depth_; }
  auto depth() const -> int { return static_cast<int>(coords_.size()); }
  auto coords() const -> std::span<const Coord> { return coords_; }
  auto operator[](std::size_t k) const -> Coord { return coords_[k]; }

  auto is_root() const -> bool { return coords_.empty(); }
  auto is_leaf() const -> bool { return depth() == tree_depth_; }

  auto parent() const -> TreeVertex;
  auto child(Coord n) const -> TreeVertex;
  // Ancestor at the given depth (the vertex itself when d == depth()).
  auto prefix(int d) const -> TreeVertex;

  // Canonical encoding: depth, then coordinates, slash-separated ("3/1/2/3"); root is "0".
  auto encode() const -> std::string;
  static auto decode(std::string_view text, int tree_depth) -> TreeVertex;

  template <typename Sink>
  auto encode_to(Sink& sink) const -> void {
    sink.put_decimal(coords_.size());
    for (auto c : coords_) {
      sink.put('/');
      sink.put_decimal(c);
    }
  }

  friend auto operator==(const TreeVertex&, const TreeVertex&) -> bool = default;
  friend auto operator<=>(const TreeVertex&, const TreeVertex&) = default;

 private:
  int tree_depth_ = 1;
  std::vector<Coord> coords_;
};

// A vertex of A(r_1) x ... x A(r_l).
struct ProductVertex {
  std::vector<TreeVertex> parts;

  auto size() const -> std::size_t { return parts.size(); }
  auto depth_tuple() const -> std::vector<int>;
  auto is_leaf() const -> bool;

  // Component encodings joined by ';' ("1/2;2/1/1").
  auto encode() const -> std::string;

  template <typename Sink>
  auto encode_to(Sink& sink) const -> void {
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) sink.put(';');
      parts[i].encode_to(sink);
    }
  }

  friend auto operator==(const ProductVertex&, const ProductVertex&) -> bool = default;
  friend auto operator<=>(const ProductVertex&, const ProductVertex&) = default;
};

// Shape of a finite truncation {1..m_1}^{r_1} x ... x {1..m_l}^{r_l}.
struct ProductShape {
  std::vector<int> depths;
  std::vector<Coord> sizes;

  static auto single(int r, Coord m) -> ProductShape { return {{r}, {m}}; }

  auto trees() const -> std::size_t { return depths.size(); }
  auto leaf_count() const -> std::size_t;
  // Number of path vertices feeding one leaf: prod (r_i + 1).
  auto path_size() const -> std::size_t;
  auto validate() const -> void;

  friend auto operator==(const ProductShape&, const ProductShape&) -> bool = default;
};

// [root, n1, (n1,n2), ..., v]
auto path(const TreeVertex& v) -> std::vector<TreeVertex>;

// |p(a) ∩ p(b)| = 1 + longest common coordinate prefix.
auto wedge(const TreeVertex& a, const TreeVertex& b) -> int;

// p(a_1) x ... x p(a_l). Ordered by depth tuple with the first component varying fastest,
// so for two depth-1 trees the order is (∅,∅), (i,∅), (∅,j), (i,j).
auto product_path(const ProductVertex& v) -> std::vector<ProductVertex>;

// Maximum number of leaves any truncation may have. Defaults to 2^24; the environment
// variable HEXCH_MAX_LEAVES overrides it.
auto leaf_cap() -> std::size_t;

// m^r, or throws CapExceeded when it exceeds leaf_cap().
auto checked_leaf_count(int r, Coord m) -> std::size_t;

// All m^r leaves of {1..m}^r in lexicographic order.
auto leaves(int r, Coord m) -> std::vector<TreeVertex>;

// All vertices of the truncation at exactly the given depth, lexicographic.
auto vertices_at_depth(int r, Coord m, int depth) -> std::vector<TreeVertex>;

// Vertices of depth < r in the truncation, lexicographic.
auto internal_vertices(int r, Coord m) -> std::vector<TreeVertex>;

// Every vertex (root through leaves) of the truncation, lexicographic.
auto truncation_vertices(int r, Coord m) -> std::vector<TreeVertex>;

auto product_leaves(const ProductShape& shape) -> std::vector<ProductVertex>;

// Every vertex of the truncated A(r_1,...,r_l), ordered like product_leaves over components.
auto product_truncation_vertices(const ProductShape& shape) -> std::vector<ProductVertex>;

// Position of a truncation leaf in the lexicographic order, i.e. in leaves(r, m).
auto leaf_ordinal(const TreeVertex& leaf, Coord m) -> std::size_t;
auto product_leaf_ordinal(const ProductVertex& leaf, const ProductShape& shape) -> std::size_t;

}  // namespace hexch

#endif  // HEXCH_TREE_INDEX_HPP_
