#ifndef HEXCH_ARRAY_HPP_
#define HEXCH_ARRAY_HPP_

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "hexch/hperm.hpp"
#include "hexch/tree_index.hpp"

namespace hexch {

// Values over the leaves of a truncation, leaf-major in lexicographic leaf order.
// An array of pairs (or k-tuples) stores `channels` values per leaf.
struct LeafArray {
  ProductShape shape;
  std::size_t channels = 1;
  std::vector<double> values;

  auto leaf_count() const -> std::size_t { return values.size() / channels; }
  auto at(std::size_t leaf, std::size_t channel = 0) const -> double { return values[leaf * channels + channel]; }
  auto at(const ProductVertex& leaf, std::size_t channel = 0) const -> double;
  auto at(const TreeVertex& leaf, std::size_t channel = 0) const -> double;

  // Depth and size of a single-tree array.
  auto depth() const -> int { return shape.depths.front(); }
  auto size() const -> Coord { return shape.sizes.front(); }

  friend auto operator==(const LeafArray&, const LeafArray&) -> bool = default;
};

// (X_{pi(alpha)})_alpha restricted to the truncation; pi must map the truncation onto itself.
auto permuted(const LeafArray& x, const ProductHPerm& pi) -> LeafArray;
auto permuted(const LeafArray& x, const HPerm& pi) -> LeafArray;

// Stacks equally shaped arrays into one multi-channel array (a.channel 0, b.channel 0, ...).
auto zip_channels(const LeafArray& a, const LeafArray& b) -> LeafArray;

// One row per leaf: a vertex column per tree, then the value column(s).
// `index_columns` names the tree columns; values use 17 significant digits. With
// `replica_last`, the final depth-1 tree is a replica index and is written as the bare integer.
auto write_csv(std::ostream& out, const LeafArray& x, const std::vector<std::string>& index_columns,
               const std::vector<std::string>& value_columns, bool replica_last = false) -> void;

// "%.17g" in the C locale.
auto format_value(double x) -> std::string;
// Shortest decimal that reads back to the same double.
auto format_shortest(double x) -> std::string;

}  // namespace hexch

#endif  // HEXCH_ARRAY_HPP_
