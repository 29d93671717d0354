#include "hexch/array.hpp"

#include <charconv>
#include <cstdio>
#include <utility>

#include "hexch/error.hpp"

namespace hexch {

auto LeafArray::at(const ProductVertex& leaf, std::size_t channel) const -> double {
  return at(product_leaf_ordinal(leaf, shape), channel);
}

auto LeafArray::at(const TreeVertex& leaf, std::size_t channel) const -> double {
  if (shape.trees() != 1) throw IndexDomainError{"tree-vertex lookup in a product array"};
  return at(leaf_ordinal(leaf, shape.sizes[0]), channel);
}

auto permuted(const LeafArray& x, const ProductHPerm& pi) -> LeafArray {
  auto out = LeafArray{x.shape, x.channels, std::vector<double>(x.values.size())};
  auto all = product_leaves(x.shape);
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto source = product_leaf_ordinal(pi(all[i]), x.shape);
    for (std::size_t c = 0; c < x.channels; ++c) out.values[i * x.channels + c] = x.at(source, c);
  }
  return out;
}

auto permuted(const LeafArray& x, const HPerm& pi) -> LeafArray {
  return permuted(x, ProductHPerm{{pi}});
}

auto zip_channels(const LeafArray& a, const LeafArray& b) -> LeafArray {
  if (!(a.shape == b.shape)) throw InvalidArgument{"zip_channels of differently shaped arrays"};
  auto out = LeafArray{a.shape, a.channels + b.channels, {}};
  out.values.reserve(a.values.size() + b.values.size());
  for (std::size_t i = 0; i < a.leaf_count(); ++i) {
    for (std::size_t c = 0; c < a.channels; ++c) out.values.push_back(a.at(i, c));
    for (std::size_t c = 0; c < b.channels; ++c) out.values.push_back(b.at(i, c));
  }
  return out;
}

auto format_shortest(double x) -> std::string {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

auto format_value(double x) -> std::string {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

auto write_csv(std::ostream& out, const LeafArray& x, const std::vector<std::string>& index_columns,
               const std::vector<std::string>& value_columns, bool replica_last) -> void {
  if (index_columns.size() != x.shape.trees() || value_columns.size() != x.channels) {
    throw InvalidArgument{"CSV column names do not match the array"};
  }
  auto sep = "";
  for (const auto& c : index_columns) out << std::exchange(sep, ",") << c;
  for (const auto& c : value_columns) out << std::exchange(sep, ",") << c;
  out << '\n';
  auto all = product_leaves(x.shape);
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t t = 0; t < all[i].size(); ++t) {
      out << (t ? "," : "");
      if (replica_last && t + 1 == all[i].size()) {
        out << all[i].parts[t][0];
      } else {
        out << all[i].parts[t].encode();
      }
    }
    for (std::size_t c = 0; c < x.channels; ++c) out << ',' << format_value(x.at(i, c));
    out << '\n';
  }
}

}  // namespace hexch
