#include "hexch/tree_index.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <limits>

#include "hexch/error.hpp"

namespace hexch {

namespace {

struct StringSink {
  std::string out;
  auto put(char c) -> void { out.push_back(c); }
  auto put_decimal(std::uint64_t x) -> void {
    char buf[24];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    out.append(buf, end);
  }
};

auto checked_mul(std::size_t a, std::size_t b) -> std::size_t {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    throw CapExceeded{"truncation size overflows"};
  }
  return a * b;
}

auto enumerate_depth(int r, Coord m, int depth, std::vector<TreeVertex>& out) -> void {
  auto coords = std::vector<Coord>(static_cast<std::size_t>(depth), 1);
  while (true) {
    out.emplace_back(r, coords);
    auto k = depth - 1;
    while (k >= 0 && coords[k] == m) {
      coords[k] = 1;
      --k;
    }
    if (k < 0) break;
    ++coords[k];
  }
}

auto count_at_depth(Coord m, int depth) -> std::size_t {
  auto n = std::size_t{1};
  for (int d = 0; d < depth; ++d) n = checked_mul(n, m);
  return n;
}

auto enforce_cap(std::size_t n) -> void {
  if (n > leaf_cap()) {
    throw CapExceeded{"truncation has " + std::to_string(n) + " entries, cap is " +
                      std::to_string(leaf_cap())};
  }
}

// Odometer over per-component lists, first component slowest.
template <typename F>
auto for_each_combination(const std::vector<std::vector<TreeVertex>>& lists, F&& f) -> void {
  for (const auto& l : lists) {
    if (l.empty()) return;
  }
  auto idx = std::vector<std::size_t>(lists.size(), 0);
  auto current = ProductVertex{};
  current.parts.resize(lists.size());
  while (true) {
    for (std::size_t i = 0; i < lists.size(); ++i) current.parts[i] = lists[i][idx[i]];
    f(current);
    auto k = static_cast<int>(lists.size()) - 1;
    while (k >= 0 && idx[k] + 1 == lists[k].size()) {
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
    ++idx[k];
  }
}

}  // namespace

TreeVertex::TreeVertex(int tree_depth) : tree_depth_{tree_depth} {
  if (tree_depth < 1) throw IndexDomainError{"tree depth must be at least 1"};
}

TreeVertex::TreeVertex(int tree_depth, std::vector<Coord> coords)
    : tree_depth_{tree_depth}, coords_{std::move(coords)} {
  if (tree_depth < 1) throw IndexDomainError{"tree depth must be at least 1"};
  if (depth() > tree_depth_) {
    throw IndexDomainError{"vertex of depth " + std::to_string(depth()) + " in tree of depth " +
                           std::to_string(tree_depth_)};
  }
  for (auto c : coords_) {
    if (c < 1) throw IndexDomainError{"vertex coordinates must be positive"};
  }
}

auto TreeVertex::parent() const -> TreeVertex {
  if (is_root()) throw IndexDomainError{"root has no parent"};
  return prefix(depth() - 1);
}

auto TreeVertex::child(Coord n) const -> TreeVertex {
  if (is_leaf()) throw IndexDomainError{"leaf has no children"};
  auto c = coords_;
  c.push_back(n);
  return TreeVertex{tree_depth_, std::move(c)};
}

auto TreeVertex::prefix(int d) const -> TreeVertex {
  if (d < 0 || d > depth()) throw IndexDomainError{"prefix depth out of range"};
  auto v = TreeVertex{tree_depth_};
  v.coords_.assign(coords_.begin(), coords_.begin() + d);
  return v;
}

auto TreeVertex::encode() const -> std::string {
  auto sink = StringSink{};
  encode_to(sink);
  return std::move(sink.out);
}

auto TreeVertex::decode(std::string_view text, int tree_depth) -> TreeVertex {
  auto fields = std::vector<std::uint64_t>{};
  auto pos = std::size_t{0};
  while (true) {
    auto next = text.find('/', pos);
    auto field = text.substr(pos, next == std::string_view::npos ? text.npos : next - pos);
    auto value = std::uint64_t{};
    auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || end != field.data() + field.size()) {
      throw IndexDomainError{"malformed vertex encoding '" + std::string{text} + "'"};
    }
    fields.push_back(value);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  if (fields[0] != fields.size() - 1) {
    throw IndexDomainError{"vertex encoding '" + std::string{text} + "' has inconsistent depth"};
  }
  auto coords = std::vector<Coord>{};
  for (std::size_t i = 1; i < fields.size(); ++i) {
    if (fields[i] > std::numeric_limits<Coord>::max()) {
      throw IndexDomainError{"vertex coordinate out of range"};
    }
    coords.push_back(static_cast<Coord>(fields[i]));
  }
  return TreeVertex{tree_depth, std::move(coords)};
}

auto ProductVertex::depth_tuple() const -> std::vector<int> {
  auto d = std::vector<int>{};
  d.reserve(parts.size());
  for (const auto& p : parts) d.push_back(p.depth());
  return d;
}

auto ProductVertex::is_leaf() const -> bool {
  for (const auto& p : parts) {
    if (!p.is_leaf()) return false;
  }
  return !parts.empty();
}

auto ProductVertex::encode() const -> std::string {
  auto sink = StringSink{};
  encode_to(sink);
  return std::move(sink.out);
}

auto ProductShape::leaf_count() const -> std::size_t {
  auto n = std::size_t{1};
  for (std::size_t i = 0; i < depths.size(); ++i) n = checked_mul(n, count_at_depth(sizes[i], depths[i]));
  return n;
}

auto ProductShape::path_size() const -> std::size_t {
  auto n = std::size_t{1};
  for (auto r : depths) n *= static_cast<std::size_t>(r + 1);
  return n;
}

auto ProductShape::validate() const -> void {
  if (depths.empty() || depths.size() != sizes.size()) {
    throw IndexDomainError{"product shape needs one size per tree"};
  }
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] < 1) throw IndexDomainError{"tree depth must be at least 1"};
    if (sizes[i] < 1) throw IndexDomainError{"truncation size must be at least 1"};
  }
  enforce_cap(leaf_count());
}

auto path(const TreeVertex& v) -> std::vector<TreeVertex> {
  auto out = std::vector<TreeVertex>{};
  out.reserve(static_cast<std::size_t>(v.depth()) + 1);
  for (int d = 0; d <= v.depth(); ++d) out.push_back(v.prefix(d));
  return out;
}

auto wedge(const TreeVertex& a, const TreeVertex& b) -> int {
  if (a.tree_depth() != b.tree_depth()) {
    throw IndexDomainError{"wedge of vertices from trees of depth " + std::to_string(a.tree_depth()) +
                           " and " + std::to_string(b.tree_depth())};
  }
  auto ca = a.coords();
  auto cb = b.coords();
  auto n = std::min(ca.size(), cb.size());
  auto k = std::size_t{0};
  while (k < n && ca[k] == cb[k]) ++k;
  return static_cast<int>(k) + 1;
}

auto product_path(const ProductVertex& v) -> std::vector<ProductVertex> {
  auto total = std::size_t{1};
  for (const auto& p : v.parts) total *= static_cast<std::size_t>(p.depth() + 1);
  auto out = std::vector<ProductVertex>{};
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    auto t = ProductVertex{};
    t.parts.reserve(v.parts.size());
    auto rest = idx;
    for (const auto& p : v.parts) {
      auto radix = static_cast<std::size_t>(p.depth() + 1);
      t.parts.push_back(p.prefix(static_cast<int>(rest % radix)));
      rest /= radix;
    }
    out.push_back(std::move(t));
  }
  return out;
}

auto leaf_cap() -> std::size_t {
  static const auto cap = [] {
    if (const char* env = std::getenv("HEXCH_MAX_LEAVES")) {
      auto value = std::size_t{};
      auto text = std::string_view{env};
      auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec == std::errc{} && end == text.data() + text.size() && value > 0) return value;
    }
    return std::size_t{1} << 24;
  }();
  return cap;
}

auto checked_leaf_count(int r, Coord m) -> std::size_t {
  auto n = count_at_depth(m, r);
  enforce_cap(n);
  return n;
}

auto leaves(int r, Coord m) -> std::vector<TreeVertex> {
  if (r < 1 || m < 1) throw IndexDomainError{"leaves needs r >= 1 and m >= 1"};
  auto out = std::vector<TreeVertex>{};
  out.reserve(checked_leaf_count(r, m));
  enumerate_depth(r, m, r, out);
  return out;
}

auto vertices_at_depth(int r, Coord m, int depth) -> std::vector<TreeVertex> {
  if (depth < 0 || depth > r) throw IndexDomainError{"depth out of range"};
  auto out = std::vector<TreeVertex>{};
  enforce_cap(count_at_depth(m, depth));
  enumerate_depth(r, m, depth, out);
  return out;
}

auto internal_vertices(int r, Coord m) -> std::vector<TreeVertex> {
  auto out = truncation_vertices(r, m);
  std::erase_if(out, [](const TreeVertex& v) { return v.is_leaf(); });
  return out;
}

auto truncation_vertices(int r, Coord m) -> std::vector<TreeVertex> {
  checked_leaf_count(r, m);
  auto out = std::vector<TreeVertex>{};
  for (int d = 0; d <= r; ++d) enumerate_depth(r, m, d, out);
  std::sort(out.begin(), out.end());
  return out;
}

auto product_leaves(const ProductShape& shape) -> std::vector<ProductVertex> {
  shape.validate();
  auto lists = std::vector<std::vector<TreeVertex>>{};
  for (std::size_t i = 0; i < shape.trees(); ++i) lists.push_back(leaves(shape.depths[i], shape.sizes[i]));
  auto out = std::vector<ProductVertex>{};
  out.reserve(shape.leaf_count());
  for_each_combination(lists, [&](const ProductVertex& v) { out.push_back(v); });
  return out;
}

auto product_truncation_vertices(const ProductShape& shape) -> std::vector<ProductVertex> {
  shape.validate();
  auto lists = std::vector<std::vector<TreeVertex>>{};
  auto total = std::size_t{1};
  for (std::size_t i = 0; i < shape.trees(); ++i) {
    lists.push_back(truncation_vertices(shape.depths[i], shape.sizes[i]));
    total = checked_mul(total, lists.back().size());
  }
  enforce_cap(total);
  auto out = std::vector<ProductVertex>{};
  out.reserve(total);
  for_each_combination(lists, [&](const ProductVertex& v) { out.push_back(v); });
  return out;
}

auto leaf_ordinal(const TreeVertex& leaf, Coord m) -> std::size_t {
  if (!leaf.is_leaf()) throw IndexDomainError{"leaf_ordinal of an internal vertex"};
  auto k = std::size_t{0};
  for (auto c : leaf.coords()) {
    if (c > m) throw IndexDomainError{"leaf " + leaf.encode() + " outside truncation"};
    k = k * m + (c - 1);
  }
  return k;
}

auto product_leaf_ordinal(const ProductVertex& leaf, const ProductShape& shape) -> std::size_t {
  if (leaf.size() != shape.trees()) throw IndexDomainError{"product leaf has wrong number of trees"};
  auto k = std::size_t{0};
  for (std::size_t i = 0; i < shape.trees(); ++i) {
    if (leaf.parts[i].tree_depth() != shape.depths[i]) throw IndexDomainError{"tree depth mismatch"};
    k = k * count_at_depth(shape.sizes[i], shape.depths[i]) + leaf_ordinal(leaf.parts[i], shape.sizes[i]);
  }
  return k;
}

}  // namespace hexch
