#include "hexch/hperm.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "hexch/error.hpp"
#include "hexch/random.hpp"

namespace hexch {

ChildPerm::ChildPerm(std::vector<Coord> images) : images_{std::move(images)} {
  auto seen = std::vector<bool>(images_.size() + 1, false);
  for (auto x : images_) {
    if (x < 1 || x > images_.size() || seen[x]) {
      throw InvalidArgument{"child permutation is not a bijection of 1..k"};
    }
    seen[x] = true;
  }
}

auto ChildPerm::inverse() const -> ChildPerm {
  auto inv = std::vector<Coord>(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) inv[images_[i] - 1] = static_cast<Coord>(i + 1);
  return ChildPerm{std::move(inv)};
}

auto ChildPerm::is_identity() const -> bool {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i] != i + 1) return false;
  }
  return true;
}

HPerm::HPerm(int tree_depth) : tree_depth_{tree_depth} {
  if (tree_depth < 1) throw IndexDomainError{"tree depth must be at least 1"};
}

HPerm::HPerm(int tree_depth, Table table) : HPerm{tree_depth} {
  for (const auto& [v, perm] : table) {
    if (v.tree_depth() != tree_depth || v.is_leaf()) {
      throw IndexDomainError{"permutation table key " + v.encode() + " is not an internal vertex"};
    }
  }
  table_ = std::move(table);
}

auto HPerm::child_perm(const TreeVertex& source) const -> const ChildPerm* {
  auto it = table_.find(source);
  return it == table_.end() ? nullptr : &it->second;
}

auto HPerm::operator()(const TreeVertex& v) const -> TreeVertex {
  if (v.tree_depth() != tree_depth_) throw IndexDomainError{"vertex from a tree of another depth"};
  auto source = TreeVertex::root(tree_depth_);
  auto image = std::vector<Coord>{};
  image.reserve(static_cast<std::size_t>(v.depth()));
  for (auto n : v.coords()) {
    const auto* perm = child_perm(source);
    image.push_back(perm ? (*perm)(n) : n);
    source = source.child(n);
  }
  return TreeVertex{tree_depth_, std::move(image)};
}

auto ProductHPerm::operator()(const ProductVertex& v) const -> ProductVertex {
  if (v.size() != parts.size()) throw IndexDomainError{"product vertex has wrong number of trees"};
  auto out = ProductVertex{};
  out.parts.reserve(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) out.parts.push_back(parts[i](v.parts[i]));
  return out;
}

auto apply(const HPerm& p, const TreeVertex& v) -> TreeVertex { return p(v); }
auto apply(const ProductHPerm& p, const ProductVertex& v) -> ProductVertex { return p(v); }

auto compose(const HPerm& p, const HPerm& q) -> HPerm {
  if (p.tree_depth() != q.tree_depth()) throw IndexDomainError{"compose of different tree depths"};
  // (p∘q)_a = p_{q(a)} ∘ q_a, which is non-trivial only if a is a key of q or q(a) a key of p.
  auto q_inv = invert(q);
  auto keys = std::set<TreeVertex>{};
  for (const auto& [a, perm] : q.table()) keys.insert(a);
  for (const auto& [b, perm] : p.table()) keys.insert(q_inv(b));

  auto table = HPerm::Table{};
  for (const auto& a : keys) {
    const auto* inner = q.child_perm(a);
    const auto* outer = p.child_perm(q(a));
    auto k = std::max(inner ? inner->support_size() : 0, outer ? outer->support_size() : 0);
    auto images = std::vector<Coord>(k);
    for (Coord n = 1; n <= k; ++n) {
      auto mid = inner ? (*inner)(n) : n;
      images[n - 1] = outer ? (*outer)(mid) : mid;
    }
    table.emplace(a, ChildPerm{std::move(images)});
  }
  return HPerm{p.tree_depth(), std::move(table)};
}

auto compose(const ProductHPerm& p, const ProductHPerm& q) -> ProductHPerm {
  if (p.parts.size() != q.parts.size()) throw IndexDomainError{"compose of different product arity"};
  auto out = ProductHPerm{};
  for (std::size_t i = 0; i < p.parts.size(); ++i) out.parts.push_back(compose(p.parts[i], q.parts[i]));
  return out;
}

auto invert(const HPerm& p) -> HPerm {
  // p^{-1}(p(a) p_a(n)) = a n, so the inverse is keyed at the image p(a) with p_a^{-1}.
  auto table = HPerm::Table{};
  for (const auto& [a, perm] : p.table()) table.emplace(p(a), perm.inverse());
  return HPerm{p.tree_depth(), std::move(table)};
}

auto invert(const ProductHPerm& p) -> ProductHPerm {
  auto out = ProductHPerm{};
  for (const auto& part : p.parts) out.parts.push_back(invert(part));
  return out;
}

auto random_hperm(int r, Coord m, std::uint64_t seed) -> HPerm {
  if (r < 1 || m < 1) throw InvalidArgument{"random_hperm needs r >= 1 and m >= 1"};
  auto table = HPerm::Table{};
  for (const auto& v : internal_vertices(r, m)) {
    auto h = Fnv1a{};
    v.encode_to(h);
    auto rng = SplitMix64{keyed_mix(seed, h.value())};
    auto images = std::vector<Coord>(m);
    std::iota(images.begin(), images.end(), Coord{1});
    rng.shuffle(std::span{images});
    table.emplace_hint(table.end(), v, ChildPerm{std::move(images)});
  }
  return HPerm{r, std::move(table)};
}

auto random_product_hperm(const ProductShape& shape, std::uint64_t seed) -> ProductHPerm {
  auto out = ProductHPerm{};
  for (std::size_t i = 0; i < shape.trees(); ++i) {
    out.parts.push_back(random_hperm(shape.depths[i], shape.sizes[i], derive_seed(seed, "tree", i)));
  }
  return out;
}

auto verify_wedge_preservation(const std::function<TreeVertex(const TreeVertex&)>& leaf_map,
                               const std::vector<TreeVertex>& leaves) -> bool {
  auto images = std::vector<TreeVertex>{};
  images.reserve(leaves.size());
  for (const auto& a : leaves) {
    if (!a.is_leaf()) throw IndexDomainError{"verify_wedge_preservation expects leaves"};
    images.push_back(leaf_map(a));
  }
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    for (std::size_t j = i + 1; j < leaves.size(); ++j) {
      if (wedge(images[i], images[j]) != wedge(leaves[i], leaves[j])) return false;
    }
  }
  return true;
}

auto verify_wedge_preservation(const HPerm& p, const std::vector<TreeVertex>& leaves) -> bool {
  return verify_wedge_preservation([&p](const TreeVertex& v) { return p(v); }, leaves);
}

auto to_json(const HPerm& p) -> nlohmann::json {
  auto j = nlohmann::json::array();
  for (const auto& [v, perm] : p.table()) {
    j.push_back({{"vertex", v.encode()}, {"perm", perm.images()}});
  }
  return j;
}

auto hperm_from_json(const nlohmann::json& j, int tree_depth) -> HPerm {
  if (!j.is_array()) throw InvalidArgument{"hperm JSON must be a list"};
  auto table = HPerm::Table{};
  for (const auto& entry : j) {
    auto v = TreeVertex::decode(entry.at("vertex").get<std::string>(), tree_depth);
    auto images = entry.at("perm").get<std::vector<Coord>>();
    if (!table.emplace(std::move(v), ChildPerm{std::move(images)}).second) {
      throw InvalidArgument{"duplicate vertex in hperm JSON"};
    }
  }
  return HPerm{tree_depth, std::move(table)};
}

}  // namespace hexch
