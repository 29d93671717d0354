#include <gtest/gtest.h>

#include <map>
#include <set>

#include "hexch/error.hpp"
#include "hexch/hperm.hpp"
#include "hexch/random.hpp"

namespace hexch {
namespace {

auto v(int r, std::vector<Coord> c) -> TreeVertex { return TreeVertex{r, std::move(c)}; }

auto random_vertex(SplitMix64& rng, int r, Coord m) -> TreeVertex {
  auto c = std::vector<Coord>{};
  auto d = static_cast<int>(rng.below(static_cast<std::uint64_t>(r) + 1));
  for (int k = 0; k < d; ++k) c.push_back(static_cast<Coord>(1 + rng.below(m)));
  return TreeVertex{r, c};
}

TEST(ChildPerm, ValidatesBijection) {
  EXPECT_THROW(ChildPerm({1, 1}), InvalidArgument);
  EXPECT_THROW(ChildPerm({2, 3}), InvalidArgument);
  auto p = ChildPerm{{3, 1, 2}};
  EXPECT_EQ(p(1), 3u);
  EXPECT_EQ(p(4), 4u);
  EXPECT_EQ(p.inverse()(3), 1u);
  EXPECT_TRUE(ChildPerm({1, 2}).is_identity());
}

TEST(HPerm, SourceSideKeying) {
  auto swap = ChildPerm{{2, 1}};
  auto p = HPerm{2, {{TreeVertex::root(2), swap}, {v(2, {1}), swap}}};
  // (1,1): root sends 1 -> 2, the table entry at the source vertex (1) sends 1 -> 2.
  EXPECT_EQ(p(v(2, {1, 1})), v(2, {2, 2}));
  EXPECT_EQ(p(v(2, {1, 2})), v(2, {2, 1}));
  EXPECT_EQ(p(v(2, {2, 1})), v(2, {1, 1}));
  EXPECT_EQ(p(v(2, {1})), v(2, {2}));
  EXPECT_EQ(p(TreeVertex::root(2)), TreeVertex::root(2));
}

TEST(HPerm, RejectsLeafKeys) {
  EXPECT_THROW(HPerm(1, {{v(1, {1}), ChildPerm{{2, 1}}}}), IndexDomainError);
  EXPECT_THROW(apply(HPerm{2}, v(3, {1})), IndexDomainError);
}

TEST(HPerm, RandomIsBijectionOnTruncation) {
  auto p = random_hperm(3, 4, 5);
  auto all = truncation_vertices(3, 4);
  auto images = std::set<TreeVertex>{};
  for (const auto& x : all) {
    auto y = p(x);
    EXPECT_EQ(y.depth(), x.depth());
    for (auto c : y.coords()) EXPECT_LE(c, 4u);
    images.insert(y);
  }
  EXPECT_EQ(images.size(), all.size());
}

TEST(HPerm, IdentityOutsideTruncation) {
  auto p = random_hperm(2, 3, 9);
  for (Coord n = 4; n < 8; ++n) {
    EXPECT_EQ(p(v(2, {n})), v(2, {n}));
    auto y = p(v(2, {1, n}));
    EXPECT_EQ(y[1], n);
  }
}

TEST(HPerm, RandomIsSeedDeterministic) {
  EXPECT_EQ(random_hperm(3, 4, 11), random_hperm(3, 4, 11));
  EXPECT_NE(random_hperm(3, 4, 11), random_hperm(3, 4, 12));
}

TEST(HPerm, WedgePreservationDetectsViolations) {
  auto l = leaves(2, 2);
  EXPECT_TRUE(verify_wedge_preservation(random_hperm(2, 2, 3), l));
  auto bad = [](const TreeVertex& x) {
    if (x == TreeVertex{2, {1, 1}}) return TreeVertex{2, {2, 1}};
    if (x == TreeVertex{2, {2, 1}}) return TreeVertex{2, {1, 1}};
    return x;
  };
  EXPECT_FALSE(verify_wedge_preservation(bad, l));
}

TEST(HPerm, WedgePreservedOnAllLeafPairs) {
  auto l = leaves(3, 4);
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto p = random_hperm(3, 4, s);
    for (const auto& a : l) {
      for (const auto& b : l) ASSERT_EQ(wedge(p(a), p(b)), wedge(a, b));
    }
  }
}

TEST(HPerm, JsonRoundTrip) {
  auto p = random_hperm(3, 3, 21);
  auto j = to_json(p);
  ASSERT_TRUE(j.is_array());
  EXPECT_TRUE(j[0].contains("vertex"));
  EXPECT_TRUE(j[0].contains("perm"));
  EXPECT_EQ(hperm_from_json(j, 3), p);
  EXPECT_EQ(hperm_from_json(nlohmann::json::parse(j.dump()), 3), p);
}

TEST(HPerm, ProductActsComponentwise) {
  auto shape = ProductShape{{2, 1}, {3, 4}};
  auto p = random_product_hperm(shape, 4);
  ASSERT_EQ(p.parts.size(), 2u);
  for (const auto& x : product_leaves(shape)) {
    auto y = apply(p, x);
    EXPECT_EQ(y.parts[0], p.parts[0](x.parts[0]));
    EXPECT_EQ(y.parts[1], p.parts[1](x.parts[1]));
  }
}

TEST(HPermProperty, GroupLaws) {
  auto rng = SplitMix64{99};
  for (int trial = 0; trial < 300; ++trial) {
    auto r = 1 + static_cast<int>(rng.below(4));
    auto m = static_cast<Coord>(1 + rng.below(4));
    auto p = random_hperm(r, m, rng());
    auto q = random_hperm(r, m, rng());
    auto x = random_vertex(rng, r, m + 1);
    EXPECT_EQ(apply(compose(p, q), x), apply(p, apply(q, x)));
    EXPECT_EQ(apply(invert(p), apply(p, x)), x);
    EXPECT_EQ(apply(p, apply(invert(p), x)), x);
    EXPECT_EQ(apply(HPerm::identity(r), x), x);
    EXPECT_EQ(invert(invert(p)), p);
  }
}

TEST(HPermProperty, CompositionMatchesLeafMapComposition) {
  // Oracle: compose as explicit leaf maps over the truncation.
  auto l = leaves(3, 3);
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto p = random_hperm(3, 3, 2 * s);
    auto q = random_hperm(3, 3, 2 * s + 1);
    auto pm = std::map<TreeVertex, TreeVertex>{};
    auto qm = std::map<TreeVertex, TreeVertex>{};
    for (const auto& a : l) {
      pm.emplace(a, p(a));
      qm.emplace(a, q(a));
    }
    auto pq = compose(p, q);
    for (const auto& a : l) EXPECT_EQ(pq(a), pm.at(qm.at(a)));
    EXPECT_TRUE(verify_wedge_preservation(pq, l));
  }
}

}  // namespace
}  // namespace hexch
