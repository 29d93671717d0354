#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hexch/definetti.hpp"
#include "hexch/error.hpp"
#include "hexch/parallel.hpp"
#include "hexch/random.hpp"
#include "hexch/sampler.hpp"
#include "hexch/scenarios.hpp"
#include "hexch/transport.hpp"

namespace hexch {
namespace {

auto uniform_sample(SplitMix64& rng, std::size_t n) -> std::vector<double> {
  auto out = std::vector<double>(n);
  for (auto& x : out) x = rng.uniform();
  return out;
}

// Equal-weight samples of the same size: W1 is the mean gap between order statistics.
auto w1_sorted_oracle(std::vector<double> a, std::vector<double> b) -> double {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  auto s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

// Equal-weight n x n transport: the optimum is attained at a permutation matrix.
auto assignment_oracle(const CostMatrix& c) -> double {
  auto perm = std::vector<std::size_t>(c.rows);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto best = std::numeric_limits<double>::infinity();
  do {
    auto s = 0.0;
    for (std::size_t i = 0; i < c.rows; ++i) s += c(i, perm[i]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(c.rows);
}

TEST(EmpiricalMeasure, MergesDuplicatesAndSorts) {
  auto values = std::vector<double>{0.5, 0.2, 0.5, 0.9};
  auto mu = empirical_measure(values);
  ASSERT_EQ(mu.size(), 3u);
  EXPECT_EQ(mu.location(0), 0.2);
  EXPECT_EQ(mu.location(1), 0.5);
  EXPECT_EQ(mu.weight(1), 0.5);
  EXPECT_EQ(mu.cdf(0.5), 0.75);
  EXPECT_EQ(mu.cdf_left(0.5), 0.25);
  EXPECT_EQ(mu.cdf(0.1), 0.0);
  EXPECT_DOUBLE_EQ(mu.cumulative().back(), 1.0);
  EXPECT_THROW(empirical_measure(std::span<const double>{}), InvalidArgument);
  EXPECT_THROW(EmpiricalMeasure::from_atoms({{0.1, 0.5}}), InvalidArgument);
}

TEST(EmpiricalMeasure, NestedCanonicalOrder) {
  auto a = EmpiricalMeasure::point_mass(0.7);
  auto b = EmpiricalMeasure::point_mass(0.1);
  auto nested = empirical_measure(std::vector<EmpiricalMeasure>{a, b, a});
  EXPECT_EQ(nested.level(), 1);
  ASSERT_EQ(nested.size(), 2u);
  EXPECT_EQ(nested.atom(0), b);
  EXPECT_DOUBLE_EQ(nested.weight(1), 2.0 / 3.0);
  EXPECT_THROW(nested.cdf(0.5), InvalidArgument);
  EXPECT_THROW(EmpiricalMeasure::from_nested_atoms({{a, 0.5}, {nested, 0.5}}), InvalidArgument);
}

TEST(Quantile, LeftContinuousConvention) {
  auto mu = EmpiricalMeasure::from_atoms({{0.1, 0.5}, {0.9, 0.5}});
  EXPECT_EQ(quantile_resample(mu, 0.0), 0.1);
  EXPECT_EQ(quantile_resample(mu, 0.25), 0.1);
  EXPECT_EQ(quantile_resample(mu, 0.5), 0.1);
  EXPECT_EQ(quantile_resample(mu, 0.500001), 0.9);
  EXPECT_EQ(quantile_resample(mu, 1.0), 0.9);
  EXPECT_EQ(quantile_resample(mu, 0.5, QuantileConvention::right), 0.9);
  EXPECT_EQ(quantile_resample(mu, 0.25, QuantileConvention::right), 0.1);
  auto three = EmpiricalMeasure::from_atoms({{0.2, 1.0 / 3.0}, {0.4, 1.0 / 3.0}, {0.6, 1.0 / 3.0}});
  EXPECT_EQ(quantile_resample(three, 1.0 / 3.0), 0.2);
  EXPECT_EQ(quantile_resample(three, 2.0 / 3.0), 0.4);
}

TEST(Quantile, InverseOfCdf) {
  auto rng = SplitMix64{3};
  auto mu = empirical_measure(uniform_sample(rng, 37));
  for (int k = 0; k < 500; ++k) {
    auto v = rng.uniform();
    auto q = quantile_resample(mu, v);
    EXPECT_GE(mu.cdf(q), v - 1e-12);
    EXPECT_LT(mu.cdf_left(q), v + 1e-12);
  }
}

TEST(Extraction, HandExample) {
  // r = 2, m = 2: children (1,1), (1,2) hold 0.2, 0.4 and (2,1), (2,2) hold 0.4, 0.2.
  auto x = LeafArray{ProductShape::single(2, 2), 1, {0.2, 0.4, 0.4, 0.2}};
  auto h = extract_hierarchy(x);
  EXPECT_EQ(h.measures.size(), 3u);
  auto child = EmpiricalMeasure::from_atoms({{0.2, 0.5}, {0.4, 0.5}});
  EXPECT_EQ(h.at(TreeVertex{2, {1}}), child);
  EXPECT_EQ(h.at(TreeVertex{2, {2}}), child);
  EXPECT_EQ(h.root(), EmpiricalMeasure::from_nested_atoms({{child, 1.0}}));
  auto j = h.to_json();
  EXPECT_TRUE(j["measures"].contains("0"));
  EXPECT_TRUE(j["measures"].contains("1/2"));
}

TEST(Extraction, RejectsIncompleteArrays) {
  auto x = LeafArray{ProductShape::single(2, 2), 1, {0.2, 0.4, 0.4}};
  EXPECT_THROW(extract_hierarchy(x), InvalidArgument);
  x.values.push_back(std::nan(""));
  EXPECT_THROW(extract_hierarchy(x), InvalidArgument);
}

TEST(Extraction, ThreadCountDoesNotMatter) {
  auto sc = builtin("product", {3});
  auto x = sample_array(sc.model, 3, 6, 4);
  auto saved = thread_count();
  set_thread_count(1);
  auto a = extract_hierarchy(x);
  set_thread_count(4);
  auto b = extract_hierarchy(x);
  set_thread_count(saved);
  EXPECT_EQ(a.measures, b.measures);
  EXPECT_EQ(a.root().level(), 2);
}

TEST(Resynthesis, ValuesComeFromTheRightAtoms) {
  auto sc = builtin("product");
  auto x = sample_array(sc.model, 2, 8, 12);
  auto h = extract_hierarchy(x);
  auto y = resynthesize(h, 2, 20, 5);
  EXPECT_EQ(y.values.size(), 400u);
  auto pool = std::vector<double>(x.values.begin(), x.values.end());
  std::sort(pool.begin(), pool.end());
  auto w = UniformField{5, "w"};
  for (const auto& l : leaves(2, 20)) {
    auto value = y.at(l);
    EXPECT_TRUE(std::binary_search(pool.begin(), pool.end(), value));
    const auto& chosen = h.root().atom(select_atom(h.root(), w(l.prefix(1))));
    EXPECT_EQ(value, quantile_resample(chosen, w(l)));
  }
  EXPECT_THROW(resynthesize(h, 3, 4, 5), IndexDomainError);
}

TEST(Resynthesis, ConstantArrayStaysConstant) {
  auto x = sample_array(first_value_model(4), 3, 3, 1);
  auto y = resynthesize(extract_hierarchy(x), 3, 5, 2);
  EXPECT_TRUE(std::all_of(y.values.begin(), y.values.end(), [&](double v) { return v == x.values[0]; }));
}

TEST(Resynthesis, OneLevelTreeResamplesRootMeasure) {
  auto x = LeafArray{ProductShape::single(1, 4), 1, {0.1, 0.3, 0.5, 0.7}};
  auto y = resynthesize(extract_hierarchy(x), 1, 1000, 8);
  auto counts = std::map<double, int>{};
  for (auto v : y.values) ++counts[v];
  EXPECT_EQ(counts.size(), 4u);
  for (const auto& [v, c] : counts) EXPECT_NEAR(c, 250, 60);
}

TEST(Wasserstein, MatchesOrderStatisticOracle) {
  auto rng = SplitMix64{10};
  for (int trial = 0; trial < 50; ++trial) {
    auto n = 1 + static_cast<std::size_t>(rng.below(20));
    auto a = uniform_sample(rng, n);
    auto b = uniform_sample(rng, n);
    EXPECT_NEAR(wasserstein1(empirical_measure(a), empirical_measure(b)), w1_sorted_oracle(a, b), 1e-12);
  }
  auto p = EmpiricalMeasure::point_mass(0.2);
  EXPECT_DOUBLE_EQ(wasserstein1(p, EmpiricalMeasure::point_mass(0.7)), 0.5);
  EXPECT_EQ(wasserstein1(p, p), 0.0);
}

TEST(Wasserstein, UniformReferenceMatchesQuadrature) {
  auto rng = SplitMix64{11};
  for (int trial = 0; trial < 10; ++trial) {
    auto mu = empirical_measure(uniform_sample(rng, 1 + rng.below(15)));
    auto hi = 0.2 + 0.8 * rng.uniform();
    constexpr int grid = 200000;
    auto numeric = 0.0;
    for (int k = 0; k < grid; ++k) {
      auto x = (k + 0.5) / grid;
      numeric += std::abs(mu.cdf(x) - std::clamp(x / hi, 0.0, 1.0)) / grid;
    }
    EXPECT_NEAR(wasserstein1_uniform(mu, 0.0, hi), numeric, 1e-4);
  }
  // Point mass at the midpoint of Uniform[0,1]: 2 * integral_0^{1/2} x dx.
  EXPECT_NEAR(wasserstein1_uniform(EmpiricalMeasure::point_mass(0.5), 0.0, 1.0), 0.25, 1e-15);
}

TEST(Transport, TwoByTwoEndpointEnumeration) {
  auto rng = SplitMix64{12};
  for (int trial = 0; trial < 200; ++trial) {
    auto a1 = rng.uniform();
    auto b1 = rng.uniform();
    auto supply = std::vector<double>{a1, 1.0 - a1};
    auto demand = std::vector<double>{b1, 1.0 - b1};
    auto c = CostMatrix{2, 2, {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()}};
    // The plan is determined by t = flow(1 -> 1) and the cost is linear in t.
    auto cost_at = [&](double t) {
      return t * c(0, 0) + (a1 - t) * c(0, 1) + (b1 - t) * c(1, 0) + (1.0 - a1 - b1 + t) * c(1, 1);
    };
    auto lo = std::max(0.0, a1 + b1 - 1.0);
    auto hi = std::min(a1, b1);
    EXPECT_NEAR(optimal_transport_cost(supply, demand, c), std::min(cost_at(lo), cost_at(hi)), 1e-12);
  }
}

TEST(Transport, EqualWeightsMatchAssignmentEnumeration) {
  auto rng = SplitMix64{13};
  for (int trial = 0; trial < 100; ++trial) {
    auto n = 1 + static_cast<std::size_t>(rng.below(6));
    auto c = CostMatrix{n, n, uniform_sample(rng, n * n)};
    auto w = std::vector<double>(n, 1.0 / static_cast<double>(n));
    EXPECT_NEAR(optimal_transport_cost(w, w, c), assignment_oracle(c), 1e-12);
  }
}

TEST(Transport, RejectsUnbalancedMarginals) {
  auto c = CostMatrix{1, 2, {0.0, 1.0}};
  EXPECT_THROW(optimal_transport_cost(std::vector<double>{1.0}, std::vector<double>{0.5, 0.6}, c), InvalidArgument);
}

TEST(NestedDistance, LevelOneMatchesAssignmentOracle) {
  auto rng = SplitMix64{14};
  for (int trial = 0; trial < 30; ++trial) {
    auto n = 2 + static_cast<std::size_t>(rng.below(4));
    auto make = [&] {
      auto atoms = std::vector<EmpiricalMeasure>{};
      for (std::size_t i = 0; i < n; ++i) atoms.push_back(empirical_measure(uniform_sample(rng, 5)));
      return atoms;
    };
    auto a = make();
    auto b = make();
    auto c = CostMatrix{n, n, std::vector<double>(n * n)};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) c.data[i * n + j] = wasserstein1(a[i], b[j]);
    }
    EXPECT_NEAR(nested_distance(empirical_measure(a), empirical_measure(b)), assignment_oracle(c), 1e-12);
  }
}

TEST(NestedDistance, MetricSanity) {
  auto x = sample_array(builtin("product").model, 2, 5, 1);
  auto y = sample_array(builtin("product").model, 2, 5, 2);
  auto hx = extract_hierarchy(x).root();
  auto hy = extract_hierarchy(y).root();
  EXPECT_EQ(nested_distance(hx, hx), 0.0);
  EXPECT_NEAR(nested_distance(hx, hy), nested_distance(hy, hx), 1e-12);
  EXPECT_GT(nested_distance(hx, hy), 0.0);
  EXPECT_THROW(nested_distance(hx, EmpiricalMeasure::point_mass(0.5)), InvalidArgument);
}

TEST(Extraction, ProductLeafMeasuresApproachUniformOnParentRange) {
  // Monte Carlo oracle: E W1(empirical of m Uniform[0,1], Uniform[0,1]) ~ 0.313 / sqrt(m) for large m.
  auto sc = builtin("product");
  for (Coord m : {32u, 128u}) {
    auto x = sample_array(sc.model, 2, m, 77);
    auto h = extract_hierarchy(x);
    auto v = UniformField{77, "v"};
    auto total = 0.0;
    for (Coord k = 1; k <= m; ++k) {
      auto alpha = TreeVertex{2, {k}};
      total += wasserstein1_uniform(h.at(alpha), 0.0, v(alpha)) / v(alpha);
    }
    EXPECT_NEAR(total / m, 0.313 / std::sqrt(static_cast<double>(m)), 0.35 * 0.313 / std::sqrt(static_cast<double>(m)));
  }
}

}  // namespace
}  // namespace hexch
