#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hexch/error.hpp"
#include "hexch/exch_tests.hpp"
#include "hexch/parallel.hpp"
#include "hexch/random.hpp"
#include "hexch/sampler.hpp"
#include "hexch/scenarios.hpp"

namespace hexch {
namespace {

auto norm(const std::vector<double>& a, const std::vector<double>& b) -> double {
  auto s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

// Direct evaluation of 2 E|A-B| - E|A-A'| - E|B-B'| over all ordered pairs.
auto energy_oracle(const Sample& a, const Sample& b) -> double {
  auto mean = [](const Sample& x, const Sample& y) {
    auto s = 0.0;
    for (const auto& p : x) {
      for (const auto& q : y) s += norm(p, q);
    }
    return s / static_cast<double>(x.size() * y.size());
  };
  return 2.0 * mean(a, b) - mean(a, a) - mean(b, b);
}

auto random_sample(SplitMix64& rng, std::size_t n, std::size_t dim, double shift = 0.0) -> Sample {
  auto s = Sample(n, std::vector<double>(dim));
  for (auto& row : s) {
    for (auto& x : row) x = rng.uniform() + shift;
  }
  return s;
}

TEST(Energy, TrivialCases) {
  auto rng = SplitMix64{1};
  auto a = random_sample(rng, 6, 3);
  EXPECT_NEAR(energy_distance(a, a), 0.0, 1e-15);
  auto p = Sample(4, {0.0, 0.0});
  auto q = Sample(3, {3.0, 4.0});
  EXPECT_DOUBLE_EQ(energy_distance(p, q), 10.0);
  EXPECT_THROW(energy_distance(p, Sample{{1.0}}), InvalidArgument);
  EXPECT_THROW(energy_distance(Sample{}, p), InvalidArgument);
}

TEST(Energy, FourPointHandExample) {
  auto a = Sample{{0.0}, {1.0}};
  auto b = Sample{{2.0}, {4.0}};
  // Cross: |0-2|+|0-4|+|1-2|+|1-4| = 10, mean 2.5. Within a: 2/4. Within b: 4/4.
  EXPECT_DOUBLE_EQ(energy_distance(a, b), 2.0 * 2.5 - 0.5 - 1.0);
}

TEST(EnergyProperty, MatchesOracleSymmetricNonnegative) {
  auto rng = SplitMix64{2};
  for (int trial = 0; trial < 200; ++trial) {
    auto dim = 1 + rng.below(4);
    auto a = random_sample(rng, 1 + rng.below(10), dim);
    auto b = random_sample(rng, 1 + rng.below(10), dim, 0.3 * rng.uniform());
    auto e = energy_distance(a, b);
    EXPECT_NEAR(e, energy_oracle(a, b), 1e-12);
    EXPECT_NEAR(e, energy_distance(b, a), 1e-12);
    EXPECT_GE(e, -1e-12);
  }
}

TEST(Energy, PermutationTestBasics) {
  auto rng = SplitMix64{3};
  auto a = random_sample(rng, 30, 2);
  auto b = random_sample(rng, 30, 2, 1.0);
  EXPECT_THROW(energy_permutation_test(a, b, 0, 1), InvalidArgument);
  auto far = energy_permutation_test(a, b, 199, 1);
  EXPECT_DOUBLE_EQ(far.p_value, 1.0 / 200.0);
  auto c = random_sample(rng, 30, 2);
  auto near = energy_permutation_test(a, c, 199, 1);
  EXPECT_GT(near.p_value, 0.05);
  EXPECT_LE(near.p_value, 1.0);
}

TEST(Energy, PermutationTestIndependentOfThreads) {
  auto rng = SplitMix64{4};
  auto a = random_sample(rng, 25, 3);
  auto b = random_sample(rng, 25, 3, 0.1);
  auto saved = thread_count();
  set_thread_count(1);
  auto one = energy_permutation_test(a, b, 99, 7);
  set_thread_count(4);
  auto four = energy_permutation_test(a, b, 99, 7);
  set_thread_count(saved);
  EXPECT_EQ(one.statistic, four.statistic);
  EXPECT_EQ(one.p_value, four.p_value);
}

TEST(Energy, StatisticInvariantUnderReplicateOrder) {
  auto rng = SplitMix64{5};
  auto a = random_sample(rng, 12, 3);
  auto b = random_sample(rng, 9, 3);
  auto shuffled = a;
  std::reverse(shuffled.begin(), shuffled.end());
  EXPECT_NEAR(energy_distance(a, b), energy_distance(shuffled, b), 1e-12);
}

TEST(Ks, StatisticsAndPvalues) {
  auto pts = std::vector<double>{0.1, 0.4, 0.7};
  // Empirical steps against F(x) = x: max(1/3 - 0.1, 2/3 - 0.4, 1 - 0.7, 0.4 - 1/3, 0.7 - 2/3).
  EXPECT_NEAR(ks_statistic_uniform(pts), 0.3, 1e-12);
  EXPECT_NEAR(ks_statistic_two_sample(std::vector<double>{0.1, 0.2}, std::vector<double>{0.3, 0.4}), 1.0, 1e-12);
  EXPECT_GT(kolmogorov_pvalue(0.01, 100), 0.99);
  EXPECT_LT(kolmogorov_pvalue(0.3, 1000), 1e-12);
  EXPECT_GT(kolmogorov_pvalue(0.1, 100), kolmogorov_pvalue(0.2, 100));
  // Asymptotic 5% point 1.358 / sqrt(n) for large n.
  EXPECT_NEAR(ks_critical_value(0.05, 10000) * 100.0, 1.358, 0.01);
  EXPECT_NEAR(kolmogorov_pvalue(ks_critical_value(0.01, 50), 50), 0.01, 1e-6);
}

TEST(Hexch, RejectsDegenerateConfigurations) {
  auto sc = builtin("uniform-leaf");
  auto shape = ProductShape::single(2, 4);
  auto source = scenario_source(sc, shape);
  auto opts = HexchOptions{};
  opts.n_reps = 19;
  EXPECT_THROW(hexch_test(source, shape, opts), InvalidArgument);
  opts.n_reps = 20;
  opts.n_resamples = 0;
  EXPECT_THROW(hexch_test(source, shape, opts), InvalidArgument);
}

TEST(Hexch, MarginalCap) {
  auto opts = HexchOptions{};
  EXPECT_EQ(hexch_marginal(ProductShape::single(3, 8), opts).size(), 512u);
  auto big = hexch_marginal(ProductShape::single(2, 9), opts);
  EXPECT_EQ(big.size(), 64u);
  EXPECT_TRUE(std::is_sorted(big.begin(), big.end()));
  EXPECT_EQ(big, hexch_marginal(ProductShape::single(2, 9), opts));
  opts.subset_seed = 1;
  EXPECT_NE(big, hexch_marginal(ProductShape::single(2, 9), opts));
  EXPECT_EQ(hexch_marginal(ProductShape::single(1, 40), opts).size(), 40u);
}

TEST(Hexch, DetectsLabelDependence) {
  auto sc = builtin("label-leak");
  auto shape = ProductShape::single(2, 8);
  auto opts = HexchOptions{};
  opts.seed = 3;
  auto report = hexch_test(scenario_source(sc, shape), shape, opts);
  EXPECT_TRUE(report.reject);
  EXPECT_LT(report.p_value, 0.01);
  auto j = report.to_json();
  for (const auto* key : {"test", "statistic", "p_value", "n_resamples", "level", "reject", "metadata"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Hexch, FixedPermutationsAreUsed) {
  auto sc = builtin("path-mean");
  auto shape = ProductShape::single(2, 4);
  auto opts = HexchOptions{};
  opts.n_reps = 20;
  opts.perms = {random_product_hperm(shape, 1), random_product_hperm(shape, 2)};
  auto report = hexch_test(scenario_source(sc, shape), shape, opts);
  EXPECT_EQ(report.metadata["fixed_perms"], 2);
}

TEST(ConditionalIid, ConstantArrayIsNotRejected) {
  auto x = sample_array(first_value_model(3), 2, 16, 4);
  auto h = extract_hierarchy(x);
  auto u = parent_pit(x, h, 1);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(u[i], UniformField(1, "pit")(leaves(2, 16)[i]));
  auto report = conditional_iid_test(x, h, {});
  EXPECT_FALSE(report.reject);
}

TEST(ConditionalIid, ShapeMismatch) {
  auto x = sample_array(last_value_model(3), 2, 4, 1);
  auto other = extract_hierarchy(sample_array(last_value_model(3), 2, 5, 1));
  EXPECT_THROW(conditional_iid_test(x, other, {}), InvalidArgument);
}

TEST(ConditionalIid, SerialDependenceDetected) {
  auto sc = builtin("markov-leak");
  auto x = scenario_source(sc, ProductShape::single(2, 16))(9);
  EXPECT_TRUE(conditional_iid_test(x, extract_hierarchy(x), {}).reject);
}

TEST(CondIndep, Preconditions) {
  auto x1 = sample_array(last_value_model(2), 1, 8, 1);
  EXPECT_THROW(cond_indep_test(x1, extract_hierarchy(x1), {}), InvalidArgument);
  auto m1 = sample_array(last_value_model(3), 2, 1, 1);
  EXPECT_THROW(cond_indep_test(m1, extract_hierarchy(m1), {}), InvalidArgument);
}

TEST(CondIndep, CoupledSiblingsDetected) {
  auto sc = builtin("sibling-coupled");
  auto x = scenario_source(sc, ProductShape::single(2, 32))(5);
  EXPECT_TRUE(cond_indep_test(x, extract_hierarchy(x), {}).reject);
}

TEST(LevelHomogeneity, Preconditions) {
  auto declared = IField::Levels{{{0}, DistSpec::uniform()}};
  EXPECT_THROW(level_homogeneity_test({{{0}, {0.3}}}, declared, 0.05, 1), InvalidArgument);
  EXPECT_THROW(level_homogeneity_test({{{0}, {0.3}}, {{1}, {0.2, 0.5}}}, declared, 0.05, 1), InvalidArgument);
}

TEST(LevelHomogeneity, UniformFieldPassesShiftedFails) {
  auto shape = ProductShape::single(2, 64);
  auto declared = IField::homogeneous(UniformField{0, "u"}, {2}, DistSpec::uniform()).levels();
  auto values = [&](const IField::Levels& levels) {
    auto f = IField{UniformField{3, "u"}, levels};
    auto out = std::map<std::vector<int>, std::vector<double>>{};
    for (const auto& v : product_truncation_vertices(shape)) out[v.depth_tuple()].push_back(f(v));
    return out;
  };
  EXPECT_FALSE(level_homogeneity_test(values(declared), declared, 0.05, 2).reject);
  auto shifted = declared;
  shifted.at({1}) = DistSpec::uniform(0.3, 1.0);
  EXPECT_TRUE(level_homogeneity_test(values(shifted), declared, 0.05, 2).reject);
}

}  // namespace
}  // namespace hexch
