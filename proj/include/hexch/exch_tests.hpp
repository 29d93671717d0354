#ifndef HEXCH_EXCH_TESTS_HPP_
#define HEXCH_EXCH_TESTS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexch/array.hpp"
#include "hexch/definetti.hpp"
#include "hexch/field.hpp"
#include "hexch/hperm.hpp"

namespace hexch {

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_resamples = 0;
  double level = 0.05;
  bool reject = false;
  nlohmann::json metadata = nlohmann::json::object();

  auto to_json() const -> nlohmann::json;
};

inline constexpr std::size_t default_resamples = 199;
inline constexpr double default_level = 0.05;

using Sample = std::vector<std::vector<double>>;

// 2 mean|a-b| - mean|a-a'| - mean|b-b'| over all ordered pairs (the V-statistic), Euclidean norm.
auto energy_distance(const Sample& a, const Sample& b) -> double;

struct PermutationResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Permutation p-value (1 + #{T_b >= T}) / (1 + B) for the energy distance. Resample b draws
// its relabeling from its own stream, so the result does not depend on the thread count.
auto energy_permutation_test(const Sample& a, const Sample& b, std::size_t n_resamples, std::uint64_t seed)
    -> PermutationResult;

auto energy_two_sample_test(const Sample& a, const Sample& b, std::size_t n_resamples, double level,
                            std::uint64_t seed) -> TestReport;

// Kolmogorov-Smirnov helpers; p-values use the asymptotic law with Stephens' small-sample correction.
auto ks_statistic_uniform(std::span<const double> values) -> double;
auto ks_statistic_two_sample(std::span<const double> a, std::span<const double> b) -> double;
auto kolmogorov_pvalue(double statistic, double effective_n) -> double;
// D at which the one-sample p-value equals alpha, for n points.
auto ks_critical_value(double alpha, std::size_t n) -> double;

using ArraySource = std::function<LeafArray(std::uint64_t seed)>;

struct HexchOptions {
  std::size_t n_reps = 50;
  std::size_t n_resamples = default_resamples;
  double level = default_level;
  std::uint64_t seed = 0;
  // Picks the fixed leaf subset when the marginal has to be capped.
  std::uint64_t subset_seed = 0;
  // All leaves are used when every tree has r <= 3 and m <= 8; otherwise this many
  // leaves are drawn once from subset_seed.
  std::size_t max_subset = 64;
  // Fixed permutations cycled across replicates; empty draws a fresh one per replicate.
  std::vector<ProductHPerm> perms;
};

// Energy-distance permutation test between replicates of (X_alpha) and replicates of
// (X_{pi(alpha)}). Every channel of the array is permuted together.
auto hexch_test(const ArraySource& source, const ProductShape& shape, const HexchOptions& options) -> TestReport;

// Leaves retained by hexch_test for the given shape and options.
auto hexch_marginal(const ProductShape& shape, const HexchOptions& options) -> std::vector<std::size_t>;

struct ArrayTestOptions {
  std::size_t n_resamples = default_resamples;
  double level = default_level;
  std::uint64_t seed = 0;
  std::size_t pair_budget = 64;
};

// Randomized PIT of every leaf through its parent's level-0 measure, leaf order.
auto parent_pit(const LeafArray& x, const DirectingHierarchy& h, std::uint64_t seed) -> std::vector<double>;

// Pooled PIT uniformity (KS) and within-parent lag-1 autocorrelation (permutation), combined
// by Bonferroni.
auto conditional_iid_test(const LeafArray& x, const DirectingHierarchy& h, const ArrayTestOptions& options)
    -> TestReport;

// Max |correlation| of PIT values between lexicographically adjacent parents, children
// paired by index; permutation null shuffles children within each parent.
auto cond_indep_test(const LeafArray& x, const DirectingHierarchy& h, const ArrayTestOptions& options)
    -> TestReport;

// Per-depth KS against the declared spec plus two-sample KS between depth classes whose specs
// coincide, all on randomized PIT values, combined by Bonferroni.
auto level_homogeneity_test(const std::map<std::vector<int>, std::vector<double>>& values_by_depth,
                            const IField::Levels& declared, double level, std::uint64_t seed) -> TestReport;

}  // namespace hexch

#endif  // HEXCH_EXCH_TESTS_HPP_
