#ifndef HEXCH_EXPERIMENT_HPP_
#define HEXCH_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexch/definetti.hpp"
#include "hexch/exch_tests.hpp"
#include "hexch/scenarios.hpp"

namespace hexch {

inline constexpr int exit_ok = 0;
inline constexpr int exit_verdict_mismatch = 1;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_cap_exceeded = 3;

struct TestConfig {
  std::string name;
  std::size_t n_reps = 50;
  std::size_t n_resamples = default_resamples;
  double level = default_level;
  std::size_t n_runs = 1;
  std::optional<Verdict> expect;
};

struct ExperimentConfig {
  std::string scenario;
  std::map<std::string, double> params;
  std::optional<std::vector<int>> depths;
  std::optional<std::vector<Coord>> shape;
  std::optional<Coord> replicas;
  std::uint64_t seed = 0;
  bool extract = false;
  std::optional<Coord> resynthesize_size;
  std::vector<TestConfig> tests;
  std::optional<std::string> out;

  auto to_json() const -> nlohmann::json;
};

// Throws ConfigError on unknown keys, wrong types or a missing seed.
auto parse_config(const nlohmann::json& j) -> ExperimentConfig;
auto load_config(const std::filesystem::path& path) -> ExperimentConfig;

struct TestSummary {
  std::string name;
  std::size_t n_runs = 0;
  std::size_t rejections = 0;
  double mean_p_value = 0.0;
  std::optional<Verdict> expected;
  bool met = true;
};

struct RunResult {
  int exit_code = exit_ok;
  std::vector<std::string> files;
  std::vector<TestSummary> summaries;
};

// Whether `rejections` out of `runs` matches the verdict. A single run must reject exactly
// when a violation is expected. Several null runs must fall in the two-sided 99.9% binomial
// band around `level`; several violation runs must reject at least 90% of the time.
auto verdict_met(Verdict expected, std::size_t rejections, std::size_t runs, double level) -> bool;

// Two-sided binomial band [lo, hi] holding at least 1 - alpha of Binomial(n, p).
auto binomial_band(std::size_t n, double p, double alpha) -> std::pair<std::size_t, std::size_t>;

// Leaves compared by the round-trip test: the first min(4, m) children of the first
// min(2, m) depth-(r-1) vertices.
auto roundtrip_marginal(int r, Coord m) -> std::vector<TreeVertex>;

// Energy test between the marginal of n_reps fresh arrays and of n_reps arrays resynthesized
// (at size fresh_size) from the hierarchies of n_reps other fresh arrays.
struct RoundtripOptions {
  std::size_t n_reps = 100;
  std::size_t n_resamples = default_resamples;
  double level = default_level;
  std::uint64_t seed = 0;
  Coord fresh_size = 0;
  QuantileConvention convention = QuantileConvention::left;
};

auto roundtrip_test(const ArraySource& source, int r, Coord m, const RoundtripOptions& options) -> TestReport;

// Runs the whole pipeline and writes its files into `out_dir`. Configuration problems throw
// ConfigError and oversized truncations throw CapExceeded; `run_config_file` maps both to
// exit codes.
auto run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) -> RunResult;

auto run_config_file(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_dir,
                     std::ostream& log) -> int;

// FNV-1a 64 of the bytes, as 16 lowercase hex digits.
auto checksum_hex(std::string_view bytes) -> std::string;

}  // namespace hexch

#endif  // HEXCH_EXPERIMENT_HPP_
