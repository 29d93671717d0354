#include "hexch/experiment.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "hexch/error.hpp"
#include "hexch/parallel.hpp"
#include "hexch/random.hpp"
#include "hexch/sampler.hpp"

namespace hexch {

namespace {

const auto config_keys = std::set<std::string>{"scenario", "params", "depths", "shape",  "replicas", "seed",
                                               "extract",  "resynthesize_size", "tests", "out"};
const auto test_keys = std::set<std::string>{"name", "n_reps", "n_resamples", "level", "n_runs", "expect"};
const auto test_names = std::set<std::string>{"hexch", "conditional_iid", "cond_indep", "level_homogeneity",
                                              "roundtrip"};

auto check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) -> void {
  if (!j.is_object()) throw ConfigError{where + " must be a JSON object"};
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError{"unknown key '" + key + "' in " + where};
  }
}

template <class T>
auto get_unsigned(const nlohmann::json& j, const std::string& key) -> T {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) throw ConfigError{"'" + key + "' must be a non-negative integer"};
  return v.get<T>();
}

auto get_int_list(const nlohmann::json& j, const std::string& key) -> std::vector<long long> {
  const auto& v = j.at(key);
  auto out = std::vector<long long>{};
  auto take = [&](const nlohmann::json& e) {
    if (!e.is_number_integer()) throw ConfigError{"'" + key + "' must hold integers"};
    out.push_back(e.get<long long>());
  };
  if (v.is_array()) {
    for (const auto& e : v) take(e);
  } else {
    take(v);
  }
  if (out.empty()) throw ConfigError{"'" + key + "' must not be empty"};
  return out;
}

auto parse_test(const nlohmann::json& j) -> TestConfig {
  check_keys(j, test_keys, "test entry");
  auto t = TestConfig{};
  if (!j.contains("name") || !j["name"].is_string()) throw ConfigError{"test entry needs a string 'name'"};
  t.name = j["name"].get<std::string>();
  if (!test_names.contains(t.name)) throw ConfigError{"unknown test '" + t.name + "'"};
  if (j.contains("n_reps")) t.n_reps = get_unsigned<std::size_t>(j, "n_reps");
  if (j.contains("n_resamples")) t.n_resamples = get_unsigned<std::size_t>(j, "n_resamples");
  if (j.contains("n_runs")) t.n_runs = get_unsigned<std::size_t>(j, "n_runs");
  if (j.contains("level")) {
    if (!j["level"].is_number()) throw ConfigError{"'level' must be a number"};
    t.level = j["level"].get<double>();
  }
  if (j.contains("expect")) {
    if (!j["expect"].is_string()) throw ConfigError{"'expect' must be \"null\" or \"violation\""};
    try {
      t.expect = parse_verdict(j["expect"].get<std::string>());
    } catch (const InvalidArgument& e) {
      throw ConfigError{e.what()};
    }
  }
  if (t.n_runs < 1) throw ConfigError{"'n_runs' must be at least 1"};
  if (t.n_resamples < 1) throw ConfigError{"'n_resamples' must be at least 1"};
  if (!(t.level > 0.0 && t.level < 1.0)) throw ConfigError{"'level' must lie in (0, 1)"};
  return t;
}

auto write_file(const std::filesystem::path& dir, const std::string& name, const std::string& bytes,
                std::map<std::string, std::string>& written) -> void {
  auto out = std::ofstream{dir / name, std::ios::binary};
  if (!out) throw Error{"cannot write " + (dir / name).string()};
  out << bytes;
  written[name] = bytes;
}

auto array_csv(const LeafArray& x, ScenarioKind kind) -> std::string {
  auto os = std::ostringstream{};
  auto columns = std::vector<std::string>{};
  if (kind == ScenarioKind::ah) {
    columns = {"vertex", "i"};
  } else if (x.shape.trees() == 1) {
    columns = {"vertex"};
  } else {
    for (std::size_t i = 0; i < x.shape.trees(); ++i) columns.push_back("vertex" + std::to_string(i + 1));
  }
  write_csv(os, x, columns, {"value"}, kind == ScenarioKind::ah);
  return os.str();
}

auto u_values_csv(const ConditionalSample& s) -> std::string {
  auto os = std::ostringstream{};
  os << "vertex,depth,u\n";
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    auto tuple = s.vertices[i].depth_tuple();
    auto depth = std::string{};
    for (std::size_t k = 0; k < tuple.size(); ++k) depth += (k ? ";" : "") + std::to_string(tuple[k]);
    os << s.vertices[i].encode() << ',' << depth << ',' << format_value(s.u_values[i]) << '\n';
  }
  return os.str();
}

// Pipeline state for one run of the tests: the array and what is derived from it.
struct RunData {
  std::uint64_t seed = 0;
  LeafArray x;
  std::optional<ConditionalSample> conditional;
};

struct Pipeline {
  const ExperimentConfig& config;
  Scenario scenario;
  ProductShape shape;
  ArraySource source;

  auto ifield_for(std::uint64_t seed) const -> IField {
    return IField{UniformField{derive_seed(seed, "ifield"), "u"}, scenario.actual};
  }

  auto make_run(std::uint64_t seed) const -> RunData {
    auto d = RunData{};
    d.seed = seed;
    if (scenario.spec.kind == ScenarioKind::ifield) {
      d.conditional = sample_conditional(scenario.model, ifield_for(seed), shape, seed);
      d.x = d.conditional->x;
    } else {
      d.x = source(seed);
    }
    return d;
  }

  auto single_tree() const -> bool { return scenario.spec.kind != ScenarioKind::ah && shape.trees() == 1; }

  auto require_single_tree(const std::string& what) const -> void {
    if (!single_tree()) throw ConfigError{what + " needs a single-tree scenario"};
  }

  auto run_test(const TestConfig& t, const RunData& d, std::size_t run) const -> TestReport {
    auto test_seed = derive_seed(d.seed, "test:" + t.name, run);
    if (t.name == "hexch") {
      auto opts = HexchOptions{};
      opts.n_reps = t.n_reps;
      opts.n_resamples = t.n_resamples;
      opts.level = t.level;
      opts.seed = test_seed;
      opts.subset_seed = config.seed;
      return hexch_test(source, shape, opts);
    }
    if (t.name == "conditional_iid" || t.name == "cond_indep") {
      require_single_tree(t.name);
      auto h = extract_hierarchy(d.x);
      auto opts = ArrayTestOptions{t.n_resamples, t.level, test_seed};
      return t.name == "conditional_iid" ? conditional_iid_test(d.x, h, opts) : cond_indep_test(d.x, h, opts);
    }
    if (t.name == "level_homogeneity") {
      if (!d.conditional) throw ConfigError{"level_homogeneity needs an ifield scenario"};
      return level_homogeneity_test(group_by_depth(*d.conditional), scenario.declared, t.level, test_seed);
    }
    require_single_tree("roundtrip");
    auto opts = RoundtripOptions{};
    opts.n_reps = t.n_reps;
    opts.n_resamples = t.n_resamples;
    opts.level = t.level;
    opts.seed = test_seed;
    opts.fresh_size = config.resynthesize_size.value_or(shape.sizes[0]);
    return roundtrip_test(source, shape.depths[0], shape.sizes[0], opts);
  }
};

auto summary_csv(const std::vector<TestSummary>& rows) -> std::string {
  auto os = std::ostringstream{};
  os << "test,n_runs,rejections,rejection_rate,mean_p_value,expected,met\n";
  for (const auto& s : rows) {
    os << s.name << ',' << s.n_runs << ',' << s.rejections << ','
       << format_shortest(static_cast<double>(s.rejections) / static_cast<double>(s.n_runs)) << ','
       << format_shortest(s.mean_p_value) << ',' << (s.expected ? verdict_name(*s.expected) : "none") << ','
       << (s.met ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace

auto ExperimentConfig::to_json() const -> nlohmann::json {
  auto j = nlohmann::json{{"scenario", scenario}, {"params", params}, {"seed", seed}, {"extract", extract}};
  if (depths) j["depths"] = *depths;
  if (shape) j["shape"] = *shape;
  if (replicas) j["replicas"] = *replicas;
  if (resynthesize_size) j["resynthesize_size"] = *resynthesize_size;
  auto tj = nlohmann::json::array();
  for (const auto& t : tests) {
    auto e = nlohmann::json{{"name", t.name},   {"n_reps", t.n_reps}, {"n_resamples", t.n_resamples},
                            {"level", t.level}, {"n_runs", t.n_runs}};
    if (t.expect) e["expect"] = verdict_name(*t.expect);
    tj.push_back(e);
  }
  j["tests"] = tj;
  return j;
}

auto parse_config(const nlohmann::json& j) -> ExperimentConfig {
  check_keys(j, config_keys, "config");
  auto c = ExperimentConfig{};
  try {
    if (!j.contains("scenario") || !j["scenario"].is_string()) throw ConfigError{"config needs a string 'scenario'"};
    c.scenario = j["scenario"].get<std::string>();
    if (!j.contains("seed")) throw ConfigError{"config needs an explicit 'seed'"};
    c.seed = get_unsigned<std::uint64_t>(j, "seed");
    if (j.contains("params")) {
      if (!j["params"].is_object()) throw ConfigError{"'params' must be an object"};
      for (const auto& [key, value] : j["params"].items()) {
        if (!value.is_number()) throw ConfigError{"parameter '" + key + "' must be a number"};
        c.params[key] = value.get<double>();
      }
    }
    if (j.contains("depths")) {
      auto d = std::vector<int>{};
      for (auto v : get_int_list(j, "depths")) {
        if (v < 1 || v > 64) throw ConfigError{"tree depths must lie in 1..64"};
        d.push_back(static_cast<int>(v));
      }
      c.depths = d;
    }
    if (j.contains("shape")) {
      auto s = std::vector<Coord>{};
      for (auto v : get_int_list(j, "shape")) {
        if (v < 1 || v > 0xFFFFFFFFLL) throw ConfigError{"truncation sizes must be positive 32-bit integers"};
        s.push_back(static_cast<Coord>(v));
      }
      c.shape = s;
    }
    if (j.contains("replicas")) c.replicas = get_unsigned<Coord>(j, "replicas");
    if (j.contains("extract")) {
      if (!j["extract"].is_boolean()) throw ConfigError{"'extract' must be a boolean"};
      c.extract = j["extract"].get<bool>();
    }
    if (j.contains("resynthesize_size")) {
      c.resynthesize_size = get_unsigned<Coord>(j, "resynthesize_size");
      if (*c.resynthesize_size < 1) throw ConfigError{"'resynthesize_size' must be at least 1"};
    }
    if (j.contains("tests")) {
      if (!j["tests"].is_array()) throw ConfigError{"'tests' must be an array"};
      for (const auto& t : j["tests"]) c.tests.push_back(parse_test(t));
    }
    if (j.contains("out")) {
      if (!j["out"].is_string()) throw ConfigError{"'out' must be a string"};
      c.out = j["out"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError{std::string{"malformed config: "} + e.what()};
  }
  return c;
}

auto load_config(const std::filesystem::path& path) -> ExperimentConfig {
  auto in = std::ifstream{path};
  if (!in) throw ConfigError{"cannot read config " + path.string()};
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError{"config " + path.string() + " is not valid JSON"};
  return parse_config(j);
}

auto binomial_band(std::size_t n, double p, double alpha) -> std::pair<std::size_t, std::size_t> {
  auto cdf = 0.0;
  auto lo = n;
  auto hi = n;
  auto found_lo = false;
  for (std::size_t k = 0; k <= n; ++k) {
    auto log_pmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                   static_cast<double>(k) * std::log(p) + static_cast<double>(n - k) * std::log1p(-p);
    cdf += std::exp(log_pmf);
    if (!found_lo && cdf > alpha / 2.0) {
      lo = k;
      found_lo = true;
    }
    if (cdf >= 1.0 - alpha / 2.0) {
      hi = k;
      break;
    }
  }
  return {lo, hi};
}

auto verdict_met(Verdict expected, std::size_t rejections, std::size_t runs, double level) -> bool {
  if (runs == 1) return (rejections == 1) == (expected == Verdict::violation);
  if (expected == Verdict::violation) return 10 * rejections >= 9 * runs;
  auto [lo, hi] = binomial_band(runs, level, 0.001);
  return rejections >= lo && rejections <= hi;
}

auto roundtrip_marginal(int r, Coord m) -> std::vector<TreeVertex> {
  auto out = std::vector<TreeVertex>{};
  auto prefix = std::vector<Coord>(static_cast<std::size_t>(r - 1), 1);
  for (Coord p = 1; p <= std::min<Coord>(2, m); ++p) {
    if (r > 1) prefix.back() = p;
    for (Coord n = 1; n <= std::min<Coord>(4, m); ++n) {
      auto coords = prefix;
      coords.push_back(n);
      out.emplace_back(r, coords);
    }
    if (r == 1) break;
  }
  return out;
}

auto roundtrip_test(const ArraySource& source, int r, Coord m, const RoundtripOptions& options) -> TestReport {
  if (options.n_reps < 2) throw InvalidArgument{"roundtrip needs at least 2 replicates"};
  auto fresh = options.fresh_size == 0 ? m : options.fresh_size;
  auto marginal = roundtrip_marginal(r, std::min(m, fresh));
  auto take = [&](const LeafArray& x) {
    auto row = std::vector<double>{};
    for (const auto& v : marginal) row.push_back(x.at(v));
    return row;
  };
  auto original = Sample(options.n_reps);
  auto synthetic = Sample(options.n_reps);
  parallel_for(options.n_reps, [&](std::size_t j) {
    original[j] = take(source(derive_seed(options.seed, "roundtrip-original", j)));
    auto h = extract_hierarchy(source(derive_seed(options.seed, "roundtrip-source", j)));
    synthetic[j] = take(resynthesize(h, r, fresh, derive_seed(options.seed, "roundtrip-w", j), options.convention));
  });
  auto report = energy_two_sample_test(original, synthetic, options.n_resamples, options.level,
                                       derive_seed(options.seed, "roundtrip-energy", 0));
  report.name = "roundtrip";
  report.metadata["n_reps"] = options.n_reps;
  report.metadata["marginal_size"] = marginal.size();
  report.metadata["fresh_size"] = fresh;
  report.metadata["convention"] = options.convention == QuantileConvention::left ? "left" : "right";
  return report;
}

auto checksum_hex(std::string_view bytes) -> std::string {
  auto h = Fnv1a{};
  h.put(bytes);
  auto os = std::ostringstream{};
  os << std::hex << std::setw(16) << std::setfill('0') << h.value();
  return os.str();
}

auto run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) -> RunResult {
  auto scenario = Scenario{};
  try {
    scenario = config.depths ? builtin(config.scenario, *config.depths, config.params)
                             : builtin(config.scenario, builtin(config.scenario).spec.depths, config.params);
  } catch (const InvalidArgument& e) {
    throw ConfigError{e.what()};
  }
  auto sizes = config.shape.value_or(scenario.spec.sizes);
  if (sizes.size() == 1 && scenario.spec.depths.size() > 1) sizes.assign(scenario.spec.depths.size(), sizes[0]);
  if (sizes.size() != scenario.spec.depths.size()) throw ConfigError{"'shape' must give one size per tree"};
  auto replicas = config.replicas.value_or(scenario.spec.replicas);
  if (scenario.spec.kind == ScenarioKind::ah && replicas < 1) throw ConfigError{"'replicas' must be at least 1"};
  if (scenario.spec.kind != ScenarioKind::ah && config.replicas) {
    throw ConfigError{"'replicas' applies only to ah scenarios"};
  }
  auto shape = ProductShape{};
  try {
    shape = sampled_shape(scenario, sizes, replicas);
  } catch (const InvalidArgument& e) {
    throw ConfigError{e.what()};
  }
  shape.validate();
  if (config.resynthesize_size) checked_leaf_count(shape.depths[0], *config.resynthesize_size);

  auto pipeline = Pipeline{config, scenario, shape, scenario_source(scenario, shape)};
  if ((config.extract || config.resynthesize_size) && !pipeline.single_tree()) {
    throw ConfigError{"extraction and resynthesis need a single-tree scenario"};
  }
  for (const auto& t : config.tests) {
    if ((t.name == "conditional_iid" || t.name == "cond_indep" || t.name == "roundtrip") && !pipeline.single_tree()) {
      throw ConfigError{t.name + " needs a single-tree scenario"};
    }
    if (t.name == "cond_indep" && (shape.depths[0] < 2 || shape.sizes[0] < 2)) {
      throw ConfigError{"cond_indep needs r >= 2 and m >= 2"};
    }
    if (t.name == "level_homogeneity" && scenario.spec.kind != ScenarioKind::ifield) {
      throw ConfigError{"level_homogeneity needs an ifield scenario"};
    }
    if (t.name == "hexch" && t.n_reps < 20) throw ConfigError{"hexch needs n_reps >= 20"};
  }

  std::filesystem::create_directories(out_dir);
  auto written = std::map<std::string, std::string>{};
  auto result = RunResult{};

  auto main_run = pipeline.make_run(config.seed);
  write_file(out_dir, "array.csv", array_csv(main_run.x, scenario.spec.kind), written);
  if (main_run.conditional) write_file(out_dir, "u_values.csv", u_values_csv(*main_run.conditional), written);
  if (config.extract || config.resynthesize_size) {
    auto h = extract_hierarchy(main_run.x);
    if (config.extract) write_file(out_dir, "hierarchy.json", h.to_json().dump(2) + "\n", written);
    if (config.resynthesize_size) {
      auto y = resynthesize(h, shape.depths[0], *config.resynthesize_size, derive_seed(config.seed, "resynthesize"));
      write_file(out_dir, "resynth.csv", array_csv(y, scenario.spec.kind), written);
    }
  }

  auto report_lines = std::ostringstream{};
  for (std::size_t ti = 0; ti < config.tests.size(); ++ti) {
    const auto& t = config.tests[ti];
    auto summary = TestSummary{};
    summary.name = t.name;
    summary.n_runs = t.n_runs;
    summary.expected = t.expect;
    if (!summary.expected) {
      auto it = scenario.spec.expected.find(t.name);
      if (it != scenario.spec.expected.end()) summary.expected = it->second;
    }
    auto p_sum = 0.0;
    for (std::size_t run = 0; run < t.n_runs; ++run) {
      auto data = run == 0 ? main_run : pipeline.make_run(derive_seed(config.seed, "run", run));
      auto report = pipeline.run_test(t, data, run);
      if (report.reject) ++summary.rejections;
      p_sum += report.p_value;
      auto line = report.to_json();
      line["test_index"] = ti;
      line["run"] = run;
      line["scenario"] = scenario.spec.name;
      report_lines << line.dump() << '\n';
    }
    summary.mean_p_value = p_sum / static_cast<double>(t.n_runs);
    if (summary.expected) summary.met = verdict_met(*summary.expected, summary.rejections, t.n_runs, t.level);
    if (!summary.met) result.exit_code = exit_verdict_mismatch;
    result.summaries.push_back(summary);
  }
  write_file(out_dir, "report.jsonl", report_lines.str(), written);
  write_file(out_dir, "summary.csv", summary_csv(result.summaries), written);

  auto files = nlohmann::json::object();
  for (const auto& [name, bytes] : written) {
    files[name] = {{"fnv1a64", checksum_hex(bytes)}, {"bytes", bytes.size()}};
  }
  auto manifest = nlohmann::json{{"config", config.to_json()},
                                 {"scenario", scenario.spec.to_json()},
                                 {"sampled_shape", {{"depths", shape.depths}, {"sizes", shape.sizes}}},
                                 {"files", files},
                                 {"exit_code", result.exit_code}};
  auto hexch_opts = HexchOptions{};
  hexch_opts.subset_seed = config.seed;
  manifest["hexch_marginal"] = hexch_marginal(shape, hexch_opts);
  write_file(out_dir, "manifest.json", manifest.dump(2) + "\n", written);

  for (const auto& [name, bytes] : written) result.files.push_back(name);
  return result;
}

auto run_config_file(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_dir,
                     std::ostream& log) -> int {
  try {
    auto config = load_config(config_path);
    auto dir = out_dir ? *out_dir : std::filesystem::path{config.out.value_or("out")};
    auto result = run_experiment(config, dir);
    for (const auto& s : result.summaries) {
      log << s.name << ": " << s.rejections << "/" << s.n_runs << " rejected, expected "
          << (s.expected ? verdict_name(*s.expected) : "none") << (s.met ? " [met]" : " [MISMATCH]") << '\n';
    }
    log << "wrote " << result.files.size() << " files to " << dir.string() << '\n';
    return result.exit_code;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const CapExceeded& e) {
    log << "cap exceeded: " << e.what() << '\n';
    return exit_cap_exceeded;
  }
}

}  // namespace hexch
