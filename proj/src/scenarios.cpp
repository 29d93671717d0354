#include "hexch/scenarios.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "hexch/error.hpp"

namespace hexch {

namespace {

using Params = std::map<std::string, double>;

auto arity_of(const std::vector<int>& depths) -> std::size_t {
  auto n = std::size_t{1};
  for (auto r : depths) n *= static_cast<std::size_t>(r + 1);
  return n;
}

auto logistic(double z) -> double { return 1.0 / (1.0 + std::exp(-z)); }

auto centered_mean(std::span<const double> x) -> double {
  auto s = 0.0;
  for (auto v : x) s += 2.0 * v - 1.0;
  return s / static_cast<double>(x.size());
}

struct Entry {
  ScenarioSpec spec;
  std::function<Scenario(const std::vector<int>&, const Params&)> make;
};

auto with_spec(ScenarioSpec spec, const std::vector<int>& depths, const Params& params) -> ScenarioSpec {
  spec.depths = depths;
  spec.params = params;
  if (spec.sizes.size() != depths.size()) spec.sizes.assign(depths.size(), spec.sizes.empty() ? 8 : spec.sizes.front());
  return spec;
}

auto require_single_tree(const std::string& name, const std::vector<int>& depths, int min_depth) -> void {
  if (depths.size() != 1 || depths[0] < min_depth) {
    throw InvalidArgument{"scenario '" + name + "' needs a single tree of depth at least " + std::to_string(min_depth)};
  }
}

auto registry() -> const std::vector<Entry>& {
  static const auto entries = [] {
    auto out = std::vector<Entry>{};
    const auto null_tree = std::map<std::string, Verdict>{
        {"hexch", Verdict::null}, {"conditional_iid", Verdict::null}, {"cond_indep", Verdict::null}};

    out.push_back({{"uniform-leaf", ScenarioKind::tree, {2}, {8}, 0, {}, null_tree, "sigma = last path value"},
                   [](const std::vector<int>& d, const Params& p) {
                     auto sc = Scenario{};
                     sc.model = last_value_model(arity_of(d));
                     sc.model.name = "uniform-leaf";
                     sc.spec.params = p;
                     return sc;
                   }});

    out.push_back({{"root-constant", ScenarioKind::tree, {2}, {8}, 0, {}, null_tree, "sigma = root value"},
                   [](const std::vector<int>& d, const Params& p) {
                     auto sc = Scenario{};
                     sc.model = first_value_model(arity_of(d));
                     sc.model.name = "root-constant";
                     sc.spec.params = p;
                     return sc;
                   }});

    out.push_back({{"path-mean", ScenarioKind::tree, {2}, {8}, 0, {}, null_tree, "sigma = mean of path values"},
                   [](const std::vector<int>& d, const Params& p) {
                     auto sc = Scenario{};
                     sc.model = path_mean_model(arity_of(d));
                     sc.model.name = "path-mean";
                     sc.spec.params = p;
                     return sc;
                   }});

    auto product_expected = null_tree;
    product_expected["roundtrip"] = Verdict::null;
    out.push_back({{"product", ScenarioKind::tree, {2}, {8}, 0, {}, product_expected,
                    "sigma = product of the non-root path values"},
                   [](const std::vector<int>& d, const Params& p) {
                     auto sc = Scenario{};
                     sc.model = SigmaModel{"product", arity_of(d), p,
                                           [](std::span<const double> x, const LeafContext&) {
                                             auto prod = 1.0;
                                             for (std::size_t k = 1; k < x.size(); ++k) prod *= x[k];
                                             return x.size() == 1 ? x[0] : prod;
                                           }};
                     sc.spec.params = p;
                     return sc;
                   }});

    out.push_back({{"toy-magnetization", ScenarioKind::ah, {2}, {4}, 20, {{"a", 2.0}, {"b", 1.0}},
                    {{"hexch", Verdict::null}},
                    "X_{alpha,i} = logistic(a g(v path) + b g(v^i path)), g = mean of 2v - 1"},
                   [](const std::vector<int>& d, const Params& p) {
                     require_single_tree("toy-magnetization", d, 1);
                     auto a = p.at("a");
                     auto b = p.at("b");
                     auto half = static_cast<std::size_t>(d[0] + 1);
                     auto sc = Scenario{};
                     sc.model = SigmaModel{"toy-magnetization", 2 * half, p,
                                           [a, b, half](std::span<const double> x, const LeafContext&) {
                                             return logistic(a * centered_mean(x.first(half)) +
                                                             b * centered_mean(x.subspan(half)));
                                           }};
                     sc.spec.params = p;
                     return sc;
                   }});

    out.push_back({{"label-leak", ScenarioKind::tree, {2}, {8}, 0, {{"lambda", 0.5}},
                    {{"hexch", Verdict::violation}},
                    "X = (1 - lambda) v_leaf + lambda [first coordinate odd]"},
                   [](const std::vector<int>& d, const Params& p) {
                     require_single_tree("label-leak", d, 1);
                     auto lambda = p.at("lambda");
                     auto sc = Scenario{};
                     sc.model = SigmaModel{"label-leak", arity_of(d), p,
                                           [lambda](std::span<const double> x, const LeafContext& ctx) {
                                             auto odd = ctx.leaf.parts[0][0] % 2 == 1 ? 1.0 : 0.0;
                                             return (1.0 - lambda) * x.back() + lambda * odd;
                                           },
                                           true};
                     sc.spec.params = p;
                     return sc;
                   }});

    out.push_back({{"sibling-coupled", ScenarioKind::tree, {2}, {32}, 0, {{"coupling", 0.7}},
                    {{"cond_indep", Verdict::violation}},
                    "parents 2j-1 and 2j share an extra uniform per child index: X = (1 - c) v_leaf + c w"},
                   [](const std::vector<int>& d, const Params& p) {
                     require_single_tree("sibling-coupled", d, 2);
                     auto c = p.at("coupling");
                     auto sc = Scenario{};
                     sc.model = SigmaModel{"sibling-coupled", arity_of(d), p,
                                           [c](std::span<const double> x, const LeafContext& ctx) {
                                             const auto& leaf = ctx.leaf.parts[0];
                                             auto coords = std::vector<Coord>(leaf.coords().begin(), leaf.coords().end());
                                             auto& k = coords[coords.size() - 2];
                                             k = (k + 1) / 2;
                                             auto w = UniformField{ctx.seed, "coupled"}(TreeVertex{leaf.tree_depth(), coords});
                                             return (1.0 - c) * x.back() + c * w;
                                           },
                                           true};
                     sc.spec.params = p;
                     return sc;
                   }});

    out.push_back({{"markov-leak", ScenarioKind::tree, {2}, {16}, 0, {{"rho", 0.8}},
                    {{"conditional_iid", Verdict::violation}},
                    "X_{alpha n} = rho X_{alpha (n-1)} + (1 - rho) v_{alpha n}, X_{alpha 1} = v_{alpha 1}"},
                   [](const std::vector<int>& d, const Params& p) {
                     require_single_tree("markov-leak", d, 1);
                     auto rho = p.at("rho");
                     if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument{"markov-leak needs 0 <= rho < 1"};
                     auto sc = Scenario{};
                     sc.model = SigmaModel{"markov-leak", arity_of(d), p,
                                           [rho](std::span<const double>, const LeafContext& ctx) {
                                             const auto& leaf = ctx.leaf.parts[0];
                                             auto v = UniformField{ctx.seed, "v"};
                                             auto n = leaf.coords().back();
                                             auto parent = leaf.parent();
                                             // Unrolled recursion; weights below 1e-17 are dropped.
                                             auto x = 0.0;
                                             auto weight = 1.0;
                                             for (auto j = n; j >= 1 && weight > 1e-17; --j) {
                                               auto vj = v(parent.child(j));
                                               x += (j == 1 ? weight : weight * (1.0 - rho)) * vj;
                                               weight *= rho;
                                             }
                                             return std::clamp(x, 0.0, 1.0);
                                           },
                                           true};
                     sc.spec.params = p;
                     return sc;
                   }});

    auto ifield_scenario = [](std::string name, const std::vector<int>& d, const Params& p, double shift) {
      auto sc = Scenario{};
      sc.model = path_mean_model(2 * arity_of(d));
      sc.model.name = name + "/tau";
      sc.declared = IField::homogeneous(UniformField{0, "u"}, d, DistSpec::uniform()).levels();
      sc.actual = sc.declared;
      if (shift > 0.0) {
        for (auto& [tuple, spec] : sc.actual) {
          if (std::accumulate(tuple.begin(), tuple.end(), 0) == 1) spec = DistSpec::uniform(shift, 1.0);
        }
      }
      sc.spec.params = p;
      return sc;
    };

    out.push_back({{"depth-shift", ScenarioKind::ifield, {2}, {64}, 0, {{"shift", 0.3}},
                    {{"level_homogeneity", Verdict::violation}},
                    "I-field declared uniform whose depth-1 values are Uniform[shift, 1]"},
                   [ifield_scenario](const std::vector<int>& d, const Params& p) {
                     auto shift = p.at("shift");
                     if (!(shift > 0.0 && shift < 1.0)) throw InvalidArgument{"depth-shift needs 0 < shift < 1"};
                     return ifield_scenario("depth-shift", d, p, shift);
                   }});

    out.push_back({{"uniform-ifield", ScenarioKind::ifield, {2}, {64}, 0, {}, {{"level_homogeneity", Verdict::null}},
                    "I-field uniform at every depth"},
                   [ifield_scenario](const std::vector<int>& d, const Params& p) {
                     return ifield_scenario("uniform-ifield", d, p, 0.0);
                   }});
    return out;
  }();
  return entries;
}

auto find_entry(const std::string& name) -> const Entry& {
  for (const auto& e : registry()) {
    if (e.spec.name == name) return e;
  }
  throw InvalidArgument{"unknown scenario '" + name + "'"};
}

}  // namespace

auto verdict_name(Verdict v) -> std::string { return v == Verdict::null ? "null" : "violation"; }

auto parse_verdict(const std::string& text) -> Verdict {
  if (text == "null") return Verdict::null;
  if (text == "violation") return Verdict::violation;
  throw InvalidArgument{"verdict must be 'null' or 'violation', got '" + text + "'"};
}

auto kind_name(ScenarioKind k) -> std::string {
  switch (k) {
    case ScenarioKind::tree: return "tree";
    case ScenarioKind::ah: return "ah";
    case ScenarioKind::ifield: return "ifield";
  }
  return "unknown";
}

auto ScenarioSpec::to_json() const -> nlohmann::json {
  auto verdicts = nlohmann::json::object();
  for (const auto& [test, v] : expected) verdicts[test] = verdict_name(v);
  auto j = nlohmann::json{{"name", name},        {"kind", kind_name(kind)}, {"depths", depths},
                          {"shape", sizes},       {"params", params},        {"expected", verdicts},
                          {"description", description}};
  if (kind == ScenarioKind::ah) j["replicas"] = replicas;
  return j;
}

auto builtin(const std::string& name) -> Scenario { return builtin(name, find_entry(name).spec.depths); }

auto builtin(const std::string& name, const std::vector<int>& depths, const std::map<std::string, double>& overrides)
    -> Scenario {
  const auto& entry = find_entry(name);
  if (depths.empty()) throw InvalidArgument{"scenario depths must be nonempty"};
  for (auto r : depths) {
    if (r < 1) throw InvalidArgument{"tree depth must be at least 1"};
  }
  auto params = entry.spec.params;
  for (const auto& [key, value] : overrides) {
    if (!params.contains(key)) throw InvalidArgument{"scenario '" + name + "' has no parameter '" + key + "'"};
    params[key] = value;
  }
  auto sc = entry.make(depths, params);
  sc.spec = with_spec(entry.spec, depths, params);
  return sc;
}

auto list_scenarios() -> std::vector<ScenarioSpec> {
  auto out = std::vector<ScenarioSpec>{};
  for (const auto& e : registry()) out.push_back(e.spec);
  return out;
}

auto sampled_shape(const Scenario& s, const std::vector<Coord>& sizes, Coord replicas) -> ProductShape {
  if (s.spec.kind == ScenarioKind::ah) {
    if (sizes.size() != 1) throw InvalidArgument{"ah scenarios take one tree size"};
    return ProductShape{{s.spec.depths[0], 1}, {sizes[0], replicas}};
  }
  return ProductShape{s.spec.depths, sizes};
}

auto scenario_source(const Scenario& s, const ProductShape& shape) -> ArraySource {
  switch (s.spec.kind) {
    case ScenarioKind::tree:
      return [model = s.model, shape](std::uint64_t seed) { return sample_multi(model, shape, seed); };
    case ScenarioKind::ah:
      return [model = s.model, shape](std::uint64_t seed) {
        return sample_ah(model, shape.depths[0], shape.sizes[0], shape.sizes[1], seed);
      };
    case ScenarioKind::ifield:
      return [model = s.model, actual = s.actual, shape](std::uint64_t seed) {
        auto u = IField{UniformField{derive_seed(seed, "ifield"), "u"}, actual};
        return sample_conditional(model, u, shape, seed).x;
      };
  }
  throw InvalidArgument{"unknown scenario kind"};
}

auto path_mean_model(std::size_t arity) -> SigmaModel {
  return {"path-mean", arity, {}, [](std::span<const double> x, const LeafContext&) {
            return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
          }};
}

auto last_value_model(std::size_t arity) -> SigmaModel {
  return {"last-value", arity, {}, [](std::span<const double> x, const LeafContext&) { return x.back(); }};
}

auto first_value_model(std::size_t arity) -> SigmaModel {
  return {"first-value", arity, {}, [](std::span<const double> x, const LeafContext&) { return x.front(); }};
}

}  // namespace hexch
