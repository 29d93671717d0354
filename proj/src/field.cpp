#include "hexch/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hexch/error.hpp"

namespace hexch {

UniformField::UniformField(std::uint64_t seed, std::string role) : seed_{seed}, role_{std::move(role)} {
  prefix_.put(role_);
  prefix_.put('\x1F');
}

auto UniformField::operator()(const TreeVertex& v) const -> double {
  auto h = prefix_;
  v.encode_to(h);
  return to_unit(keyed_mix(seed_, h.value()));
}

auto UniformField::operator()(const ProductVertex& v) const -> double {
  auto h = prefix_;
  v.encode_to(h);
  return to_unit(keyed_mix(seed_, h.value()));
}

auto UniformField::at_prefix(const TreeVertex& v, int depth) const -> double {
  auto h = prefix_;
  auto c = v.coords();
  h.put_decimal(static_cast<std::uint64_t>(depth));
  for (int k = 0; k < depth; ++k) {
    h.put('/');
    h.put_decimal(c[k]);
  }
  return to_unit(keyed_mix(seed_, h.value()));
}

auto UniformField::at_prefix(const ProductVertex& v, std::span<const int> depth_tuple) const -> double {
  auto h = prefix_;
  for (std::size_t i = 0; i < v.parts.size(); ++i) {
    if (i > 0) h.put(';');
    auto c = v.parts[i].coords();
    h.put_decimal(static_cast<std::uint64_t>(depth_tuple[i]));
    for (int k = 0; k < depth_tuple[i]; ++k) {
      h.put('/');
      h.put_decimal(c[k]);
    }
  }
  return to_unit(keyed_mix(seed_, h.value()));
}

auto field_value(const UniformField& f, const TreeVertex& v) -> double { return f(v); }
auto field_value(const UniformField& f, const ProductVertex& v) -> double { return f(v); }

DistSpec::DistSpec(Family family, std::vector<double> a, std::vector<double> b)
    : family_{family}, a_{std::move(a)}, b_{std::move(b)} {}

auto DistSpec::uniform(double lo, double hi) -> DistSpec {
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw InvalidArgument{"uniform needs 0 <= lo < hi <= 1"};
  return DistSpec{Family::uniform, {lo, hi}, {}};
}

auto DistSpec::point(double c) -> DistSpec {
  if (!(0.0 <= c && c <= 1.0)) throw InvalidArgument{"point mass must lie in [0,1]"};
  return DistSpec{Family::point, {c}, {}};
}

auto DistSpec::discrete(std::vector<double> atoms, std::vector<double> weights) -> DistSpec {
  if (atoms.empty() || atoms.size() != weights.size()) {
    throw InvalidArgument{"discrete spec needs matching nonempty atoms and weights"};
  }
  auto order = std::vector<std::size_t>(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return atoms[i] < atoms[j]; });
  auto a = std::vector<double>{};
  auto w = std::vector<double>{};
  auto total = 0.0;
  for (auto i : order) {
    if (!(0.0 <= atoms[i] && atoms[i] <= 1.0) || !(weights[i] > 0.0)) {
      throw InvalidArgument{"discrete atoms must lie in [0,1] with positive weights"};
    }
    if (!a.empty() && a.back() == atoms[i]) {
      w.back() += weights[i];
    } else {
      a.push_back(atoms[i]);
      w.push_back(weights[i]);
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument{"discrete weights must sum to 1"};
  return DistSpec{Family::discrete, std::move(a), std::move(w)};
}

auto DistSpec::power(double k) -> DistSpec {
  if (!(k > 0.0)) throw InvalidArgument{"power exponent must be positive"};
  return DistSpec{Family::power, {k}, {}};
}

auto DistSpec::quantile_table(std::vector<double> knots) -> DistSpec {
  if (knots.size() < 2) throw InvalidArgument{"quantile table needs at least two knots"};
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(0.0 <= knots[i] && knots[i] <= 1.0) || (i > 0 && knots[i] < knots[i - 1])) {
      throw InvalidArgument{"quantile table knots must be nondecreasing in [0,1]"};
    }
  }
  return DistSpec{Family::quantile_table, std::move(knots), {}};
}

auto DistSpec::family_name() const -> std::string {
  switch (family_) {
    case Family::uniform: return "uniform";
    case Family::point: return "point";
    case Family::discrete: return "discrete";
    case Family::power: return "power";
    case Family::quantile_table: return "quantile_table";
  }
  return "unknown";
}

auto DistSpec::quantile(double u) const -> double {
  u = std::clamp(u, 0.0, 1.0);
  switch (family_) {
    case Family::uniform: return a_[0] + (a_[1] - a_[0]) * u;
    case Family::point: return a_[0];
    case Family::discrete: {
      auto cum = 0.0;
      for (std::size_t i = 0; i < a_.size(); ++i) {
        cum += b_[i];
        if (cum >= u) return a_[i];
      }
      return a_.back();
    }
    case Family::power: return std::pow(u, a_[0]);
    case Family::quantile_table: {
      auto k = static_cast<double>(a_.size() - 1);
      auto pos = u * k;
      auto j = std::min(static_cast<std::size_t>(pos), a_.size() - 2);
      auto t = pos - static_cast<double>(j);
      return a_[j] + t * (a_[j + 1] - a_[j]);
    }
  }
  return 0.0;
}

auto DistSpec::cdf(double x) const -> double {
  switch (family_) {
    case Family::uniform: return std::clamp((x - a_[0]) / (a_[1] - a_[0]), 0.0, 1.0);
    case Family::point: return x >= a_[0] ? 1.0 : 0.0;
    case Family::discrete: {
      auto cum = 0.0;
      for (std::size_t i = 0; i < a_.size() && a_[i] <= x; ++i) cum += b_[i];
      return std::min(cum, 1.0);
    }
    case Family::power: return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : std::pow(x, 1.0 / a_[0]));
    case Family::quantile_table: {
      auto k = static_cast<double>(a_.size() - 1);
      if (x < a_.front()) return 0.0;
      if (x >= a_.back()) return 1.0;
      auto j = static_cast<std::size_t>(std::upper_bound(a_.begin(), a_.end(), x) - a_.begin()) - 1;
      return (static_cast<double>(j) + (x - a_[j]) / (a_[j + 1] - a_[j])) / k;
    }
  }
  return 0.0;
}

auto DistSpec::cdf_left(double x) const -> double {
  switch (family_) {
    case Family::uniform:
    case Family::power: return cdf(x);
    case Family::point: return x > a_[0] ? 1.0 : 0.0;
    case Family::discrete: {
      auto cum = 0.0;
      for (std::size_t i = 0; i < a_.size() && a_[i] < x; ++i) cum += b_[i];
      return std::min(cum, 1.0);
    }
    case Family::quantile_table: {
      auto k = static_cast<double>(a_.size() - 1);
      if (x <= a_.front()) return 0.0;
      if (x > a_.back()) return 1.0;
      auto j = static_cast<std::size_t>(std::lower_bound(a_.begin(), a_.end(), x) - a_.begin());
      return (static_cast<double>(j - 1) + (x - a_[j - 1]) / (a_[j] - a_[j - 1])) / k;
    }
  }
  return 0.0;
}

auto DistSpec::to_json() const -> nlohmann::json {
  auto j = nlohmann::json{{"family", family_name()}};
  switch (family_) {
    case Family::uniform: j["params"] = a_; break;
    case Family::point: j["params"] = a_; break;
    case Family::power: j["params"] = a_; break;
    case Family::discrete:
      j["atoms"] = a_;
      j["weights"] = b_;
      break;
    case Family::quantile_table: j["knots"] = a_; break;
  }
  return j;
}

auto DistSpec::from_json(const nlohmann::json& j) -> DistSpec {
  auto family = j.at("family").get<std::string>();
  auto params = [&] { return j.value("params", std::vector<double>{}); };
  if (family == "uniform") {
    auto p = params();
    if (p.empty()) return uniform();
    if (p.size() != 2) throw InvalidArgument{"uniform takes [lo, hi]"};
    return uniform(p[0], p[1]);
  }
  if (family == "point") {
    auto p = params();
    if (p.size() != 1) throw InvalidArgument{"point takes [c]"};
    return point(p[0]);
  }
  if (family == "power") {
    auto p = params();
    if (p.size() != 1) throw InvalidArgument{"power takes [k]"};
    return power(p[0]);
  }
  if (family == "discrete") {
    return discrete(j.at("atoms").get<std::vector<double>>(), j.at("weights").get<std::vector<double>>());
  }
  if (family == "quantile_table") return quantile_table(j.at("knots").get<std::vector<double>>());
  throw InvalidArgument{"unknown distribution family '" + family + "'"};
}

IField::IField(UniformField base, Levels levels) : base_{std::move(base)}, levels_{std::move(levels)} {}

auto IField::homogeneous(UniformField base, const std::vector<int>& depths, const DistSpec& spec) -> IField {
  auto levels = Levels{};
  auto total = std::size_t{1};
  for (auto r : depths) total *= static_cast<std::size_t>(r + 1);
  for (std::size_t idx = 0; idx < total; ++idx) {
    auto tuple = std::vector<int>{};
    auto rest = idx;
    for (auto r : depths) {
      tuple.push_back(static_cast<int>(rest % static_cast<std::size_t>(r + 1)));
      rest /= static_cast<std::size_t>(r + 1);
    }
    levels.emplace(std::move(tuple), spec);
  }
  return IField{std::move(base), std::move(levels)};
}

auto IField::level(const std::vector<int>& depth_tuple) const -> const DistSpec& {
  auto it = levels_.find(depth_tuple);
  if (it == levels_.end()) {
    auto text = std::string{};
    for (auto d : depth_tuple) text += (text.empty() ? "" : ",") + std::to_string(d);
    throw InvalidArgument{"I-field has no level spec for depth (" + text + ")"};
  }
  return it->second;
}

auto IField::operator()(const TreeVertex& v) const -> double { return level({v.depth()}).quantile(base_(v)); }

auto IField::operator()(const ProductVertex& v) const -> double {
  return level(v.depth_tuple()).quantile(base_(v));
}

auto IField::at_prefix(const ProductVertex& v, std::span<const int> depth_tuple) const -> double {
  return level(std::vector<int>(depth_tuple.begin(), depth_tuple.end())).quantile(base_.at_prefix(v, depth_tuple));
}

auto ifield_value(const IField& f, const TreeVertex& v) -> double { return f(v); }
auto ifield_value(const IField& f, const ProductVertex& v) -> double { return f(v); }

}  // namespace hexch
