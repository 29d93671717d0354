#include "hexch/definetti.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hexch/error.hpp"
#include "hexch/field.hpp"
#include "hexch/parallel.hpp"
#include "hexch/transport.hpp"

namespace hexch {

namespace {

constexpr auto quantile_slack = 1e-12;

auto check_weight_sum(std::span<const double> weights) -> void {
  auto total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument{"measure weights must sum to 1"};
}

// Integral over [0, len] of |c - g(t)| with g linear from g0 to g1.
auto abs_gap_integral(double c, double g0, double g1, double len) -> double {
  auto d0 = c - g0;
  auto d1 = c - g1;
  if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0)) return len * std::abs(d0 + d1) / 2.0;
  auto t = d0 / (d0 - d1) * len;
  return 0.5 * t * std::abs(d0) + 0.5 * (len - t) * std::abs(d1);
}

}  // namespace

auto EmpiricalMeasure::from_atoms(std::vector<std::pair<double, double>> atoms) -> EmpiricalMeasure {
  if (atoms.empty()) throw InvalidArgument{"measure needs at least one atom"};
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  auto mu = EmpiricalMeasure{};
  for (const auto& [x, w] : atoms) {
    if (!(x >= 0.0 && x <= 1.0) || !(w > 0.0)) {
      throw InvalidArgument{"atoms must lie in [0,1] with positive weight"};
    }
    if (!mu.locations_.empty() && mu.locations_.back() == x) {
      mu.weights_.back() += w;
    } else {
      mu.locations_.push_back(x);
      mu.weights_.push_back(w);
    }
  }
  check_weight_sum(mu.weights_);
  mu.finish();
  return mu;
}

auto EmpiricalMeasure::from_nested_atoms(std::vector<std::pair<EmpiricalMeasure, double>> atoms)
    -> EmpiricalMeasure {
  if (atoms.empty()) throw InvalidArgument{"measure needs at least one atom"};
  auto level = atoms.front().first.level();
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
  auto mu = EmpiricalMeasure{};
  mu.level_ = level + 1;
  for (auto& [child, w] : atoms) {
    if (child.level() != level) throw InvalidArgument{"nested atoms must share one level"};
    if (!(w > 0.0)) throw InvalidArgument{"atoms must have positive weight"};
    if (!mu.children_.empty() && mu.children_.back() == child) {
      mu.weights_.back() += w;
    } else {
      mu.children_.push_back(std::move(child));
      mu.weights_.push_back(w);
    }
  }
  check_weight_sum(mu.weights_);
  mu.finish();
  return mu;
}

auto EmpiricalMeasure::finish() -> void {
  cumulative_.resize(weights_.size());
  std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
}

auto EmpiricalMeasure::cdf(double x) const -> double {
  if (level_ != 0) throw InvalidArgument{"cdf of a nested measure"};
  auto k = static_cast<std::size_t>(std::upper_bound(locations_.begin(), locations_.end(), x) - locations_.begin());
  if (k == 0) return 0.0;
  return k == size() ? 1.0 : cumulative_[k - 1];
}

auto EmpiricalMeasure::cdf_left(double x) const -> double {
  if (level_ != 0) throw InvalidArgument{"cdf of a nested measure"};
  auto k = static_cast<std::size_t>(std::lower_bound(locations_.begin(), locations_.end(), x) - locations_.begin());
  if (k == 0) return 0.0;
  return k == size() ? 1.0 : cumulative_[k - 1];
}

auto EmpiricalMeasure::to_json() const -> nlohmann::json {
  auto atoms = nlohmann::json::array();
  for (std::size_t i = 0; i < size(); ++i) {
    if (level_ == 0) {
      atoms.push_back({locations_[i], weights_[i]});
    } else {
      atoms.push_back({{"measure", children_[i].to_json()}, {"weight", weights_[i]}});
    }
  }
  return {{"level", level_}, {"atoms", std::move(atoms)}};
}

auto compare(const EmpiricalMeasure& a, const EmpiricalMeasure& b) -> int {
  if (a.level_ != b.level_) return a.level_ < b.level_ ? -1 : 1;
  auto n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.level_ == 0) {
      if (a.locations_[i] != b.locations_[i]) return a.locations_[i] < b.locations_[i] ? -1 : 1;
    } else if (auto c = compare(a.children_[i], b.children_[i]); c != 0) {
      return c;
    }
    if (a.weights_[i] != b.weights_[i]) return a.weights_[i] < b.weights_[i] ? -1 : 1;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

auto empirical_measure(std::span<const double> samples) -> EmpiricalMeasure {
  if (samples.empty()) throw InvalidArgument{"empirical measure of an empty sample"};
  auto sorted = std::vector<double>(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  auto n = static_cast<double>(sorted.size());
  auto atoms = std::vector<std::pair<double, double>>{};
  for (std::size_t i = 0; i < sorted.size();) {
    auto j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    atoms.emplace_back(sorted[i], static_cast<double>(j - i) / n);
    i = j;
  }
  return EmpiricalMeasure::from_atoms(std::move(atoms));
}

auto empirical_measure(std::span<const EmpiricalMeasure> samples) -> EmpiricalMeasure {
  if (samples.empty()) throw InvalidArgument{"empirical measure of an empty sample"};
  auto order = std::vector<std::size_t>(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return compare(samples[i], samples[j]) < 0; });
  auto n = static_cast<double>(samples.size());
  auto atoms = std::vector<std::pair<EmpiricalMeasure, double>>{};
  for (std::size_t i = 0; i < order.size();) {
    auto j = i;
    while (j < order.size() && samples[order[j]] == samples[order[i]]) ++j;
    atoms.emplace_back(samples[order[i]], static_cast<double>(j - i) / n);
    i = j;
  }
  return EmpiricalMeasure::from_nested_atoms(std::move(atoms));
}

auto select_atom(const EmpiricalMeasure& mu, double v, QuantileConvention convention) -> std::size_t {
  auto cum = mu.cumulative();
  auto it = convention == QuantileConvention::left ? std::lower_bound(cum.begin(), cum.end(), v - quantile_slack)
                                                   : std::upper_bound(cum.begin(), cum.end(), v + quantile_slack);
  return std::min(static_cast<std::size_t>(it - cum.begin()), mu.size() - 1);
}

auto quantile_resample(const EmpiricalMeasure& mu, double v, QuantileConvention convention) -> double {
  if (mu.level() != 0) throw InvalidArgument{"quantile_resample needs a level-0 measure"};
  return mu.location(select_atom(mu, v, convention));
}

auto DirectingHierarchy::at(const TreeVertex& v) const -> const EmpiricalMeasure& {
  auto it = measures.find(v);
  if (it == measures.end()) throw IndexDomainError{"hierarchy has no measure at " + v.encode()};
  return it->second;
}

auto DirectingHierarchy::to_json() const -> nlohmann::json {
  auto j = nlohmann::json::object();
  for (const auto& [v, mu] : measures) j[v.encode()] = mu.to_json();
  return {{"depth", depth}, {"size", size}, {"measures", std::move(j)}};
}

auto extract_hierarchy(const LeafArray& x) -> DirectingHierarchy {
  if (x.shape.trees() != 1 || x.channels != 1) throw InvalidArgument{"extraction needs a single-tree scalar array"};
  const auto r = x.depth();
  const auto m = x.size();
  if (x.values.size() != checked_leaf_count(r, m)) throw InvalidArgument{"incomplete array"};
  for (auto v : x.values) {
    if (!std::isfinite(v)) throw InvalidArgument{"incomplete array: non-finite entry"};
  }

  auto h = DirectingHierarchy{r, m, {}};
  auto below = std::vector<EmpiricalMeasure>{};
  for (int d = r - 1; d >= 0; --d) {
    auto count = checked_leaf_count(r, m) / checked_leaf_count(r - d, m);
    auto level = std::vector<EmpiricalMeasure>(count, EmpiricalMeasure::point_mass(0.0));
    parallel_for(count, [&](std::size_t k) {
      if (d == r - 1) {
        level[k] = empirical_measure(std::span<const double>{x.values}.subspan(k * m, m));
      } else {
        level[k] = empirical_measure(std::span<const EmpiricalMeasure>{below}.subspan(k * m, m));
      }
    });
    auto vertices = vertices_at_depth(r, m, d);
    for (std::size_t k = 0; k < count; ++k) h.measures.emplace(vertices[k], level[k]);
    below = std::move(level);
  }
  return h;
}

auto resynthesize(const DirectingHierarchy& h, int r, Coord fresh_size, std::uint64_t seed,
                  QuantileConvention convention) -> LeafArray {
  if (h.depth != r) {
    throw IndexDomainError{"hierarchy of depth " + std::to_string(h.depth) + " cannot resynthesize depth " +
                           std::to_string(r)};
  }
  const auto& root = h.root();
  if (root.level() != r - 1) throw InvalidArgument{"root measure has the wrong nesting level"};
  auto w = UniformField{seed, "w"};
  auto all = leaves(r, fresh_size);
  auto out = LeafArray{ProductShape::single(r, fresh_size), 1, std::vector<double>(all.size())};
  parallel_for(all.size(), [&](std::size_t k) {
    const auto* mu = &root;
    for (int d = 1; d < r; ++d) mu = &mu->atom(select_atom(*mu, w.at_prefix(all[k], d), convention));
    out.values[k] = quantile_resample(*mu, w.at_prefix(all[k], r), convention);
  });
  return out;
}

auto wasserstein1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) -> double {
  if (mu.level() != 0 || nu.level() != 0) throw InvalidArgument{"wasserstein1 needs level-0 measures"};
  auto points = std::vector<double>(mu.locations().begin(), mu.locations().end());
  points.insert(points.end(), nu.locations().begin(), nu.locations().end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  auto total = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    total += std::abs(mu.cdf(points[k]) - nu.cdf(points[k])) * (points[k + 1] - points[k]);
  }
  return total;
}

auto wasserstein1_uniform(const EmpiricalMeasure& mu, double lo, double hi) -> double {
  if (mu.level() != 0) throw InvalidArgument{"wasserstein1 needs a level-0 measure"};
  if (!(lo < hi)) throw InvalidArgument{"uniform reference needs lo < hi"};
  auto points = std::vector<double>{std::min(0.0, lo), std::max(1.0, hi), lo, hi};
  points.insert(points.end(), mu.locations().begin(), mu.locations().end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  auto g = [&](double x) { return std::clamp((x - lo) / (hi - lo), 0.0, 1.0); };
  auto total = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    total += abs_gap_integral(mu.cdf(points[k]), g(points[k]), g(points[k + 1]), points[k + 1] - points[k]);
  }
  return total;
}

auto nested_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) -> double {
  if (mu.level() != nu.level()) throw InvalidArgument{"nested_distance of measures at different levels"};
  if (mu.level() == 0) return wasserstein1(mu, nu);
  auto cost = CostMatrix{mu.size(), nu.size(), std::vector<double>(mu.size() * nu.size())};
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) cost.data[i * nu.size() + j] = nested_distance(mu.atom(i), nu.atom(j));
  }
  return optimal_transport_cost(mu.weights(), nu.weights(), cost);
}

}  // namespace hexch
