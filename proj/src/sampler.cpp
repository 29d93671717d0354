#include "hexch/sampler.hpp"

#include <cmath>

#include "hexch/error.hpp"
#include "hexch/parallel.hpp"

namespace hexch {

namespace {

auto check_arity(const SigmaModel& model, std::size_t expected) -> void {
  if (model.arity != expected) {
    throw ArityError{"model '" + model.name + "' takes " + std::to_string(model.arity) + " inputs, needs " +
                     std::to_string(expected)};
  }
}

auto checked_eval(const SigmaModel& model, std::span<const double> inputs, const LeafContext& ctx) -> double {
  auto x = model.eval(inputs, ctx);
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error{"model '" + model.name + "' produced " + std::to_string(x) + " outside [0,1]"};
  }
  return x;
}

// Appends the values of `value_at(leaf, tuple)` along p(leaf) in frozen order.
template <typename ValueAt>
auto append_path(std::vector<double>& out, const ProductVertex& leaf, const std::vector<std::vector<int>>& tuples,
                 const ValueAt& value_at) -> void {
  for (const auto& t : tuples) out.push_back(value_at(leaf, std::span<const int>{t}));
}

}  // namespace

auto path_depth_tuples(const std::vector<int>& depths) -> std::vector<std::vector<int>> {
  auto total = std::size_t{1};
  for (auto r : depths) total *= static_cast<std::size_t>(r + 1);
  auto out = std::vector<std::vector<int>>{};
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    auto t = std::vector<int>{};
    auto rest = idx;
    for (auto r : depths) {
      auto radix = static_cast<std::size_t>(r + 1);
      t.push_back(static_cast<int>(rest % radix));
      rest /= radix;
    }
    out.push_back(std::move(t));
  }
  return out;
}

auto sample_multi(const SigmaModel& model, const ProductShape& shape, std::uint64_t seed) -> LeafArray {
  shape.validate();
  check_arity(model, shape.path_size());
  auto all = product_leaves(shape);
  auto tuples = path_depth_tuples(shape.depths);
  auto v = UniformField{seed, "v"};
  auto out = LeafArray{shape, 1, std::vector<double>(all.size())};
  parallel_for(all.size(), [&](std::size_t i) {
    auto inputs = std::vector<double>{};
    inputs.reserve(tuples.size());
    append_path(inputs, all[i], tuples, [&](const ProductVertex& l, std::span<const int> t) { return v.at_prefix(l, t); });
    out.values[i] = checked_eval(model, inputs, LeafContext{all[i], seed});
  });
  return out;
}

auto sample_array(const SigmaModel& model, int r, Coord m, std::uint64_t seed) -> LeafArray {
  return sample_multi(model, ProductShape::single(r, m), seed);
}

auto sample_ah(const SigmaModel& model, int r, Coord m, Coord n, std::uint64_t seed) -> LeafArray {
  auto shape = ProductShape{{r, 1}, {m, n}};
  shape.validate();
  check_arity(model, 2 * static_cast<std::size_t>(r + 1));
  auto v = UniformField{seed, "v"};
  auto replicas = std::vector<UniformField>{};
  replicas.reserve(n);
  for (Coord i = 1; i <= n; ++i) replicas.emplace_back(seed, "v^" + std::to_string(i));
  auto all = product_leaves(shape);
  auto out = LeafArray{shape, 1, std::vector<double>(all.size())};
  parallel_for(all.size(), [&](std::size_t k) {
    const auto& alpha = all[k].parts[0];
    const auto& vi = replicas[all[k].parts[1][0] - 1];
    auto inputs = std::vector<double>{};
    inputs.reserve(model.arity);
    for (int d = 0; d <= r; ++d) inputs.push_back(v.at_prefix(alpha, d));
    for (int d = 0; d <= r; ++d) inputs.push_back(vi.at_prefix(alpha, d));
    out.values[k] = checked_eval(model, inputs, LeafContext{all[k], seed});
  });
  return out;
}

auto sample_conditional(const SigmaModel& tau, const IField& u, const ProductShape& shape, std::uint64_t seed)
    -> ConditionalSample {
  shape.validate();
  check_arity(tau, 2 * shape.path_size());
  auto v = UniformField{seed, "v"};
  if (u.base() == v) throw InvalidArgument{"I-field base coincides with the fresh v field"};
  auto sample = ConditionalSample{};
  sample.vertices = product_truncation_vertices(shape);
  sample.u_values.resize(sample.vertices.size());
  parallel_for(sample.vertices.size(), [&](std::size_t k) { sample.u_values[k] = u(sample.vertices[k]); });

  auto all = product_leaves(shape);
  auto tuples = path_depth_tuples(shape.depths);
  sample.x = LeafArray{shape, 1, std::vector<double>(all.size())};
  parallel_for(all.size(), [&](std::size_t i) {
    auto inputs = std::vector<double>{};
    inputs.reserve(tau.arity);
    append_path(inputs, all[i], tuples, [&](const ProductVertex& l, std::span<const int> t) { return u.at_prefix(l, t); });
    append_path(inputs, all[i], tuples, [&](const ProductVertex& l, std::span<const int> t) { return v.at_prefix(l, t); });
    sample.x.values[i] = checked_eval(tau, inputs, LeafContext{all[i], seed});
  });
  return sample;
}

auto sample_pair(const SigmaModel& s1, const SigmaModel& s2, const ProductShape& shape, std::uint64_t seed)
    -> PairSample {
  shape.validate();
  check_arity(s1, shape.path_size());
  check_arity(s2, 2 * shape.path_size());
  auto u = UniformField{seed, "u"};
  auto v = UniformField{seed, "v"};
  auto all = product_leaves(shape);
  auto tuples = path_depth_tuples(shape.depths);
  auto out = PairSample{LeafArray{shape, 1, std::vector<double>(all.size())},
                        LeafArray{shape, 1, std::vector<double>(all.size())}};
  parallel_for(all.size(), [&](std::size_t i) {
    auto inputs = std::vector<double>{};
    inputs.reserve(s2.arity);
    append_path(inputs, all[i], tuples, [&](const ProductVertex& l, std::span<const int> t) { return u.at_prefix(l, t); });
    auto ctx = LeafContext{all[i], seed};
    out.y.values[i] = checked_eval(s1, std::span<const double>{inputs}, ctx);
    append_path(inputs, all[i], tuples, [&](const ProductVertex& l, std::span<const int> t) { return v.at_prefix(l, t); });
    out.x.values[i] = checked_eval(s2, inputs, ctx);
  });
  return out;
}

auto group_by_depth(const ConditionalSample& sample) -> std::map<std::vector<int>, std::vector<double>> {
  auto out = std::map<std::vector<int>, std::vector<double>>{};
  for (std::size_t k = 0; k < sample.vertices.size(); ++k) {
    out[sample.vertices[k].depth_tuple()].push_back(sample.u_values[k]);
  }
  return out;
}

}  // namespace hexch
