#ifndef HEXCH_SAMPLER_HPP_
#define HEXCH_SAMPLER_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hexch/array.hpp"
#include "hexch/field.hpp"
#include "hexch/tree_index.hpp"

namespace hexch {

// Passed to every evaluation. Models in the representation form ignore it; the deliberate
// violation scenarios read the leaf labels or extra fields derived from `seed`.
struct LeafContext {
  const ProductVertex& leaf;
  std::uint64_t seed;
};

// A measurable map from path-indexed values to [0,1].
struct SigmaModel {
  using Eval = std::function<double(std::span<const double>, const LeafContext&)>;

  std::string name;
  std::size_t arity = 0;
  std::map<std::string, double> params;
  Eval eval;
  bool reads_labels = false;
};

// Depth tuples of p(alpha) for a full-depth leaf, in the frozen argument order: first
// component fastest. For a single tree this is 0, 1, ..., r.
auto path_depth_tuples(const std::vector<int>& depths) -> std::vector<std::vector<int>>;

// X_alpha = sigma(v_{p(alpha)}) with v = UniformField{seed, "v"}.
auto sample_array(const SigmaModel& model, int r, Coord m, std::uint64_t seed) -> LeafArray;

// Same over a product of trees.
auto sample_multi(const SigmaModel& model, const ProductShape& shape, std::uint64_t seed) -> LeafArray;

// X_{alpha,i} = sigma(v_{p(alpha)}, v^i_{p(alpha)}) with roles "v" and "v^<i>". Indexed as a
// product of the depth-r tree and a depth-1 replica tree of size n.
auto sample_ah(const SigmaModel& model, int r, Coord m, Coord n, std::uint64_t seed) -> LeafArray;

// Realized I-field values on every vertex of the truncation, together with the array
// X_alpha = tau(u_{p(alpha)}, v_{p(alpha)}) driven by a fresh v = UniformField{seed, "v"}.
struct ConditionalSample {
  std::vector<ProductVertex> vertices;
  std::vector<double> u_values;
  LeafArray x;
};

auto sample_conditional(const SigmaModel& tau, const IField& u, const ProductShape& shape, std::uint64_t seed)
    -> ConditionalSample;

// (Y_alpha, X_alpha) = (s1(u_{p(alpha)}), s2(u_{p(alpha)}, v_{p(alpha)})) with independent uniform
// fields u = {seed, "u"} and v = {seed, "v"}.
struct PairSample {
  LeafArray y;
  LeafArray x;
};

auto sample_pair(const SigmaModel& s1, const SigmaModel& s2, const ProductShape& shape, std::uint64_t seed)
    -> PairSample;

// u-values grouped by depth tuple.
auto group_by_depth(const ConditionalSample& sample) -> std::map<std::vector<int>, std::vector<double>>;

}  // namespace hexch

#endif  // HEXCH_SAMPLER_HPP_
