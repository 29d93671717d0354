#ifndef HEXCH_TRANSPORT_HPP_
#define HEXCH_TRANSPORT_HPP_

#include <span>
#include <vector>

namespace hexch {

// Dense row-major cost matrix.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  auto operator()(std::size_t i, std::size_t j) const -> double { return data[i * cols + j]; }
};

// Minimal cost of transporting `supply` onto `demand` (both nonnegative, equal totals)
// under `cost`. Exact up to floating-point rounding: successive shortest augmenting paths
// with Dijkstra and node potentials.
auto optimal_transport_cost(std::span<const double> supply, std::span<const double> demand, const CostMatrix& cost)
    -> double;

}  // namespace hexch

#endif  // HEXCH_TRANSPORT_HPP_
