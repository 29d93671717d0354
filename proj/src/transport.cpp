#include "hexch/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hexch/error.hpp"

namespace hexch {

auto optimal_transport_cost(std::span<const double> supply, std::span<const double> demand, const CostMatrix& cost)
    -> double {
  const auto n = supply.size();
  const auto m = demand.size();
  if (cost.rows != n || cost.cols != m) throw InvalidArgument{"cost matrix does not match marginals"};
  auto total_a = std::accumulate(supply.begin(), supply.end(), 0.0);
  auto total_b = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (std::abs(total_a - total_b) > 1e-9 * std::max(1.0, total_a)) {
    throw InvalidArgument{"transport marginals have different mass"};
  }
  constexpr auto inf = std::numeric_limits<double>::infinity();
  const auto tol = 1e-14 * std::max(1.0, total_a);

  // Nodes: 0..n-1 supplies, n..n+m-1 demands, s = n+m, t = n+m+1.
  const auto s = n + m;
  const auto t = n + m + 1;
  const auto V = n + m + 2;
  auto rem_a = std::vector<double>(supply.begin(), supply.end());
  auto rem_b = std::vector<double>(demand.begin(), demand.end());
  auto flow = std::vector<double>(n * m, 0.0);
  auto potential = std::vector<double>(V, 0.0);
  auto dist = std::vector<double>(V);
  auto prev = std::vector<std::size_t>(V);
  auto done = std::vector<bool>(V);

  auto shipped = 0.0;
  while (shipped < total_a - tol) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(done.begin(), done.end(), false);
    dist[s] = 0.0;
    for (std::size_t iter = 0; iter < V; ++iter) {
      auto u = V;
      for (std::size_t x = 0; x < V; ++x) {
        if (!done[x] && dist[x] < inf && (u == V || dist[x] < dist[u])) u = x;
      }
      if (u == V) break;
      done[u] = true;
      auto relax = [&](std::size_t w, double c) {
        auto reduced = std::max(0.0, c + potential[u] - potential[w]);
        if (dist[u] + reduced < dist[w]) {
          dist[w] = dist[u] + reduced;
          prev[w] = u;
        }
      };
      if (u == s) {
        for (std::size_t i = 0; i < n; ++i) {
          if (rem_a[i] > tol) relax(i, 0.0);
        }
      } else if (u < n) {
        for (std::size_t j = 0; j < m; ++j) relax(n + j, cost(u, j));
      } else if (u < n + m) {
        auto j = u - n;
        for (std::size_t i = 0; i < n; ++i) {
          if (flow[i * m + j] > tol) relax(i, -cost(i, j));
        }
        if (rem_b[j] > tol) relax(t, 0.0);
      }
    }
    if (dist[t] == inf) break;
    for (std::size_t x = 0; x < V; ++x) potential[x] += std::min(dist[x], dist[t]);

    auto amount = inf;
    for (auto w = t; w != s; w = prev[w]) {
      auto u = prev[w];
      if (u == s) {
        amount = std::min(amount, rem_a[w]);
      } else if (w == t) {
        amount = std::min(amount, rem_b[u - n]);
      } else if (u >= n) {
        amount = std::min(amount, flow[w * m + (u - n)]);
      }
    }
    for (auto w = t; w != s; w = prev[w]) {
      auto u = prev[w];
      if (u == s) {
        rem_a[w] -= amount;
      } else if (w == t) {
        rem_b[u - n] -= amount;
      } else if (u < n) {
        flow[u * m + (w - n)] += amount;
      } else {
        flow[w * m + (u - n)] -= amount;
      }
    }
    shipped += amount;
  }

  auto total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) total += flow[i * m + j] * cost(i, j);
  }
  return total;
}

}  // namespace hexch
