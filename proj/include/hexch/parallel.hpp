#ifndef HEXCH_PARALLEL_HPP_
#define HEXCH_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace hexch {

// Worker count used by parallel_for. 0 selects std::thread::hardware_concurrency().
// Results never depend on this value: every parallel loop writes disjoint slots and
// draws randomness from per-index streams.
auto set_thread_count(unsigned n) -> void;
auto thread_count() -> unsigned;

// Calls body(i) for i in [0, n). Nested calls from inside a worker run inline.
auto parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) -> void;

}  // namespace hexch

#endif  // HEXCH_PARALLEL_HPP_
