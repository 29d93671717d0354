#include "hexch/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hexch {

namespace {

std::atomic<unsigned> configured_threads{1};
thread_local bool inside_worker = false;

}  // namespace

auto set_thread_count(unsigned n) -> void { configured_threads.store(n); }

auto thread_count() -> unsigned {
  auto n = configured_threads.load();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

auto parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) -> void {
  auto workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1 || inside_worker) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  auto next = std::atomic<std::size_t>{0};
  auto failure = std::exception_ptr{};
  auto failure_mutex = std::mutex{};
  auto run = [&] {
    inside_worker = true;
    try {
      for (auto i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    } catch (...) {
      auto lock = std::lock_guard{failure_mutex};
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
    inside_worker = false;
  };
  {
    auto pool = std::vector<std::jthread>{};
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace hexch
