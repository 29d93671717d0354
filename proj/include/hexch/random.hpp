#ifndef HEXCH_RANDOM_HPP_
#define HEXCH_RANDOM_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>

namespace hexch {

// Frozen constants. Changing any of them changes every sampled array.
inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t fnv_offset = 0xCBF29CE484222325ull;
inline constexpr std::uint64_t fnv_prime = 0x00000100000001B3ull;

// SplitMix64 finalizer (Stafford variant 13).
constexpr auto mix64(std::uint64_t z) -> std::uint64_t {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// 53 high bits to [0,1).
constexpr auto to_unit(std::uint64_t z) -> double {
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

// FNV-1a over a byte stream; doubles as an encoding sink for TreeVertex::encode_to.
class Fnv1a {
 public:
  constexpr auto put(char c) -> void {
    state_ ^= static_cast<unsigned char>(c);
    state_ *= fnv_prime;
  }
  constexpr auto put(std::string_view s) -> void {
    for (char c : s) put(c);
  }
  constexpr auto put_decimal(std::uint64_t x) -> void {
    char buf[20];
    int n = 0;
    do {
      buf[n++] = static_cast<char>('0' + x % 10);
      x /= 10;
    } while (x != 0);
    while (n > 0) put(buf[--n]);
  }
  constexpr auto value() const -> std::uint64_t { return state_; }

 private:
  std::uint64_t state_ = fnv_offset;
};

// Keyed combination of a seed with a 64-bit key.
constexpr auto keyed_mix(std::uint64_t seed, std::uint64_t key) -> std::uint64_t {
  auto z = mix64(seed + golden_gamma);
  z = mix64(z ^ key);
  return mix64(z + golden_gamma);
}

// Child seed for a named sub-stream, e.g. derive_seed(seed, "replicate", j).
constexpr auto derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0)
    -> std::uint64_t {
  auto h = Fnv1a{};
  h.put(tag);
  h.put('#');
  h.put_decimal(index);
  return keyed_mix(seed, h.value());
}

// SplitMix64 stream. Satisfies UniformRandomBitGenerator; the bounded and shuffle helpers
// below are used instead of <random> distributions because those are not portable bit-for-bit.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit SplitMix64(std::uint64_t seed) : state_{seed} {}

  static constexpr auto min() -> result_type { return 0; }
  static constexpr auto max() -> result_type { return std::numeric_limits<result_type>::max(); }

  constexpr auto operator()() -> result_type {
    state_ += golden_gamma;
    return mix64(state_);
  }

  auto uniform() -> double { return to_unit((*this)()); }

  // Uniform integer in [0, n), Lemire's multiply-shift with rejection.
  auto below(std::uint64_t n) -> std::uint64_t {
    auto x = (*this)();
    auto m = static_cast<unsigned __int128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      auto threshold = (0 - n) % n;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<unsigned __int128>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  template <typename T>
  auto shuffle(std::span<T> items) -> void {
    for (auto i = items.size(); i > 1; --i) {
      auto j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace hexch

#endif  // HEXCH_RANDOM_HPP_
