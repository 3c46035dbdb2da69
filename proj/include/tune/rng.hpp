#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace tune {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

} // namespace detail

//! Deterministic random stream (SplitMix64) with hierarchical substream
//! derivation. Substreams are derived from the stream's root seed and a
//! (label, index) pair, so they are reproducible regardless of how much of
//! the parent stream has been consumed.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed)
      : seed_(seed), state_(detail::mix64(seed ^ 0x6A09E667F3BCC909ull)) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return detail::mix64(state_);
  }

  //! Uniform double in [0, 1).
  double next_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * next_real(); }

  //! Uniform in [0, n). Unbiased (Lemire's method). n must be > 0.
  std::uint64_t bounded(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  //! Uniform integer in [lo, hi], both ends inclusive. Requires lo <= hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    bounded(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(bounded(n)); }

  RandomStream substream(std::string_view label, std::uint64_t index = 0) const {
    std::uint64_t child = detail::mix64(seed_ ^ detail::fnv1a64(label));
    child = detail::mix64(child + (index + 1) * 0x9E3779B97F4A7C15ull);
    return RandomStream(child);
  }

  std::uint64_t seed() const { return seed_; }

private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

//! First k elements of a uniformly random k-subset of [0, n), in draw order.
inline std::vector<int> sample_without_replacement(int n, int k, RandomStream& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  if (k > n) k = n;
  for (int i = 0; i < k; ++i) {
    auto j = static_cast<std::size_t>(i) +
             rng.uniform_index(static_cast<std::size_t>(n - i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

//! In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, RandomStream& rng) {
  if (v.empty()) return;
  for (std::size_t i = v.size() - 1; i > 0; --i) {
    std::size_t j = rng.uniform_index(i + 1);
    std::swap(v[i], v[j]);
  }
}

} // namespace tune
