#pragma once

#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgqa/error.hpp"

namespace kgqa {

inline constexpr uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ull;
inline constexpr uint64_t kFnvPrime = 0x00000100000001b3ull;

inline uint64_t fnv1a64(std::string_view bytes, uint64_t h = kFnvOffsetBasis) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

// Folds labels and indices into a base seed. Every consumer of randomness in
// the pipeline derives its own stream this way, so results do not depend on
// evaluation order or thread count.
class SeedMixer {
 public:
  explicit SeedMixer(uint64_t base) : h_(kFnvOffsetBasis) { mix(base); }

  SeedMixer& mix(uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xffu;
      h_ *= kFnvPrime;
    }
    return *this;
  }

  SeedMixer& mix(std::string_view s) {
    h_ = fnv1a64(s, h_);
    h_ ^= 0x1fu;
    h_ *= kFnvPrime;
    return *this;
  }

  uint64_t value() const { return h_; }

 private:
  uint64_t h_;
};

template <typename... Parts>
uint64_t derive_seed(uint64_t base, Parts&&... parts) {
  SeedMixer m(base);
  (m.mix(std::forward<Parts>(parts)), ...);
  return m.value();
}

// Deterministic, platform-independent PRNG (splitmix64 core). The standard
// <random> distributions are implementation-defined, so all sampling used for
// dataset construction goes through this class instead.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, n). Lemire's multiply-reject method.
  uint64_t below(uint64_t n) {
    if (n == 0) fail(ErrorCode::contract, "Rng::below: n must be positive");
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto low = static_cast<uint64_t>(m);
    if (low < n) {
      uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        low = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  size_t index(size_t n) { return static_cast<size_t>(below(n)); }

  bool bernoulli(double p) { return next_double() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = 0; i + 1 < v.size(); ++i) {
      size_t j = i + index(v.size() - i);
      std::swap(v[i], v[j]);
    }
  }

  // k distinct indices drawn uniformly from [0, n), in selection order.
  std::vector<size_t> pick_indices(size_t n, size_t k) {
    if (k > n) fail(ErrorCode::contract, "Rng::pick_indices: k exceeds n");
    std::vector<size_t> out;
    out.reserve(k);
    std::unordered_map<size_t, size_t> swaps;
    auto at = [&swaps](size_t x) {
      auto it = swaps.find(x);
      return it == swaps.end() ? x : it->second;
    };
    for (size_t i = 0; i < k; ++i) {
      size_t j = i + index(n - i);
      size_t vj = at(j);
      swaps[j] = at(i);
      out.push_back(vj);
    }
    return out;
  }

 private:
  uint64_t state_;
};

// Lazily enumerates a uniformly random permutation of [0, n). Memory grows
// with the number of elements actually drawn, so sampling a handful of
// candidates from a large index list stays cheap.
class LazyPermutation {
 public:
  LazyPermutation(size_t n, Rng& rng) : n_(n), rng_(rng) {}

  bool next(size_t& out) {
    if (i_ >= n_) return false;
    size_t j = i_ + rng_.index(n_ - i_);
    out = at(j);
    swaps_[j] = at(i_);
    ++i_;
    return true;
  }

 private:
  size_t at(size_t x) const {
    auto it = swaps_.find(x);
    return it == swaps_.end() ? x : it->second;
  }

  size_t n_;
  size_t i_ = 0;
  Rng& rng_;
  std::unordered_map<size_t, size_t> swaps_;
};

}  // namespace kgqa
