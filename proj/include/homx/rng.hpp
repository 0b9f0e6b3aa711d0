#pragma once

#include <cstdint>

namespace homx {

// splitmix64: tiny, seedable, identical on every platform. std::mt19937 would
// also replay exactly, but distributions are not pinned by the standard, so we
// keep the whole path in-house.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Unbiased draw from [0, n) via rejection.
  uint32_t below(uint32_t n) {
    if (n <= 1) return 0;
    uint64_t limit = ~0ull - (~0ull % n);
    uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return static_cast<uint32_t>(v % n);
  }

 private:
  uint64_t state_;
};

}  // namespace homx
