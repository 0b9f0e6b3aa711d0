#pragma once

#include <cstdint>
#include <string>

#include "homx/errors.hpp"

namespace homx {

// Prime field F_p with 2 <= p <= 251. Elements are canonical residues 0..p-1
// stored in uint32_t; products of two residues never overflow.
struct Field {
  uint32_t p = 2;

  Field() = default;
  explicit Field(uint32_t prime) : p(prime) {
    if (p < 2 || p > 251 || !is_prime(p))
      throw ValueError("field characteristic must be a prime in [2,251], got " +
                       std::to_string(prime));
  }

  static bool is_prime(uint32_t n) {
    if (n < 2) return false;
    for (uint32_t d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  }

  uint32_t reduce(long long v) const {
    long long r = v % static_cast<long long>(p);
    if (r < 0) r += p;
    return static_cast<uint32_t>(r);
  }
  uint32_t add(uint32_t a, uint32_t b) const { return (a + b) % p; }
  uint32_t sub(uint32_t a, uint32_t b) const { return (a + p - b) % p; }
  uint32_t mul(uint32_t a, uint32_t b) const { return (a * b) % p; }
  uint32_t neg(uint32_t a) const { return a == 0 ? 0 : p - a; }

  // a^(p-2); p prime so this inverts nonzero a.
  uint32_t inv(uint32_t a) const {
    if (a == 0) throw ValueError("division by zero in F_" + std::to_string(p));
    uint32_t result = 1, base = a, e = p - 2;
    while (e) {
      if (e & 1) result = mul(result, base);
      base = mul(base, base);
      e >>= 1;
    }
    return result;
  }

  bool operator==(const Field& o) const { return p == o.p; }
  bool operator!=(const Field& o) const { return p != o.p; }
};

}  // namespace homx
