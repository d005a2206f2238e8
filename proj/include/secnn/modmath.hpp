#pragma once

#include <cstdint>

namespace secnn {

// Prime modulus with a precomputed 2^128/q Barrett ratio. All ops assume
// operands already reduced mod q unless noted.
struct Modulus {
  uint64_t q = 0;
  uint64_t ratio_hi = 0;  // floor(2^128 / q) high word
  uint64_t ratio_lo = 0;  // floor(2^128 / q) low word
  int bits = 0;

  Modulus() = default;
  explicit Modulus(uint64_t value) : q(value) {
    // floor(2^128 / q) via 128-bit long division in two steps.
    unsigned __int128 num = (~(unsigned __int128)0) / q;  // floor((2^128-1)/q)
    // 2^128 = (2^128-1)+1; adjust if q divides 2^128 exactly (impossible for odd q>1).
    unsigned __int128 rem = (~(unsigned __int128)0) % q;
    if (rem + 1 == q) num += 1;
    ratio_hi = (uint64_t)(num >> 64);
    ratio_lo = (uint64_t)num;
    uint64_t v = value;
    while (v) {
      bits++;
      v >>= 1;
    }
  }

  uint64_t add(uint64_t a, uint64_t b) const {
    uint64_t s = a + b;
    return s >= q ? s - q : s;
  }
  uint64_t sub(uint64_t a, uint64_t b) const { return a >= b ? a - b : a + q - b; }
  uint64_t neg(uint64_t a) const { return a == 0 ? 0 : q - a; }

  // Barrett reduction of a 128-bit value.
  uint64_t reduce128(unsigned __int128 x) const {
    uint64_t lo = (uint64_t)x, hi = (uint64_t)(x >> 64);
    uint64_t c1 = (uint64_t)(((unsigned __int128)lo * ratio_lo) >> 64);
    unsigned __int128 t2 = (unsigned __int128)lo * ratio_hi;
    unsigned __int128 t3 = (unsigned __int128)hi * ratio_lo;
    unsigned __int128 mid = t2 + t3 + c1;
    uint64_t est = hi * ratio_hi + (uint64_t)(mid >> 64);
    uint64_t r = lo - est * q;
    if (r >= q) r -= q;
    return r;
  }

  uint64_t reduce(uint64_t x) const { return reduce128(x); }

  uint64_t mul(uint64_t a, uint64_t b) const {
    return reduce128((unsigned __int128)a * b);
  }

  // Shoup multiplication: b fixed with precomputed bshoup = floor(b*2^64/q).
  uint64_t mul_shoup(uint64_t a, uint64_t b, uint64_t bshoup) const {
    uint64_t hi = (uint64_t)(((unsigned __int128)a * bshoup) >> 64);
    uint64_t r = a * b - hi * q;
    return r >= q ? r - q : r;
  }

  uint64_t shoup_of(uint64_t b) const {
    return (uint64_t)(((unsigned __int128)b << 64) / q);
  }

  uint64_t pow(uint64_t base, uint64_t e) const {
    uint64_t r = 1, b = base % q;
    while (e) {
      if (e & 1) r = mul(r, b);
      b = mul(b, b);
      e >>= 1;
    }
    return r;
  }

  uint64_t inv(uint64_t a) const { return pow(a, q - 2); }  // q prime

  // Map a signed value into [0, q).
  uint64_t from_signed(int64_t v) const {
    int64_t r = v % (int64_t)q;
    return r < 0 ? (uint64_t)(r + (int64_t)q) : (uint64_t)r;
  }
  int64_t to_centered(uint64_t v) const {
    return v > q / 2 ? (int64_t)v - (int64_t)q : (int64_t)v;
  }
};

inline bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  // Deterministic Miller-Rabin for 64-bit with the standard witness set.
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    s++;
  }
  Modulus m(n);
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = m.pow(a % n, d);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 0; i < s - 1; i++) {
      x = m.mul(x, x);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

}  // namespace secnn
