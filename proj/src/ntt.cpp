#include "secnn/ntt.hpp"

#include <algorithm>

#include "secnn/errors.hpp"

namespace secnn {

static uint32_t bitrev(uint32_t v, int bits) {
  uint32_t r = 0;
  for (int i = 0; i < bits; i++) {
    r = (r << 1) | (v & 1);
    v >>= 1;
  }
  return r;
}

NttTables::NttTables(uint32_t n_, uint64_t q) : n(n_), mod(q) {
  require((n & (n - 1)) == 0 && n >= 2, Err::InvalidArgument, "ntt size must be a power of two");
  require(q % (2ull * n) == 1, Err::InvalidArgument, "modulus not ntt friendly");
  while ((1u << logn) < n) logn++;

  // psi = h^((q-1)/2n) for the first base h that yields psi^n == -1.
  uint64_t exp = (q - 1) / (2ull * n);
  for (uint64_t h = 2;; h++) {
    uint64_t cand = mod.pow(h, exp);
    if (mod.pow(cand, n) == q - 1) {
      psi = cand;
      break;
    }
  }

  rp.resize(n);
  rp_shoup.resize(n);
  irp.resize(n);
  irp_shoup.resize(n);
  uint64_t ipsi = mod.inv(psi);
  std::vector<uint64_t> pw(n), ipw(n);
  pw[0] = 1;
  ipw[0] = 1;
  for (uint32_t i = 1; i < n; i++) {
    pw[i] = mod.mul(pw[i - 1], psi);
    ipw[i] = mod.mul(ipw[i - 1], ipsi);
  }
  for (uint32_t i = 0; i < n; i++) {
    uint32_t r = bitrev(i, logn);
    rp[i] = pw[r];
    irp[i] = ipw[r];
    rp_shoup[i] = mod.shoup_of(rp[i]);
    irp_shoup[i] = mod.shoup_of(irp[i]);
  }
  n_inv = mod.inv(n);
  n_inv_shoup = mod.shoup_of(n_inv);
}

void NttTables::forward(uint64_t* a) const {
  uint32_t t = n >> 1;
  for (uint32_t m = 1; m < n; m <<= 1) {
    for (uint32_t i = 0; i < m; i++) {
      uint32_t j1 = 2 * i * t;
      uint64_t w = rp[m + i], ws = rp_shoup[m + i];
      for (uint32_t j = j1; j < j1 + t; j++) {
        uint64_t u = a[j];
        uint64_t v = mod.mul_shoup(a[j + t], w, ws);
        a[j] = mod.add(u, v);
        a[j + t] = mod.sub(u, v);
      }
    }
    t >>= 1;
  }
}

void NttTables::inverse(uint64_t* a) const {
  uint32_t t = 1;
  for (uint32_t m = n >> 1; m >= 1; m >>= 1) {
    for (uint32_t i = 0; i < m; i++) {
      uint32_t j1 = 2 * i * t;
      uint64_t w = irp[m + i], ws = irp_shoup[m + i];
      for (uint32_t j = j1; j < j1 + t; j++) {
        uint64_t x = a[j], y = a[j + t];
        a[j] = mod.add(x, y);
        a[j + t] = mod.mul_shoup(mod.sub(x, y), w, ws);
      }
    }
    t <<= 1;
  }
  for (uint32_t i = 0; i < n; i++) a[i] = mod.mul_shoup(a[i], n_inv, n_inv_shoup);
}

uint64_t pick_ntt_prime(uint32_t n, int bits, const std::vector<uint64_t>& used) {
  require(bits >= 20 && bits <= 61, Err::InvalidArgument, "prime bit length out of range");
  uint64_t step = 2ull * n;
  uint64_t start = 1ull << bits;
  uint64_t k = (start + step - 1) / step;  // first candidate >= 2^bits
  for (;; k++) {
    uint64_t cand = k * step + 1;
    if (cand < start) continue;
    if (std::find(used.begin(), used.end(), cand) != used.end()) continue;
    if (is_prime_u64(cand)) return cand;
  }
}

}  // namespace secnn
