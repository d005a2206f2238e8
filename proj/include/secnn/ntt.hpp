#pragma once

#include <cstdint>
#include <vector>

#include "secnn/modmath.hpp"

namespace secnn {

// Negacyclic NTT over Z_q[x]/(x^n + 1), q == 1 (mod 2n). Forward transform is
// the usual Cooley-Tukey pass with psi-powers folded in (so no separate
// pre-twist); inverse reverses the butterflies stage by stage and scales by
// n^-1, which makes intt(ntt(a)) == a exact by construction.
struct NttTables {
  uint32_t n = 0;
  int logn = 0;
  Modulus mod;
  uint64_t psi = 0;  // primitive 2n-th root of unity
  std::vector<uint64_t> rp, rp_shoup;    // psi^bitrev(i)
  std::vector<uint64_t> irp, irp_shoup;  // inverses of rp entries
  uint64_t n_inv = 0, n_inv_shoup = 0;

  NttTables() = default;
  NttTables(uint32_t n, uint64_t q);

  void forward(uint64_t* a) const;
  void inverse(uint64_t* a) const;
};

// Smallest prime >= 2^bits with p == 1 (mod 2n), skipping any in `used`.
uint64_t pick_ntt_prime(uint32_t n, int bits, const std::vector<uint64_t>& used);

}  // namespace secnn
