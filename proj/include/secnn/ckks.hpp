#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "secnn/errors.hpp"
#include "secnn/modmath.hpp"
#include "secnn/ntt.hpp"

namespace secnn::ckks {

enum class Domain : uint8_t { Coeff = 0, Eval = 1 };

// RNS residue polynomial. limbs[l][i] is coefficient i mod primes[l]; the limb
// count IS the level (prefix of the prime chain).
struct RnsPoly {
  uint32_t n = 0;
  Domain domain = Domain::Coeff;
  std::vector<std::vector<uint64_t>> limbs;

  size_t level() const { return limbs.size(); }
  static RnsPoly zero(uint32_t n, size_t level, Domain d) {
    RnsPoly p;
    p.n = n;
    p.domain = d;
    p.limbs.assign(level, std::vector<uint64_t>(n, 0));
    return p;
  }
};

struct CkksParams {
  uint32_t degree = 0;
  std::vector<int> chain_bits;    // requested bit lengths, budget math uses these
  std::vector<uint64_t> primes;   // generated chain, primes[i] == 1 mod 2*degree
  double initial_scale = 0;

  uint32_t slot_count() const { return degree / 2; }
  size_t chain_length() const { return primes.size(); }
};

// degree -> max total chain bits usable at the 128-bit security floor.
// degree 1024 is flagged unusable (its budget cannot fit a workable chain).
const std::vector<std::pair<uint32_t, int>>& degree_budget_table();

CkksParams make_params(uint32_t degree, const std::vector<int>& chain_bits, double initial_scale);
void validate(const CkksParams& p);  // Err::DegreeUnusable / Err::BudgetExceeded / ...

CkksParams paper_preset();  // degree 16384, bits {60,40,40,40,30,30}, scale 2^30
CkksParams test_preset();   // degree 4096,  bits {40,30,30},          scale 2^30

struct Context {
  CkksParams params;
  std::vector<Modulus> mods;
  std::vector<NttTables> ntts;
  // Canonical-embedding tables. Slot k lives at root zeta^rot_group[k],
  // zeta = exp(i*pi/n), so the x -> x^5 automorphism shifts slots by one.
  std::vector<std::complex<double>> omega_pow;   // exp(2*pi*i*j/n), j < n
  std::vector<std::complex<double>> zeta_pow;    // exp(pi*i*j/n),  j < 2n
  std::vector<uint32_t> rot_group;               // 5^k mod 2n, k < n/2

  explicit Context(CkksParams p);

  // Digit counts per limb and exclusive prefix offsets into KswKey::comps for
  // a key with balanced base-2^digit_bits decomposition.
  std::pair<std::vector<int>, std::vector<int>> digit_layout(int digit_bits) const;

  uint32_t n() const { return params.degree; }
  size_t chain_len() const { return params.primes.size(); }
  uint32_t slots() const { return params.slot_count(); }

  void to_eval(RnsPoly& p) const;
  void to_coeff(RnsPoly& p) const;
};

struct Plaintext {
  RnsPoly poly;  // Eval domain
  double scale = 0;
  size_t level() const { return poly.level(); }
};

struct Ciphertext {
  std::vector<RnsPoly> comps;  // Eval domain; 2 normally, 3 straight after eval_mul
  double scale = 0;
  size_t level() const { return comps.empty() ? 0 : comps[0].level(); }
  size_t size() const { return comps.size(); }
};

// Secret key deliberately has no serializer; nothing on the setup path can
// embed it (checked structurally by tests).
struct SecretKey {
  RnsPoly s;        // Eval domain, full level
  RnsPoly s_coeff;  // Coeff domain copy for automorphism-derived keys
};

struct PublicKey {
  RnsPoly b, a;  // b = -(a*s) + e, Eval domain, full level
};

// Digit width is a per-key knob. Switching noise grows with the digit base, and
// only matters relative to the ciphertext scale at the point of use: relin runs
// at the squared scale, so wide digits are free there; rotation must stay clean
// at the base scale, which needs narrow digits (and tolerates the larger key).
inline constexpr int kRelinDigitBits = 8;
inline constexpr int kGaloisDigitBits = 2;

// Key-switching key: one (b,a) pair per (limb j, balanced digit t), flattened
// in chain order. The (j,t) component carries 2^(digit_bits*t) * idem_j * target
// where idem_j is the CRT idempotent, so one key serves every level prefix.
struct KswKey {
  int digit_bits = 0;
  std::vector<std::pair<RnsPoly, RnsPoly>> comps;
  bool empty() const { return comps.empty(); }
};

struct RelinKey {
  KswKey k;
};

struct GaloisKeys {
  std::map<int, KswKey> by_step;
};

struct KeySet {
  PublicKey pk;
  RelinKey rk;
  GaloisKeys gk;
};

std::pair<SecretKey, KeySet> keygen(const Context& cx, uint64_t seed,
                                    const std::vector<int>& rotation_steps);

Plaintext encode(const Context& cx, std::span<const double> values, double scale, size_t level);
Plaintext encode_const(const Context& cx, double value, double scale, size_t level);
std::vector<double> decode(const Context& cx, const Plaintext& pt);

Ciphertext encrypt(const Context& cx, const PublicKey& pk, const Plaintext& pt,
                   std::mt19937_64& rng);
Plaintext decrypt(const Context& cx, const SecretKey& sk, const Ciphertext& ct);

Ciphertext eval_add(const Context& cx, const Ciphertext& a, const Ciphertext& b);
Ciphertext eval_sub(const Context& cx, const Ciphertext& a, const Ciphertext& b);
Ciphertext add_plain(const Context& cx, const Ciphertext& a, const Plaintext& p);
Ciphertext eval_mul(const Context& cx, const Ciphertext& a, const Ciphertext& b);
Ciphertext mul_plain(const Context& cx, const Ciphertext& a, const Plaintext& p);
Ciphertext relinearize(const Context& cx, const Ciphertext& a, const RelinKey& rk);
Ciphertext rescale(const Context& cx, const Ciphertext& a);
Ciphertext rotate(const Context& cx, const Ciphertext& a, int steps, const GaloisKeys& gk);

// Internals shared with keygen/tests.
uint32_t galois_element(const Context& cx, int steps);
RnsPoly apply_automorphism(const Context& cx, const RnsPoly& p, uint32_t g);
std::pair<RnsPoly, RnsPoly> key_switch(const Context& cx, const RnsPoly& c, const KswKey& key);

// Sampling (coeff-domain small polys reduced into each limb).
RnsPoly sample_ternary(const Context& cx, size_t level, std::mt19937_64& rng);
RnsPoly sample_gaussian(const Context& cx, size_t level, std::mt19937_64& rng);
RnsPoly sample_uniform(const Context& cx, size_t level, std::mt19937_64& rng);

}  // namespace secnn::ckks
