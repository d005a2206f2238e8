#include <cmath>

#include "secnn/ckks.hpp"

namespace secnn::ckks {

namespace {

constexpr double kSigma = 3.2;
constexpr double kSigmaBound = 6.0 * kSigma;

RnsPoly small_to_rns(const Context& cx, const std::vector<int64_t>& coeffs, size_t level) {
  RnsPoly p = RnsPoly::zero(cx.n(), level, Domain::Coeff);
  for (size_t l = 0; l < level; l++) {
    const Modulus& m = cx.mods[l];
    for (uint32_t i = 0; i < cx.n(); i++) p.limbs[l][i] = m.from_signed(coeffs[i]);
  }
  cx.to_eval(p);
  return p;
}

void mul_acc(const Context& cx, const RnsPoly& a, const RnsPoly& b, RnsPoly& acc) {
  for (size_t l = 0; l < acc.level(); l++) {
    const Modulus& m = cx.mods[l];
    for (uint32_t i = 0; i < cx.n(); i++)
      acc.limbs[l][i] = m.add(acc.limbs[l][i], m.mul(a.limbs[l][i], b.limbs[l][i]));
  }
}

RnsPoly mul_ew(const Context& cx, const RnsPoly& a, const RnsPoly& b, size_t level) {
  RnsPoly out = RnsPoly::zero(cx.n(), level, Domain::Eval);
  mul_acc(cx, a, b, out);
  return out;
}

void add_inplace(const Context& cx, RnsPoly& a, const RnsPoly& b) {
  for (size_t l = 0; l < a.level(); l++) {
    const Modulus& m = cx.mods[l];
    for (uint32_t i = 0; i < cx.n(); i++) a.limbs[l][i] = m.add(a.limbs[l][i], b.limbs[l][i]);
  }
}

void negate_inplace(const Context& cx, RnsPoly& a) {
  for (size_t l = 0; l < a.level(); l++) {
    const Modulus& m = cx.mods[l];
    for (uint32_t i = 0; i < cx.n(); i++) a.limbs[l][i] = m.neg(a.limbs[l][i]);
  }
}

// Key-switching key toward `target` (Eval domain, full level): component (j,t)
// encrypts 2^(digit_bits*t) * idem_j * target where idem_j is the CRT
// idempotent (1 on limb j, 0 elsewhere), so the same key serves every level
// prefix.
KswKey make_ksw_key(const Context& cx, const SecretKey& sk, const RnsPoly& target,
                    int digit_bits, std::mt19937_64& rng) {
  KswKey key;
  key.digit_bits = digit_bits;
  const size_t L = cx.chain_len();
  auto [counts, offsets] = cx.digit_layout(digit_bits);
  (void)offsets;
  for (size_t j = 0; j < L; j++) {
    const Modulus& mj = cx.mods[j];
    for (int t = 0; t < counts[j]; t++) {
      RnsPoly a = sample_uniform(cx, L, rng);
      RnsPoly b = sample_gaussian(cx, L, rng);  // e
      RnsPoly as = mul_ew(cx, a, sk.s, L);
      negate_inplace(cx, as);
      add_inplace(cx, b, as);  // b = e - a*s
      uint64_t shift = mj.pow(2, (uint64_t)digit_bits * (uint64_t)t);
      for (uint32_t i = 0; i < cx.n(); i++)
        b.limbs[j][i] = mj.add(b.limbs[j][i], mj.mul(shift, target.limbs[j][i]));
      key.comps.emplace_back(std::move(b), std::move(a));
    }
  }
  return key;
}

}  // namespace

RnsPoly sample_ternary(const Context& cx, size_t level, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-1, 1);
  std::vector<int64_t> c(cx.n());
  for (auto& v : c) v = d(rng);
  return small_to_rns(cx, c, level);
}

RnsPoly sample_gaussian(const Context& cx, size_t level, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, kSigma);
  std::vector<int64_t> c(cx.n());
  for (auto& v : c) {
    double x;
    do {
      x = d(rng);
    } while (std::abs(x) > kSigmaBound);
    v = std::llround(x);
  }
  return small_to_rns(cx, c, level);
}

RnsPoly sample_uniform(const Context& cx, size_t level, std::mt19937_64& rng) {
  RnsPoly p = RnsPoly::zero(cx.n(), level, Domain::Eval);
  for (size_t l = 0; l < level; l++) {
    std::uniform_int_distribution<uint64_t> d(0, cx.mods[l].q - 1);
    for (uint32_t i = 0; i < cx.n(); i++) p.limbs[l][i] = d(rng);
  }
  return p;
}

uint32_t galois_element(const Context& cx, int steps) {
  const uint32_t half = cx.slots();
  int64_t r = ((int64_t)steps % half + half) % half;
  uint64_t g = 1;
  const uint64_t m2n = 2ull * cx.n();
  for (int64_t k = 0; k < r; k++) g = (g * 5) % m2n;
  return (uint32_t)g;
}

RnsPoly apply_automorphism(const Context& cx, const RnsPoly& p, uint32_t g) {
  require(p.domain == Domain::Coeff, Err::InvalidArgument, "automorphism wants coeff domain");
  const uint32_t n = cx.n();
  RnsPoly out = RnsPoly::zero(n, p.level(), Domain::Coeff);
  for (size_t l = 0; l < p.level(); l++) {
    const Modulus& m = cx.mods[l];
    for (uint32_t i = 0; i < n; i++) {
      uint64_t idx = ((uint64_t)i * g) % (2ull * n);
      uint64_t v = p.limbs[l][i];
      if (idx < n)
        out.limbs[l][idx] = v;
      else
        out.limbs[l][idx - n] = m.neg(v);
    }
  }
  return out;
}

std::pair<SecretKey, KeySet> keygen(const Context& cx, uint64_t seed,
                                    const std::vector<int>& rotation_steps) {
  std::mt19937_64 rng(seed);
  const size_t L = cx.chain_len();

  SecretKey sk;
  sk.s = sample_ternary(cx, L, rng);
  sk.s_coeff = sk.s;
  cx.to_coeff(sk.s_coeff);

  KeySet ks;
  ks.pk.a = sample_uniform(cx, L, rng);
  RnsPoly e = sample_gaussian(cx, L, rng);
  RnsPoly as = mul_ew(cx, ks.pk.a, sk.s, L);
  negate_inplace(cx, as);
  add_inplace(cx, as, e);
  ks.pk.b = std::move(as);  // -(a*s) + e

  RnsPoly s2 = mul_ew(cx, sk.s, sk.s, L);
  ks.rk.k = make_ksw_key(cx, sk, s2, kRelinDigitBits, rng);

  for (int step : rotation_steps) {
    uint32_t g = galois_element(cx, step);
    RnsPoly srot = apply_automorphism(cx, sk.s_coeff, g);
    cx.to_eval(srot);
    ks.gk.by_step[step] = make_ksw_key(cx, sk, srot, kGaloisDigitBits, rng);
  }
  return {std::move(sk), std::move(ks)};
}

Ciphertext encrypt(const Context& cx, const PublicKey& pk, const Plaintext& pt,
                   std::mt19937_64& rng) {
  const size_t level = pt.level();
  require(level >= 1 && level <= cx.chain_len(), Err::LevelMismatch, "plaintext level invalid");
  RnsPoly u = sample_ternary(cx, level, rng);
  RnsPoly e0 = sample_gaussian(cx, level, rng);
  RnsPoly e1 = sample_gaussian(cx, level, rng);

  RnsPoly c0 = RnsPoly::zero(cx.n(), level, Domain::Eval);
  RnsPoly c1 = RnsPoly::zero(cx.n(), level, Domain::Eval);
  mul_acc(cx, pk.b, u, c0);
  add_inplace(cx, c0, e0);
  add_inplace(cx, c0, pt.poly);
  mul_acc(cx, pk.a, u, c1);
  add_inplace(cx, c1, e1);

  Ciphertext ct;
  ct.comps.push_back(std::move(c0));
  ct.comps.push_back(std::move(c1));
  ct.scale = pt.scale;
  return ct;
}

Plaintext decrypt(const Context& cx, const SecretKey& sk, const Ciphertext& ct) {
  require(!ct.comps.empty() && ct.size() <= 3, Err::InvalidArgument, "ciphertext malformed");
  const size_t level = ct.level();
  RnsPoly m = ct.comps[0];
  RnsPoly pw = sk.s;  // s^k, truncated to ct level inside mul
  RnsPoly acc = RnsPoly::zero(cx.n(), level, Domain::Eval);
  for (size_t k = 1; k < ct.size(); k++) {
    RnsPoly term = RnsPoly::zero(cx.n(), level, Domain::Eval);
    for (size_t l = 0; l < level; l++) {
      const Modulus& mm = cx.mods[l];
      for (uint32_t i = 0; i < cx.n(); i++)
        term.limbs[l][i] = mm.mul(ct.comps[k].limbs[l][i], pw.limbs[l][i]);
    }
    add_inplace(cx, acc, term);
    if (k + 1 < ct.size()) pw = mul_ew(cx, pw, sk.s, cx.chain_len());
  }
  add_inplace(cx, m, acc);
  return Plaintext{std::move(m), ct.scale};
}

}  // namespace secnn::ckks
