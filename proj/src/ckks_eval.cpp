#include <cmath>

#include "secnn/ckks.hpp"

namespace secnn::ckks {

namespace {

constexpr double kScaleRelTol = 9.5367431640625e-07;  // 2^-20

void check_binary(const Context& cx, const Ciphertext& a, const Ciphertext& b, bool scales) {
  (void)cx;
  require(a.level() == b.level(), Err::LevelMismatch, "operand levels differ");
  if (scales) {
    double rel = std::abs(a.scale - b.scale) / std::max(a.scale, b.scale);
    require(rel <= kScaleRelTol, Err::ScaleMismatch, "operand scales differ");
  }
}

RnsPoly ew_bin(const Context& cx, const RnsPoly& a, const RnsPoly& b, bool addop) {
  RnsPoly out = RnsPoly::zero(cx.n(), a.level(), Domain::Eval);
  for (size_t l = 0; l < a.level(); l++) {
    const Modulus& m = cx.mods[l];
    for (uint32_t i = 0; i < cx.n(); i++)
      out.limbs[l][i] = addop ? m.add(a.limbs[l][i], b.limbs[l][i])
                              : m.sub(a.limbs[l][i], b.limbs[l][i]);
  }
  return out;
}

RnsPoly ew_mul(const Context& cx, const RnsPoly& a, const RnsPoly& b) {
  RnsPoly out = RnsPoly::zero(cx.n(), a.level(), Domain::Eval);
  for (size_t l = 0; l < a.level(); l++) {
    const Modulus& m = cx.mods[l];
    for (uint32_t i = 0; i < cx.n(); i++) out.limbs[l][i] = m.mul(a.limbs[l][i], b.limbs[l][i]);
  }
  return out;
}

void ew_mul_acc(const Context& cx, const RnsPoly& a, const RnsPoly& b, RnsPoly& acc) {
  for (size_t l = 0; l < acc.level(); l++) {
    const Modulus& m = cx.mods[l];
    const uint64_t* pa = a.limbs[l].data();
    const uint64_t* pb = b.limbs[l].data();
    uint64_t* pc = acc.limbs[l].data();
    for (uint32_t i = 0; i < cx.n(); i++) pc[i] = m.add(pc[i], m.mul(pa[i], pb[i]));
  }
}

Ciphertext map_bin(const Context& cx, const Ciphertext& a, const Ciphertext& b, bool addop) {
  check_binary(cx, a, b, /*scales=*/true);
  require(a.size() == b.size(), Err::InvalidArgument, "component counts differ");
  Ciphertext out;
  out.scale = a.scale;
  for (size_t k = 0; k < a.size(); k++) out.comps.push_back(ew_bin(cx, a.comps[k], b.comps[k], addop));
  return out;
}

}  // namespace

Ciphertext eval_add(const Context& cx, const Ciphertext& a, const Ciphertext& b) {
  return map_bin(cx, a, b, true);
}

Ciphertext eval_sub(const Context& cx, const Ciphertext& a, const Ciphertext& b) {
  return map_bin(cx, a, b, false);
}

Ciphertext add_plain(const Context& cx, const Ciphertext& a, const Plaintext& p) {
  require(a.level() == p.level(), Err::LevelMismatch, "plaintext level differs");
  double rel = std::abs(a.scale - p.scale) / std::max(a.scale, p.scale);
  require(rel <= kScaleRelTol, Err::ScaleMismatch, "plaintext scale differs");
  Ciphertext out = a;
  out.comps[0] = ew_bin(cx, a.comps[0], p.poly, true);
  return out;
}

Ciphertext mul_plain(const Context& cx, const Ciphertext& a, const Plaintext& p) {
  require(a.level() == p.level(), Err::LevelMismatch, "plaintext level differs");
  Ciphertext out;
  out.scale = a.scale * p.scale;
  for (auto& c : a.comps) out.comps.push_back(ew_mul(cx, c, p.poly));
  return out;
}

Ciphertext eval_mul(const Context& cx, const Ciphertext& a, const Ciphertext& b) {
  check_binary(cx, a, b, /*scales=*/false);
  require(a.size() == 2 && b.size() == 2, Err::InvalidArgument,
          "eval_mul expects 2-component operands (relinearize first)");
  require(a.level() >= 2, Err::LevelExhausted, "no prime left to support the product");
  Ciphertext out;
  out.scale = a.scale * b.scale;
  out.comps.push_back(ew_mul(cx, a.comps[0], b.comps[0]));
  RnsPoly d1 = ew_mul(cx, a.comps[0], b.comps[1]);
  RnsPoly d1b = ew_mul(cx, a.comps[1], b.comps[0]);
  out.comps.push_back(ew_bin(cx, d1, d1b, true));
  out.comps.push_back(ew_mul(cx, a.comps[1], b.comps[1]));
  return out;
}

// Balanced base-2^w digit decomposition of `c` (Eval in, level limbs), w taken
// from the key, then inner product with the key components for limbs < level.
std::pair<RnsPoly, RnsPoly> key_switch(const Context& cx, const RnsPoly& c, const KswKey& key) {
  const size_t level = c.level();
  const uint32_t n = cx.n();
  const int w = key.digit_bits;
  const uint64_t mask = (1ull << w) - 1;
  const int half = 1 << (w - 1);
  auto [counts, offsets] = cx.digit_layout(w);
  RnsPoly cc = c;
  cx.to_coeff(cc);

  RnsPoly acc0 = RnsPoly::zero(n, level, Domain::Eval);
  RnsPoly acc1 = RnsPoly::zero(n, level, Domain::Eval);
  std::vector<int> digit(n);
  RnsPoly dpoly = RnsPoly::zero(n, level, Domain::Coeff);

  for (size_t j = 0; j < level; j++) {
    const int nd = counts[j];
    std::vector<uint64_t> rem = cc.limbs[j];
    for (int t = 0; t < nd; t++) {
      if (t + 1 < nd) {
        for (uint32_t i = 0; i < n; i++) {
          uint64_t cur = rem[i];
          int d = (int)(cur & mask);
          cur >>= w;
          if (d >= half) {
            d -= half * 2;
            cur++;
          }
          digit[i] = d;
          rem[i] = cur;
        }
      } else {
        for (uint32_t i = 0; i < n; i++) digit[i] = (int)rem[i];  // carry-absorbing top digit
      }
      dpoly.domain = Domain::Coeff;
      for (size_t l = 0; l < level; l++) {
        const Modulus& m = cx.mods[l];
        for (uint32_t i = 0; i < n; i++) {
          int d = digit[i];
          dpoly.limbs[l][i] = d >= 0 ? (uint64_t)d : m.q - (uint64_t)(-d);
        }
      }
      cx.to_eval(dpoly);
      const auto& comp = key.comps[(size_t)offsets[j] + (size_t)t];
      ew_mul_acc(cx, dpoly, comp.first, acc0);
      ew_mul_acc(cx, dpoly, comp.second, acc1);
    }
  }
  return {std::move(acc0), std::move(acc1)};
}

Ciphertext relinearize(const Context& cx, const Ciphertext& a, const RelinKey& rk) {
  require(a.size() == 3, Err::InvalidArgument, "relinearize expects a 3-component ciphertext");
  require(!rk.k.empty(), Err::RelinKeyMissing, "relinearization key not provided");
  auto [d0, d1] = key_switch(cx, a.comps[2], rk.k);
  Ciphertext out;
  out.scale = a.scale;
  out.comps.push_back(ew_bin(cx, a.comps[0], d0, true));
  out.comps.push_back(ew_bin(cx, a.comps[1], d1, true));
  return out;
}

Ciphertext rescale(const Context& cx, const Ciphertext& a) {
  const size_t level = a.level();
  require(level >= 2, Err::LevelExhausted, "rescale needs a prime to drop");
  const Modulus& last = cx.mods[level - 1];
  const uint64_t half = last.q >> 1;

  Ciphertext out;
  out.scale = a.scale / (double)last.q;
  for (auto& comp : a.comps) {
    RnsPoly cc = comp;
    cx.to_coeff(cc);
    RnsPoly res = RnsPoly::zero(cx.n(), level - 1, Domain::Coeff);
    for (size_t l = 0; l < level - 1; l++) {
      const Modulus& m = cx.mods[l];
      const uint64_t qinv = m.inv(last.q % m.q);
      for (uint32_t i = 0; i < cx.n(); i++) {
        uint64_t r = cc.limbs[level - 1][i];
        // centered representative of the dropped limb, reduced mod q_l
        uint64_t rmod = r <= half ? r % m.q : m.neg((last.q - r) % m.q);
        uint64_t diff = m.sub(cc.limbs[l][i], rmod);
        res.limbs[l][i] = m.mul(diff, qinv);
      }
    }
    cx.to_eval(res);
    out.comps.push_back(std::move(res));
  }
  return out;
}

Ciphertext rotate(const Context& cx, const Ciphertext& a, int steps, const GaloisKeys& gk) {
  require(a.size() == 2, Err::InvalidArgument, "rotate expects a 2-component ciphertext");
  if (steps % (int)cx.slots() == 0) return a;
  auto it = gk.by_step.find(steps);
  require(it != gk.by_step.end(), Err::GaloisKeyMissing,
          "no galois key for step " + std::to_string(steps));
  const uint32_t g = galois_element(cx, steps);

  RnsPoly c0 = a.comps[0], c1 = a.comps[1];
  cx.to_coeff(c0);
  cx.to_coeff(c1);
  RnsPoly r0 = apply_automorphism(cx, c0, g);
  RnsPoly r1 = apply_automorphism(cx, c1, g);
  cx.to_eval(r0);
  cx.to_eval(r1);

  auto [d0, d1] = key_switch(cx, r1, it->second);
  Ciphertext out;
  out.scale = a.scale;
  out.comps.push_back(ew_bin(cx, r0, d0, true));
  out.comps.push_back(std::move(d1));
  return out;
}

}  // namespace secnn::ckks
