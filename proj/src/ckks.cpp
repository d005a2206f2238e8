#include "secnn/ckks.hpp"

#include <algorithm>
#include <cmath>

namespace secnn::ckks {

const std::vector<std::pair<uint32_t, int>>& degree_budget_table() {
  static const std::vector<std::pair<uint32_t, int>> table = {
      {1024, 27}, {2048, 54}, {4096, 109}, {8192, 218}, {16384, 438}, {32768, 881},
  };
  return table;
}

static int budget_for(uint32_t degree) {
  for (auto& [d, b] : degree_budget_table())
    if (d == degree) return b;
  return -1;
}

CkksParams make_params(uint32_t degree, const std::vector<int>& chain_bits, double initial_scale) {
  CkksParams p;
  p.degree = degree;
  p.chain_bits = chain_bits;
  p.initial_scale = initial_scale;
  require(degree >= 2 && (degree & (degree - 1)) == 0, Err::DegreeUnusable,
          "degree must be a power of two");
  std::vector<uint64_t> used;
  for (int bits : chain_bits) {
    uint64_t q = pick_ntt_prime(degree, bits, used);
    used.push_back(q);
  }
  p.primes = used;
  validate(p);
  return p;
}

void validate(const CkksParams& p) {
  require(p.degree >= 1024 && (p.degree & (p.degree - 1)) == 0, Err::DegreeUnusable,
          "degree must be a power of two >= 1024");
  int budget = budget_for(p.degree);
  require(budget >= 0, Err::DegreeUnusable, "degree has no security budget entry");
  // Degree 1024's 27-bit budget cannot hold even a one-prime usable chain
  // alongside a workable scale; reject it outright.
  require(p.degree >= 2048, Err::DegreeUnusable, "degree 1024 is below the usable floor");
  require(!p.chain_bits.empty() && p.chain_bits.size() == p.primes.size(), Err::InvalidArgument,
          "prime chain empty or inconsistent");
  long total = 0;
  for (int b : p.chain_bits) total += b;
  require(total <= budget, Err::BudgetExceeded,
          "chain bits " + std::to_string(total) + " exceed budget " + std::to_string(budget));
  require(p.initial_scale >= 2.0 && std::isfinite(p.initial_scale), Err::ScaleOutOfRange,
          "initial scale out of range");
  for (size_t i = 0; i < p.primes.size(); i++) {
    require(p.primes[i] % (2ull * p.degree) == 1, Err::InvalidArgument, "prime not ntt friendly");
    if (i > 0)
      require(p.initial_scale < (double)p.primes[i], Err::ScaleOutOfRange,
              "initial scale must sit below every non-first chain prime");
  }
}

CkksParams paper_preset() {
  return make_params(16384, {60, 40, 40, 40, 30, 30}, std::ldexp(1.0, 30));
}

CkksParams test_preset() {
  return make_params(4096, {40, 30, 30}, std::ldexp(1.0, 30));
}

Context::Context(CkksParams p) : params(std::move(p)) {
  validate(params);
  const uint32_t n = params.degree;
  for (uint64_t q : params.primes) {
    mods.emplace_back(q);
    ntts.emplace_back(n, q);
  }
  omega_pow.resize(n);
  zeta_pow.resize(2 * n);
  const double pi = std::acos(-1.0);
  for (uint32_t j = 0; j < 2 * n; j++)
    zeta_pow[j] = std::polar(1.0, pi * (double)j / (double)n);
  for (uint32_t j = 0; j < n; j++) omega_pow[j] = zeta_pow[(2 * j) % (2 * n)];
  rot_group.resize(n / 2);
  uint32_t g = 1;
  for (uint32_t k = 0; k < n / 2; k++) {
    rot_group[k] = g;
    g = (uint32_t)(((uint64_t)g * 5) % (2ull * n));
  }
}

std::pair<std::vector<int>, std::vector<int>> Context::digit_layout(int digit_bits) const {
  std::vector<int> counts, offsets;
  int off = 0;
  for (auto& m : mods) {
    offsets.push_back(off);
    int d = m.bits / digit_bits + 1;  // +1 digit absorbs the carries
    counts.push_back(d);
    off += d;
  }
  return {std::move(counts), std::move(offsets)};
}

void Context::to_eval(RnsPoly& p) const {
  if (p.domain == Domain::Eval) return;
  for (size_t l = 0; l < p.level(); l++) ntts[l].forward(p.limbs[l].data());
  p.domain = Domain::Eval;
}

void Context::to_coeff(RnsPoly& p) const {
  if (p.domain == Domain::Coeff) return;
  for (size_t l = 0; l < p.level(); l++) ntts[l].inverse(p.limbs[l].data());
  p.domain = Domain::Coeff;
}

// ---- canonical embedding ----

namespace {

// In-place radix-2 FFT; inverse includes the 1/n factor.
void fft(std::vector<std::complex<double>>& a, const Context& cx, bool inverse) {
  const uint32_t n = (uint32_t)a.size();
  for (uint32_t i = 1, j = 0; i < n; i++) {
    uint32_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const uint32_t full = cx.n();
  for (uint32_t len = 2; len <= n; len <<= 1) {
    uint32_t step = full / len;  // index stride into omega_pow
    for (uint32_t i = 0; i < n; i += len) {
      for (uint32_t k = 0; k < len / 2; k++) {
        uint32_t idx = (uint32_t)(((uint64_t)k * step) % full);
        std::complex<double> w = cx.omega_pow[idx];
        if (inverse) w = std::conj(w);
        auto u = a[i + k];
        auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= (double)n;
}

void check_level(const Context& cx, size_t level) {
  require(level >= 1 && level <= cx.chain_len(), Err::LevelMismatch, "level out of range");
}

}  // namespace

Plaintext encode(const Context& cx, std::span<const double> values, double scale, size_t level) {
  check_level(cx, level);
  require(scale >= 2.0 && std::isfinite(scale), Err::ScaleOutOfRange, "bad scale");
  const uint32_t n = cx.n(), slots = cx.slots();
  require(values.size() <= slots, Err::InvalidArgument, "too many values for slot count");

  std::vector<std::complex<double>> target(n, {0.0, 0.0});
  for (uint32_t k = 0; k < slots; k++) {
    double v = k < values.size() ? values[k] : 0.0;
    std::complex<double> z(v * scale, 0.0);
    uint32_t t = cx.rot_group[k];
    target[(t - 1) / 2] = z;
    target[(2 * n - t - 1) / 2] = std::conj(z);
  }
  fft(target, cx, /*inverse=*/true);

  RnsPoly poly = RnsPoly::zero(n, level, Domain::Coeff);
  for (uint32_t i = 0; i < n; i++) {
    // Undo the zeta^i pre-twist that folds the odd-power evaluation points
    // into a plain length-n DFT.
    std::complex<double> y = target[i] * std::conj(cx.zeta_pow[i]);
    double c = y.real();
    require(std::abs(c) < std::ldexp(1.0, 62), Err::ScaleOutOfRange,
            "encoded coefficient exceeds 62 bits");
    int64_t r = std::llround(c);  // rounds half away from zero
    for (size_t l = 0; l < level; l++) poly.limbs[l][i] = cx.mods[l].from_signed(r);
  }
  cx.to_eval(poly);
  return Plaintext{std::move(poly), scale};
}

Plaintext encode_const(const Context& cx, double value, double scale, size_t level) {
  check_level(cx, level);
  require(scale >= 2.0 && std::isfinite(scale) && scale < std::ldexp(1.0, 124),
          Err::ScaleOutOfRange, "bad scale");
  long double x = (long double)value * (long double)scale;
  require(std::abs((double)x) < std::ldexp(1.0, 124), Err::ScaleOutOfRange, "constant too large");

  // Exact per-limb residue of round(value*scale), which may exceed 64 bits:
  // split into a 63-bit mantissa times a power of two.
  RnsPoly poly = RnsPoly::zero(cx.n(), level, Domain::Eval);
  int exp = 0;
  long double frac = frexpl(x, &exp);  // x = frac * 2^exp
  int64_t mant;
  int shift;
  if (exp <= 62) {
    mant = llroundl(x);
    shift = 0;
  } else {
    mant = llroundl(ldexpl(frac, 62));  // 62-bit mantissa
    shift = exp - 62;
  }
  for (size_t l = 0; l < level; l++) {
    const Modulus& m = cx.mods[l];
    uint64_t r = m.mul(m.from_signed(mant), m.pow(2, (uint64_t)shift));
    // Constant polynomial: every NTT evaluation point equals the constant.
    std::fill(poly.limbs[l].begin(), poly.limbs[l].end(), r);
  }
  return Plaintext{std::move(poly), scale};
}

std::vector<double> decode(const Context& cx, const Plaintext& pt) {
  const uint32_t n = cx.n(), slots = cx.slots();
  const size_t level = pt.level();
  check_level(cx, level);
  require(pt.scale > 0, Err::ScaleOutOfRange, "plaintext scale unset");

  RnsPoly poly = pt.poly;
  cx.to_coeff(poly);

  std::vector<std::complex<double>> y(n);
  const Modulus& m0 = cx.mods[0];
  if (level == 1) {
    for (uint32_t i = 0; i < n; i++) {
      double c = (double)m0.to_centered(poly.limbs[0][i]);
      y[i] = cx.zeta_pow[i] * (c / pt.scale);
    }
  } else {
    // Two-limb CRT lift: exact for |coeff| < q0*q1/2, enough headroom for
    // every scale this pipeline produces.
    const Modulus& m1 = cx.mods[1];
    const unsigned __int128 q01 = (unsigned __int128)m0.q * m1.q;
    const uint64_t q0_inv_q1 = m1.inv(m0.q % m1.q);
    for (uint32_t i = 0; i < n; i++) {
      uint64_t c0 = poly.limbs[0][i], c1 = poly.limbs[1][i];
      uint64_t t = m1.mul(m1.sub(c1, c0 % m1.q), q0_inv_q1);
      unsigned __int128 v = (unsigned __int128)c0 + (unsigned __int128)m0.q * t;
      double c;
      if (v > q01 / 2) {
        unsigned __int128 neg = q01 - v;
        c = -(double)(uint64_t)(neg >> 64) * 1.8446744073709552e19 - (double)(uint64_t)neg;
      } else {
        c = (double)(uint64_t)(v >> 64) * 1.8446744073709552e19 + (double)(uint64_t)v;
      }
      y[i] = cx.zeta_pow[i] * (c / pt.scale);
    }
  }
  fft(y, cx, /*inverse=*/false);
  std::vector<double> out(slots);
  for (uint32_t k = 0; k < slots; k++) out[k] = y[(cx.rot_group[k] - 1) / 2].real();
  return out;
}

}  // namespace secnn::ckks
