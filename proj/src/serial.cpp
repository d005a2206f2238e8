#include "secnn/serial.hpp"

namespace secnn::serial {

namespace {

// Parse-side sanity bounds; anything past these is a corrupt or hostile
// payload, not a supported parameter set.
constexpr uint32_t kMaxDegree = 1u << 16;
constexpr size_t kMaxChain = 64;
constexpr size_t kMaxComps = 4096;

void check_counts(uint32_t n, size_t level) {
  require(n >= 2 && n <= kMaxDegree && (n & (n - 1)) == 0, Err::ParseError,
          "polynomial degree out of range");
  require(level >= 1 && level <= kMaxChain, Err::ParseError, "limb count out of range");
}

}  // namespace

void write_frame_header(ByteWriter& w, uint16_t kind, uint64_t payload_len) {
  w.u32(kFrameMagic);
  w.u16(kWireVersion);
  w.u16(kind);
  w.u64(payload_len);
}

FrameHeader read_frame_header(ByteReader& r) {
  require(r.u32() == kFrameMagic, Err::BadMagic, "frame does not start with the expected magic");
  uint16_t ver = r.u16();
  require(ver == kWireVersion, Err::VersionMismatch, "unsupported wire version");
  FrameHeader h;
  h.kind = r.u16();
  h.payload_len = r.u64();
  return h;
}

void write_params(ByteWriter& w, const ckks::CkksParams& p) {
  w.u32(p.degree);
  w.u32((uint32_t)p.chain_bits.size());
  for (int b : p.chain_bits) w.i32(b);
  w.u32((uint32_t)p.primes.size());
  for (uint64_t q : p.primes) w.u64(q);
  w.f64(p.initial_scale);
}

ckks::CkksParams read_params(ByteReader& r) {
  ckks::CkksParams p;
  p.degree = r.u32();
  size_t nb = r.u32();
  require(nb <= kMaxChain, Err::ParseError, "chain bit list too long");
  p.chain_bits.resize(nb);
  for (auto& b : p.chain_bits) b = r.i32();
  size_t np = r.u32();
  require(np <= kMaxChain, Err::ParseError, "prime list too long");
  p.primes.resize(np);
  for (auto& q : p.primes) q = r.u64();
  p.initial_scale = r.f64();
  return p;
}

void write_poly(ByteWriter& w, const ckks::RnsPoly& p) {
  w.u32(p.n);
  w.u8((uint8_t)p.domain);
  w.u32((uint32_t)p.limbs.size());
  for (const auto& limb : p.limbs)
    for (uint64_t c : limb) w.u64(c);
}

ckks::RnsPoly read_poly(ByteReader& r) {
  uint32_t n = r.u32();
  uint8_t dom = r.u8();
  require(dom <= 1, Err::ParseError, "bad polynomial domain tag");
  uint32_t level = r.u32();
  check_counts(n, level);
  ckks::RnsPoly p = ckks::RnsPoly::zero(n, level, (ckks::Domain)dom);
  for (auto& limb : p.limbs) {
    auto raw = r.bytes((size_t)n * 8);
    for (uint32_t i = 0; i < n; i++) {
      uint64_t v = 0;
      std::memcpy(&v, raw.data() + (size_t)i * 8, 8);
      limb[i] = v;
    }
  }
  return p;
}

void write_plaintext(ByteWriter& w, const ckks::Plaintext& p) {
  w.f64(p.scale);
  write_poly(w, p.poly);
}

ckks::Plaintext read_plaintext(ByteReader& r) {
  ckks::Plaintext p;
  p.scale = r.f64();
  p.poly = read_poly(r);
  return p;
}

void write_ciphertext(ByteWriter& w, const ckks::Ciphertext& c) {
  w.f64(c.scale);
  w.u32((uint32_t)c.comps.size());
  for (const auto& p : c.comps) write_poly(w, p);
}

ckks::Ciphertext read_ciphertext(ByteReader& r) {
  ckks::Ciphertext c;
  c.scale = r.f64();
  uint32_t nc = r.u32();
  require(nc >= 2 && nc <= 3, Err::ParseError, "ciphertext component count out of range");
  for (uint32_t i = 0; i < nc; i++) c.comps.push_back(read_poly(r));
  return c;
}

void write_public_key(ByteWriter& w, const ckks::PublicKey& k) {
  write_poly(w, k.b);
  write_poly(w, k.a);
}

ckks::PublicKey read_public_key(ByteReader& r) {
  ckks::PublicKey k;
  k.b = read_poly(r);
  k.a = read_poly(r);
  return k;
}

void write_ksw_key(ByteWriter& w, const ckks::KswKey& k) {
  w.u32((uint32_t)k.digit_bits);
  w.u32((uint32_t)k.comps.size());
  for (const auto& [b, a] : k.comps) {
    write_poly(w, b);
    write_poly(w, a);
  }
}

ckks::KswKey read_ksw_key(ByteReader& r) {
  ckks::KswKey k;
  k.digit_bits = (int)r.u32();
  require(k.digit_bits >= 1 && k.digit_bits <= 32, Err::ParseError, "bad digit width");
  uint32_t nc = r.u32();
  require(nc <= kMaxComps, Err::ParseError, "key component count out of range");
  for (uint32_t i = 0; i < nc; i++) {
    ckks::RnsPoly b = read_poly(r);
    ckks::RnsPoly a = read_poly(r);
    k.comps.emplace_back(std::move(b), std::move(a));
  }
  return k;
}

void write_galois_keys(ByteWriter& w, const ckks::GaloisKeys& k) {
  w.u32((uint32_t)k.by_step.size());
  for (const auto& [step, key] : k.by_step) {
    w.i32(step);
    write_ksw_key(w, key);
  }
}

ckks::GaloisKeys read_galois_keys(ByteReader& r) {
  ckks::GaloisKeys k;
  uint32_t n = r.u32();
  require(n <= 64, Err::ParseError, "rotation key count out of range");
  for (uint32_t i = 0; i < n; i++) {
    int step = r.i32();
    k.by_step[step] = read_ksw_key(r);
  }
  return k;
}

}  // namespace secnn::serial
