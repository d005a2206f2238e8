#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "secnn/ckks.hpp"
#include "secnn/errors.hpp"

namespace secnn::serial {

// Wire format is little-endian throughout. Every message starts with a 16-byte
// frame header: [u32 magic][u16 version][u16 kind][u64 payload_len].
inline constexpr uint32_t kFrameMagic = 0x314E4E53;  // "SNN1" on the wire
inline constexpr uint16_t kWireVersion = 1;
inline constexpr size_t kFrameHeaderBytes = 16;
inline constexpr uint64_t kDefaultFrameCap = 1ull << 30;

class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u16(uint16_t v) { le(v, 2); }
  void u32(uint32_t v) { le(v, 4); }
  void u64(uint64_t v) { le(v, 8); }
  void i32(int32_t v) { le((uint32_t)v, 4); }
  void f64(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
  void bytes(std::span<const uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

  size_t size() const { return buf_.size(); }
  std::vector<uint8_t> take() { return std::move(buf_); }
  const std::vector<uint8_t>& view() const { return buf_; }

 private:
  void le(uint64_t v, int n) {
    for (int i = 0; i < n; i++) buf_.push_back((uint8_t)(v >> (8 * i)));
  }
  std::vector<uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t u8() { return (uint8_t)le(1); }
  uint16_t u16() { return (uint16_t)le(2); }
  uint32_t u32() { return (uint32_t)le(4); }
  uint64_t u64() { return le(8); }
  int32_t i32() { return (int32_t)le(4); }
  double f64() {
    uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::span<const uint8_t> bytes(size_t n) {
    require(remaining() >= n, Err::TruncatedPayload, "byte run past end of payload");
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  size_t remaining() const { return data_.size() - pos_; }
  void expect_end() const {
    require(remaining() == 0, Err::ParseError, "trailing bytes after payload");
  }

 private:
  uint64_t le(int n) {
    require(remaining() >= (size_t)n, Err::TruncatedPayload, "integer runs past end of payload");
    uint64_t v = 0;
    for (int i = 0; i < n; i++) v |= (uint64_t)data_[pos_ + i] << (8 * i);
    pos_ += n;
    return v;
  }
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

struct FrameHeader {
  uint16_t kind = 0;
  uint64_t payload_len = 0;
};

void write_frame_header(ByteWriter& w, uint16_t kind, uint64_t payload_len);
FrameHeader read_frame_header(ByteReader& r);  // Err::BadMagic / Err::VersionMismatch

// CKKS object codecs. Secret keys deliberately have none.
void write_params(ByteWriter& w, const ckks::CkksParams& p);
ckks::CkksParams read_params(ByteReader& r);

void write_poly(ByteWriter& w, const ckks::RnsPoly& p);
ckks::RnsPoly read_poly(ByteReader& r);

void write_plaintext(ByteWriter& w, const ckks::Plaintext& p);
ckks::Plaintext read_plaintext(ByteReader& r);

void write_ciphertext(ByteWriter& w, const ckks::Ciphertext& c);
ckks::Ciphertext read_ciphertext(ByteReader& r);

void write_public_key(ByteWriter& w, const ckks::PublicKey& k);
ckks::PublicKey read_public_key(ByteReader& r);

void write_ksw_key(ByteWriter& w, const ckks::KswKey& k);
ckks::KswKey read_ksw_key(ByteReader& r);

void write_galois_keys(ByteWriter& w, const ckks::GaloisKeys& k);
ckks::GaloisKeys read_galois_keys(ByteReader& r);

}  // namespace secnn::serial
