#include "secnn/ot.hpp"

#include <cstring>

#include <gmp.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

namespace secnn::ot {

namespace {

// RFC 3526, 2048-bit MODP group. Safe prime; 4 generates the prime-order
// quadratic-residue subgroup.
const char* kPrimeHex =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD1"
    "29024E088A67CC74020BBEA63B139B22514A08798E3404DD"
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245"
    "E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3D"
    "C2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F"
    "83655D23DCA3AD961C62F356208552BB9ED529077096966D"
    "670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9"
    "DE2BCBF6955817183995497CEA956AE515D2261898FA0510"
    "15728E5A8AACAA68FFFFFFFFFFFFFFFF";

struct Bn {
  mpz_t z;
  Bn() { mpz_init(z); }
  explicit Bn(unsigned long v) { mpz_init_set_ui(z, v); }
  Bn(const Bn& o) { mpz_init_set(z, o.z); }
  Bn& operator=(const Bn& o) {
    mpz_set(z, o.z);
    return *this;
  }
  ~Bn() { mpz_clear(z); }
};

struct Group {
  Bn p, g;
  Bn c;  // second point; discrete log unknown to everyone
  Group() {
    mpz_set_str(p.z, kPrimeHex, 16);
    mpz_set_ui(g.z, 4);
    // hash-to-group: SHA-256 counter stream -> value mod p, then squared so
    // the point lands in the QR subgroup
    std::vector<uint8_t> buf;
    const char tag[] = "transfer-point-v1";
    for (uint8_t ctr = 0; ctr < 9; ctr++) {
      uint8_t in[sizeof(tag)];
      std::memcpy(in, tag, sizeof(tag) - 1);
      in[sizeof(tag) - 1] = ctr;
      uint8_t block[32];
      unsigned len = 0;
      EVP_Digest(in, sizeof(in), block, &len, EVP_sha256(), nullptr);
      buf.insert(buf.end(), block, block + len);
    }
    Bn x;
    mpz_import(x.z, buf.size(), 1, 1, 0, 0, buf.data());
    mpz_mod(x.z, x.z, p.z);
    mpz_powm_ui(c.z, x.z, 2, p.z);
  }
};

const Group& group() {
  static Group g;
  return g;
}

Bn random_exponent() {
  uint8_t buf[32];
  require(RAND_bytes(buf, sizeof(buf)) == 1, Err::ProtocolAbort, "entropy source failed");
  Bn k;
  mpz_import(k.z, sizeof(buf), 1, 1, 0, 0, buf);
  mpz_add_ui(k.z, k.z, 1);  // never zero
  return k;
}

void export_elem(uint8_t* out, const Bn& v) {
  std::memset(out, 0, kGroupBytes);
  size_t n = (mpz_sizeinbase(v.z, 2) + 7) / 8;
  require(n <= kGroupBytes, Err::ProtocolAbort, "group element out of range");
  mpz_export(out + (kGroupBytes - n), nullptr, 1, 1, 0, 0, v.z);
}

Bn import_elem(const uint8_t* in) {
  const Group& G = group();
  Bn v;
  mpz_import(v.z, kGroupBytes, 1, 1, 0, 0, in);
  require(mpz_cmp_ui(v.z, 1) > 0, Err::ProtocolAbort, "group element out of range");
  Bn pm1 = G.p;
  mpz_sub_ui(pm1.z, pm1.z, 1);
  require(mpz_cmp(v.z, pm1.z) < 0, Err::ProtocolAbort, "group element out of range");
  require(mpz_legendre(v.z, G.p.z) == 1, Err::ProtocolAbort,
          "group element outside the prime-order subgroup");
  return v;
}

Msg kdf(const Bn& elem, uint32_t index, uint8_t which) {
  uint8_t in[kGroupBytes + 5];
  export_elem(in, elem);
  in[kGroupBytes] = (uint8_t)index;
  in[kGroupBytes + 1] = (uint8_t)(index >> 8);
  in[kGroupBytes + 2] = (uint8_t)(index >> 16);
  in[kGroupBytes + 3] = (uint8_t)(index >> 24);
  in[kGroupBytes + 4] = which;
  uint8_t block[32];
  unsigned len = 0;
  EVP_Digest(in, sizeof(in), block, &len, EVP_sha256(), nullptr);
  Msg m;
  std::memcpy(m.data(), block, m.size());
  return m;
}

Msg xor_msg(const Msg& a, const Msg& b) {
  Msg r;
  for (size_t i = 0; i < r.size(); i++) r[i] = a[i] ^ b[i];
  return r;
}

class NpSender final : public Sender {
 public:
  std::vector<uint8_t> respond(std::span<const uint8_t> request,
                               std::span<const MsgPair> pairs) override {
    const Group& G = group();
    require(request.size() == np_request_bytes(pairs.size()), Err::ProtocolAbort,
            "request size does not match batch");
    require(!pairs.empty(), Err::InvalidArgument, "empty batch");

    Bn r = random_exponent();
    Bn gr, cr;
    mpz_powm(gr.z, G.g.z, r.z, G.p.z);
    mpz_powm(cr.z, G.c.z, r.z, G.p.z);

    std::vector<uint8_t> out(np_response_bytes(pairs.size()));
    export_elem(out.data(), gr);
    for (size_t i = 0; i < pairs.size(); i++) {
      Bn pk0 = import_elem(request.data() + i * kGroupBytes);
      // pk1 = c / pk0, so key1 = (c^r) / (pk0^r): one inversion, two powms
      Bn k0, k1;
      mpz_powm(k0.z, pk0.z, r.z, G.p.z);
      mpz_invert(k1.z, k0.z, G.p.z);
      mpz_mul(k1.z, k1.z, cr.z);
      mpz_mod(k1.z, k1.z, G.p.z);
      Msg e0 = xor_msg(pairs[i].m0, kdf(k0, (uint32_t)i, 0));
      Msg e1 = xor_msg(pairs[i].m1, kdf(k1, (uint32_t)i, 1));
      uint8_t* slot = out.data() + kGroupBytes + i * 32;
      std::memcpy(slot, e0.data(), 16);
      std::memcpy(slot + 16, e1.data(), 16);
    }
    return out;
  }
};

class NpReceiver final : public Receiver {
 public:
  std::vector<uint8_t> make_request(std::span<const uint8_t> choices) override {
    const Group& G = group();
    require(!choices.empty(), Err::InvalidArgument, "empty batch");
    require(!armed_, Err::ProtocolAbort, "batch already in flight");
    choices_.assign(choices.begin(), choices.end());
    for (uint8_t c : choices_)
      require(c <= 1, Err::InvalidArgument, "choice bits must be 0 or 1");

    keys_.clear();
    std::vector<uint8_t> out(np_request_bytes(choices.size()));
    for (size_t i = 0; i < choices_.size(); i++) {
      Bn k = random_exponent();
      Bn pk, pk0;
      mpz_powm(pk.z, G.g.z, k.z, G.p.z);
      if (choices_[i]) {
        // send c/g^k so the chosen slot is the one with a known exponent
        mpz_invert(pk0.z, pk.z, G.p.z);
        mpz_mul(pk0.z, pk0.z, G.c.z);
        mpz_mod(pk0.z, pk0.z, G.p.z);
      } else {
        pk0 = pk;
      }
      export_elem(out.data() + i * kGroupBytes, pk0);
      keys_.push_back(k);
    }
    armed_ = true;
    return out;
  }

  std::vector<Msg> finish(std::span<const uint8_t> response) override {
    const Group& G = group();
    require(armed_, Err::ProtocolAbort, "no batch in flight");
    armed_ = false;
    require(response.size() == np_response_bytes(choices_.size()), Err::ProtocolAbort,
            "response size does not match batch");
    Bn gr = import_elem(response.data());
    std::vector<Msg> out(choices_.size());
    for (size_t i = 0; i < choices_.size(); i++) {
      Bn shared;
      mpz_powm(shared.z, gr.z, keys_[i].z, G.p.z);
      Msg e;
      std::memcpy(e.data(), response.data() + kGroupBytes + i * 32 + (choices_[i] ? 16 : 0),
                  16);
      out[i] = xor_msg(e, kdf(shared, (uint32_t)i, choices_[i]));
    }
    return out;
  }

 private:
  bool armed_ = false;
  std::vector<uint8_t> choices_;
  std::vector<Bn> keys_;
};

// Dealer backend: the "request" is the raw choice vector and the "response"
// carries the chosen messages in the clear.
class DealerSender final : public Sender {
 public:
  std::vector<uint8_t> respond(std::span<const uint8_t> request,
                               std::span<const MsgPair> pairs) override {
    require(request.size() == pairs.size(), Err::ProtocolAbort,
            "request size does not match batch");
    std::vector<uint8_t> out(pairs.size() * 16);
    for (size_t i = 0; i < pairs.size(); i++) {
      require(request[i] <= 1, Err::ProtocolAbort, "choice bits must be 0 or 1");
      const Msg& m = request[i] ? pairs[i].m1 : pairs[i].m0;
      std::memcpy(out.data() + i * 16, m.data(), 16);
    }
    return out;
  }
};

class DealerReceiver final : public Receiver {
 public:
  std::vector<uint8_t> make_request(std::span<const uint8_t> choices) override {
    require(!armed_, Err::ProtocolAbort, "batch already in flight");
    armed_ = true;
    count_ = choices.size();
    return {choices.begin(), choices.end()};
  }
  std::vector<Msg> finish(std::span<const uint8_t> response) override {
    require(armed_, Err::ProtocolAbort, "no batch in flight");
    armed_ = false;
    require(response.size() == count_ * 16, Err::ProtocolAbort,
            "response size does not match batch");
    std::vector<Msg> out(count_);
    for (size_t i = 0; i < count_; i++) std::memcpy(out[i].data(), response.data() + i * 16, 16);
    return out;
  }

 private:
  bool armed_ = false;
  size_t count_ = 0;
};

}  // namespace

std::unique_ptr<Sender> make_np_sender() { return std::make_unique<NpSender>(); }
std::unique_ptr<Receiver> make_np_receiver() { return std::make_unique<NpReceiver>(); }

std::pair<std::unique_ptr<Sender>, std::unique_ptr<Receiver>> make_dealer_pair() {
  return {std::make_unique<DealerSender>(), std::make_unique<DealerReceiver>()};
}

}  // namespace secnn::ot
