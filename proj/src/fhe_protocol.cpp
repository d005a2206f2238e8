#include "secnn/fhe_protocol.hpp"

#include "secnn/serial.hpp"

namespace secnn::fhe {

namespace {

// Smallest power of two >= h, the length of the rotation reduction.
int padded_width(int h) {
  int p = 1;
  while (p < h) p *= 2;
  return p;
}

std::vector<uint8_t> pack_ciphertext(const ckks::Ciphertext& ct) {
  serial::ByteWriter w;
  serial::write_ciphertext(w, ct);
  return w.take();
}

}  // namespace

std::vector<int> rotation_steps(int h) {
  require(h >= 1, Err::InvalidArgument, "hidden width must be positive");
  std::vector<int> steps{1, 2};
  for (int s = 1; s < padded_width(h); s *= 2)
    if (s != 1 && s != 2) steps.push_back(s);
  return steps;
}

Client::Client(const ckks::CkksParams& params, int hidden, uint64_t seed)
    : cx_(params), rng_(seed * 0x9E3779B97F4A7C15ull + 1) {
  auto [sk, keys] = ckks::keygen(cx_, seed, rotation_steps(hidden));
  sk_ = std::move(sk);
  keys_ = std::move(keys);
}

ckks::Ciphertext Client::encrypt_input(std::span<const double> x) {
  require(x.size() == 3, Err::DimMismatch, "input must have width 3");
  // Replicate the input with period 3 so every rotation the server applies
  // still sees x[(r + k) % 3] in slot r. Only the first few slots (well clear
  // of the wrap-around) ever feed the result.
  std::vector<double> slots(cx_.slots());
  for (size_t j = 0; j < slots.size(); j++) slots[j] = x[j % 3];
  ckks::Plaintext pt = ckks::encode(cx_, slots, cx_.params.initial_scale, cx_.chain_len());
  return ckks::encrypt(cx_, keys_.pk, pt, rng_);
}

std::vector<uint8_t> Client::setup_payload(std::span<const double> x) {
  serial::ByteWriter w;
  serial::write_params(w, cx_.params);
  serial::write_public_key(w, keys_.pk);
  serial::write_ksw_key(w, keys_.rk.k);
  serial::write_galois_keys(w, keys_.gk);
  serial::write_ciphertext(w, encrypt_input(x));
  return w.take();
}

std::vector<uint8_t> Client::input_payload(std::span<const double> x) {
  return pack_ciphertext(encrypt_input(x));
}

double Client::read_result(std::span<const uint8_t> payload) const {
  serial::ByteReader r(payload);
  ckks::Ciphertext ct = serial::read_ciphertext(r);
  r.expect_end();
  std::vector<double> slots = ckks::decode(cx_, ckks::decrypt(cx_, sk_, ct));
  return slots[0];
}

Server::Server(const nn::Model& m) : model_(m) { nn::validate_dims(model_); }

std::vector<uint8_t> Server::on_setup(std::span<const uint8_t> payload) {
  serial::ByteReader r(payload);
  ckks::CkksParams params = serial::read_params(r);
  cx_.emplace(params);  // validates the chain before anything touches it
  keys_.pk = serial::read_public_key(r);
  keys_.rk.k = serial::read_ksw_key(r);
  keys_.gk = serial::read_galois_keys(r);
  ckks::Ciphertext ct = serial::read_ciphertext(r);
  r.expect_end();
  return pack_ciphertext(infer(ct));
}

std::vector<uint8_t> Server::on_input(std::span<const uint8_t> payload) {
  require(cx_.has_value(), Err::ProtocolAbort, "input frame before any setup");
  serial::ByteReader r(payload);
  ckks::Ciphertext ct = serial::read_ciphertext(r);
  r.expect_end();
  return pack_ciphertext(infer(ct));
}

// The whole network under encryption. Plaintext multiplicands are encoded at
// the base scale, biases at whatever scale the ciphertext carries, so every
// addition lines up exactly and each stage spends one rescale.
ckks::Ciphertext Server::infer(const ckks::Ciphertext& ct_x) const {
  const ckks::Context& cx = *cx_;
  const double s0 = cx.params.initial_scale;
  const size_t slots = cx.slots();
  const int h = model_.h;
  require((size_t)padded_width(h) <= slots, Err::InvalidArgument,
          "hidden width exceeds slot capacity");

  // Hidden layer. Diagonal k of W1 (w.r.t. the width-3 input cycle) hits the
  // input rotated by k, so slot r accumulates sum_c W1[r][c] * x[c].
  ckks::Ciphertext acc;
  for (int k = 0; k < 3; k++) {
    ckks::Ciphertext xr = k == 0 ? ct_x : ckks::rotate(cx, ct_x, k, keys_.gk);
    std::vector<double> diag(slots, 0.0);
    for (int r = 0; r < h; r++) diag[r] = model_.W1[r][(r + k) % 3];
    ckks::Plaintext u = ckks::encode(cx, diag, s0, xr.level());
    ckks::Ciphertext term = ckks::mul_plain(cx, xr, u);
    acc = k == 0 ? std::move(term) : ckks::eval_add(cx, acc, term);
  }
  std::vector<double> bias(slots, 0.0);
  for (int r = 0; r < h; r++) bias[r] = model_.b1[r];
  acc = ckks::add_plain(cx, acc, ckks::encode(cx, bias, acc.scale, acc.level()));
  ckks::Ciphertext z = ckks::rescale(cx, acc);

  // Squaring activation.
  ckks::Ciphertext zz =
      ckks::rescale(cx, ckks::relinearize(cx, ckks::eval_mul(cx, z, z), keys_.rk));

  // Output neuron: pointwise weights, then fold the first padded_width(h)
  // slots into slot 0 by doubling strides. Slots past h are zero-coded, so
  // the fold picks up nothing spurious.
  std::vector<double> w2(slots, 0.0);
  for (int r = 0; r < h; r++) w2[r] = model_.W2[r];
  ckks::Ciphertext v = ckks::mul_plain(cx, zz, ckks::encode(cx, w2, s0, zz.level()));
  for (int s = 1; s < padded_width(h); s *= 2)
    v = ckks::eval_add(cx, v, ckks::rotate(cx, v, s, keys_.gk));
  v = ckks::add_plain(cx, v, ckks::encode_const(cx, model_.b2, v.scale, v.level()));
  ckks::Ciphertext u2 = ckks::rescale(cx, v);

  // 0.5 + 0.197 u - 0.004 u^2 on one level: the quadratic term is built as
  // u * (-0.004 u) so both products land on the same scale, u.scale^2 * s0.
  ckks::Ciphertext quad = ckks::relinearize(
      cx, ckks::eval_mul(cx, u2, ckks::mul_plain(cx, u2, ckks::encode_const(cx, -0.004, s0, u2.level()))),
      keys_.rk);
  ckks::Ciphertext lin =
      ckks::mul_plain(cx, u2, ckks::encode_const(cx, 0.197, u2.scale * s0, u2.level()));
  ckks::Ciphertext out = ckks::eval_add(cx, quad, lin);
  out = ckks::add_plain(cx, out, ckks::encode_const(cx, 0.5, out.scale, out.level()));
  return ckks::rescale(cx, out);
}

std::vector<double> run_fhe_client(transport::Endpoint& ep, const ckks::CkksParams& params,
                                   int hidden, const std::vector<std::vector<double>>& inputs,
                                   bool reuse_keys, uint64_t seed) {
  std::vector<double> results;
  results.reserve(inputs.size());
  std::optional<Client> client;
  for (size_t i = 0; i < inputs.size(); i++) {
    const bool fresh = !client.has_value() || !reuse_keys;
    if (fresh) client.emplace(params, hidden, seed + i);
    std::vector<uint8_t> payload =
        fresh ? client->setup_payload(inputs[i]) : client->input_payload(inputs[i]);
    ep.send(fresh ? transport::Kind::Setup : transport::Kind::FheInput, payload);
    auto [kind, resp] = ep.recv();
    require(kind == transport::Kind::Result, Err::ProtocolAbort, "expected a result frame");
    results.push_back(client->read_result(resp));
  }
  ep.close();
  return results;
}

void run_fhe_server(transport::Endpoint& ep, const nn::Model& m) {
  Server server(m);
  for (;;) {
    transport::Kind kind;
    std::vector<uint8_t> payload;
    try {
      std::tie(kind, payload) = ep.recv();
    } catch (const Error& e) {
      if (e.code == Err::ChannelClosed) return;
      throw;
    }
    std::vector<uint8_t> resp;
    if (kind == transport::Kind::Setup)
      resp = server.on_setup(payload);
    else if (kind == transport::Kind::FheInput)
      resp = server.on_input(payload);
    else
      fail(Err::ProtocolAbort, "unexpected frame kind");
    ep.send(transport::Kind::Result, resp);
  }
}

}  // namespace secnn::fhe
