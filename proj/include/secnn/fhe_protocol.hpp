#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "secnn/ckks.hpp"
#include "secnn/nn_model.hpp"
#include "secnn/transport.hpp"

namespace secnn::fhe {

// Encrypted inference in one round trip: the client ships parameters,
// evaluation keys, and an encrypted input in a single SETUP flight; the
// server evaluates the whole network under encryption and answers with one
// RESULT ciphertext. Nothing the server sees lets it decrypt.
//
// Packing: the input vector is replicated cyclically across all slots, so
// the three generalized diagonals of the hidden weight matrix turn the
// matrix-vector product into three rotate/multiply/add passes. The output
// dot product is a pointwise multiply followed by a log-depth rotation sum
// into slot zero. Total depth is four rescales: hidden layer, squaring,
// output layer, and the quadratic sigmoid (whose three terms are arranged
// to share one level).

// Rotation offsets the evaluation needs for hidden width h: 1 and 2 cover
// the width-3 input diagonals, powers of two below the padded hidden width
// cover the reduction.
std::vector<int> rotation_steps(int h);

class Client {
 public:
  // Generates a fresh key set; `hidden` fixes the rotation keys to ship.
  Client(const ckks::CkksParams& params, int hidden, uint64_t seed);

  // SETUP payload: parameters, public/relin/rotation keys, encrypted input.
  std::vector<uint8_t> setup_payload(std::span<const double> x);
  // FHE_INPUT payload: a fresh ciphertext under the keys already shipped.
  std::vector<uint8_t> input_payload(std::span<const double> x);
  // Decrypts a RESULT payload; the prediction sits in slot zero.
  double read_result(std::span<const uint8_t> payload) const;

 private:
  ckks::Ciphertext encrypt_input(std::span<const double> x);

  ckks::Context cx_;
  ckks::SecretKey sk_;
  ckks::KeySet keys_;
  std::mt19937_64 rng_;
};

class Server {
 public:
  explicit Server(const nn::Model& m);

  // SETUP: installs the parameters and keys, then answers the embedded input.
  std::vector<uint8_t> on_setup(std::span<const uint8_t> payload);
  // FHE_INPUT: answers under previously installed keys.
  std::vector<uint8_t> on_input(std::span<const uint8_t> payload);

 private:
  ckks::Ciphertext infer(const ckks::Ciphertext& ct_x) const;

  nn::Model model_;
  std::optional<ckks::Context> cx_;
  ckks::KeySet keys_;
};

// Endpoint drivers. With `reuse_keys` the client sends one SETUP and then an
// FHE_INPUT frame per remaining input; otherwise every inference is its own
// SETUP under fresh keys. Either way each inference costs exactly one round
// trip. The client closes the channel when done; the server loop returns once
// the peer is gone.
std::vector<double> run_fhe_client(transport::Endpoint& ep, const ckks::CkksParams& params,
                                   int hidden, const std::vector<std::vector<double>>& inputs,
                                   bool reuse_keys, uint64_t seed);
void run_fhe_server(transport::Endpoint& ep, const nn::Model& m);

}  // namespace secnn::fhe
