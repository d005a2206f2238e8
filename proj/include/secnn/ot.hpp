#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "secnn/errors.hpp"

namespace secnn::ot {

using Msg = std::array<uint8_t, 16>;

struct MsgPair {
  Msg m0{}, m1{};
};

// Batched 1-of-2 oblivious transfer of 16-byte messages. One batch is one
// request/response exchange: the receiver commits to its choice bits in the
// request, the sender answers with ciphertexts of both messages per slot, and
// the receiver can open exactly the chosen one. Two flights per batch, always.
class Sender {
 public:
  virtual ~Sender() = default;
  // pairs[i] = (message for choice 0, message for choice 1)
  virtual std::vector<uint8_t> respond(std::span<const uint8_t> request,
                                       std::span<const MsgPair> pairs) = 0;
};

class Receiver {
 public:
  virtual ~Receiver() = default;
  // choices: one byte per transfer, 0 or 1. One batch may be in flight at a
  // time; finish() consumes the state armed by the matching make_request().
  virtual std::vector<uint8_t> make_request(std::span<const uint8_t> choices) = 0;
  virtual std::vector<Msg> finish(std::span<const uint8_t> response) = 0;
};

// Public-key instantiation over the 2048-bit safe-prime group (RFC 3526
// group 14), generator 4, with a fixed hash-derived second point so the
// receiver cannot know both discrete logs. Malformed group elements raise
// Err::ProtocolAbort.
std::unique_ptr<Sender> make_np_sender();
std::unique_ptr<Receiver> make_np_receiver();

// In-process trusted-dealer stand-in used by unit tests: same interface and
// flight pattern, no cryptography. The request leaks the choice bits.
std::pair<std::unique_ptr<Sender>, std::unique_ptr<Receiver>> make_dealer_pair();

inline constexpr size_t kGroupBytes = 256;
inline size_t np_request_bytes(size_t n) { return n * kGroupBytes; }
inline size_t np_response_bytes(size_t n) { return kGroupBytes + n * 32; }

}  // namespace secnn::ot
