#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "secnn/gc_circuits.hpp"
#include "secnn/ot.hpp"
#include "secnn/transport.hpp"

namespace secnn::gcrt {

// 128-bit wire label.
struct Label {
  uint64_t lo = 0, hi = 0;

  friend Label operator^(const Label& a, const Label& b) { return {a.lo ^ b.lo, a.hi ^ b.hi}; }
  Label& operator^=(const Label& o) {
    lo ^= o.lo;
    hi ^= o.hi;
    return *this;
  }
  friend bool operator==(const Label& a, const Label& b) = default;
  int lsb() const { return (int)(lo & 1); }
};

Label random_label(std::mt19937_64& rng);

ot::Msg label_to_msg(const Label& l);
Label msg_to_label(const ot::Msg& m);

// Fixed-key block-cipher hash H(x, tweak) = E(x ^ t) ^ x ^ t with t the tweak
// block. The key is public and baked in; uniqueness comes from one tweak pair
// per AND gate.
Label hash_label(const Label& x, uint64_t tweak);

// One circuit garbled under a caller-supplied global offset (lsb(delta) = 1,
// so XOR and NOT are free). AND gates take two 16-byte rows each; everything
// else takes none.
struct StepGarbling {
  std::vector<std::vector<Label>> in0;  // zero-label per input group wire
  std::vector<Label> out0;              // zero-labels of the circuit outputs
  std::vector<Label> const_active;      // active labels of Const gates, gate order
  std::vector<uint8_t> tables;          // 32 bytes per AND gate
};

// preset: per input group, either empty (fresh labels are drawn) or a full
// zero-label vector (labels carried over from an earlier circuit's outputs).
// and_base numbers this circuit's AND gates inside the session tweak space.
StepGarbling garble_step(const gc::BooleanCircuit& c, uint64_t and_base, const Label& delta,
                         const std::vector<std::vector<Label>>& preset, std::mt19937_64& rng);

// Evaluation under active labels only; returns the active output labels.
std::vector<Label> eval_step(const gc::BooleanCircuit& c, uint64_t and_base,
                             std::span<const uint8_t> tables,
                             const std::vector<std::vector<Label>>& active_inputs,
                             std::span<const Label> const_active);

// decode bit k = lsb(out0[k]); plaintext bit = lsb(active) ^ decode bit
std::vector<uint8_t> decode_bits(const StepGarbling& g);
std::vector<uint8_t> decode_outputs(std::span<const Label> active,
                                    std::span<const uint8_t> decode);

// Interactive two-party run of a plan over one endpoint. The plan itself is
// public: both sides construct identical netlists and tweak numbering from
// it. Per call everything is regarbled from scratch: fresh delta, fresh
// labels, fresh tables.
//
// Flight schedule (evaluator speaks first):
//   per evaluator value v: choice request  ->,  <- transfer response
//   the first response flight also carries the garbler's input labels, the
//   last one the tables and the output decode bits, so the whole exchange is
//   2 * evaluator_count + 1 flights including the final reveal.
// The reveal sends the active output labels back so the garbler can check
// them against the real wire pairs (Err::LabelMismatch otherwise) and decode
// the same result.
struct SessionResult {
  std::vector<int64_t> outputs;
};

SessionResult run_garbler(transport::Endpoint& ep, const gc::Plan& plan,
                          const std::vector<int64_t>& garbler_vals, ot::Sender& sender,
                          uint64_t seed);
SessionResult run_evaluator(transport::Endpoint& ep, const gc::Plan& plan,
                            const std::vector<int64_t>& evaluator_vals, ot::Receiver& receiver);

// Table bytes one plan run ships, for accounting cross-checks.
size_t plan_table_bytes(const gc::Plan& plan);

}  // namespace secnn::gcrt
