#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "secnn/errors.hpp"

namespace secnn::gc {

using u128 = unsigned __int128;

// Two's-complement fixed point: reals scaled by an integer factor.
struct FixedPointSpec {
  int width = 64;      // 32 or 64
  int64_t scale = 1000;
};

int64_t fixed_encode(double v, const FixedPointSpec& spec);  // Err::Overflow
double fixed_decode(int64_t v, const FixedPointSpec& spec);

enum class GateKind : uint8_t { Xor, And, Not, Const0, Const1 };

struct Gate {
  GateKind kind;
  uint32_t in0 = UINT32_MAX;  // unused for consts
  uint32_t in1 = UINT32_MAX;  // unused for Not/consts
  uint32_t out = 0;
};

// Gates are emitted in topological order; input wires come first in the wire
// numbering, then one new wire per gate. Party binding (who feeds which
// operand group) happens at the plan level, not here.
struct BooleanCircuit {
  uint32_t wire_count = 0;
  std::vector<Gate> gates;
  std::vector<std::vector<uint32_t>> input_groups;  // operand slots, LSB first
  std::vector<uint32_t> outputs;                    // LSB first
};

struct CircuitStats {
  uint64_t and_count = 0;
  uint64_t xor_count = 0;
  uint64_t not_count = 0;
  uint64_t const_count = 0;
  uint64_t total_gates = 0;
  uint64_t input_bits = 0;
  uint64_t output_bits = 0;
};

enum class NetKind : uint8_t { Add, Sub, Mul, DivScale, Relu, Poly2Sigmoid };
const char* net_kind_name(NetKind k);

// Operand/result widths in bits for a netlist kind: Mul widens to 2w,
// DivScale narrows back to w.
int operand_width(NetKind k, int slot, const FixedPointSpec& spec);
int result_width(NetKind k, const FixedPointSpec& spec);
bool is_binary(NetKind k);

BooleanCircuit build_netlist(NetKind kind, const FixedPointSpec& spec);
CircuitStats circuit_stats(const BooleanCircuit& c);

// Gate-by-gate evaluation over plain bits (0/1 per wire), the garbling oracle.
std::vector<uint8_t> eval_plain(const BooleanCircuit& c,
                                const std::vector<std::vector<uint8_t>>& inputs);

// Text dump for diffing: header with input/output maps, one gate per line.
std::string export_text(const BooleanCircuit& c);

std::vector<uint8_t> to_bits(u128 v, int width);  // LSB first
u128 from_bits(std::span<const uint8_t> bits);
int64_t bits_to_i64(std::span<const uint8_t> bits);  // sign-extends from the top bit

// Scalar reference semantics, the single source of truth the circuits are
// tested against and the straight-line model oracle reuses. All arithmetic
// wraps mod 2^128 (unsigned) exactly like the gate network.
int64_t ref_add(int64_t a, int64_t b, const FixedPointSpec& spec);
int64_t ref_sub(int64_t a, int64_t b, const FixedPointSpec& spec);
u128 ref_mul_full(int64_t a, int64_t b, const FixedPointSpec& spec);  // 2w-bit product
int64_t ref_divscale(u128 v, const FixedPointSpec& spec);  // trunc toward zero by scale
int64_t ref_relu(int64_t a, const FixedPointSpec& spec);
int64_t ref_poly2_sigmoid(int64_t z, const FixedPointSpec& spec);

// A plan is the execution schedule for one inference: an ordered list of
// netlist invocations. Step i's result is carried value i; carried values
// never leave the garbled domain between steps.
enum class Src : uint8_t { Garbler, Evaluator, Carried };
struct ValueRef {
  Src src = Src::Carried;
  uint32_t index = 0;
};
struct PlanStep {
  NetKind kind;
  ValueRef a, b;  // b ignored for unary kinds
};
struct Plan {
  FixedPointSpec spec;
  uint32_t garbler_count = 0;    // w-bit values supplied by the garbler
  uint32_t evaluator_count = 0;  // w-bit values supplied by the evaluator
  std::vector<PlanStep> steps;
  std::vector<ValueRef> outputs;
};

// Appends an affine layer (rows x cols) to the plan: per row, cols MUL+DIVSCALE
// against fresh garbler weight slots, a chain of cols-1 ADDs, an optional
// garbler bias ADD, then the activation netlist. Returns the row outputs.
std::vector<ValueRef> compose_layer(Plan& plan, uint32_t rows, uint32_t cols, bool with_bias,
                                    std::optional<NetKind> activation,
                                    const std::vector<ValueRef>& inputs);

int value_width(const Plan& plan, const ValueRef& ref);

// Executes the plan with gate-level circuit evaluation (no garbling); the
// cross-check target for both the garbled session and the model oracle.
std::vector<int64_t> eval_plan_plain(const Plan& plan, const std::vector<int64_t>& garbler_vals,
                                     const std::vector<int64_t>& evaluator_vals);

}  // namespace secnn::gc
