#include "secnn/gc_circuits.hpp"

#include <cmath>
#include <sstream>

namespace secnn::gc {

namespace {

u128 width_mask(int bits) {
  return bits >= 128 ? ~(u128)0 : (((u128)1 << bits) - 1);
}

int64_t wrap_i(u128 v, int bits) {
  v &= width_mask(bits);
  if (bits < 128 && (v >> (bits - 1)) & 1) v |= ~width_mask(bits);
  return (int64_t)(uint64_t)v;
}

// Truncating signed division of a `bits`-wide two's-complement value by a
// positive constant, result wrapped to the same width: |v|/d with the sign
// restored, exactly what the division circuit computes.
u128 sdiv_wrapped(u128 v, uint64_t d, int bits) {
  u128 mask = width_mask(bits);
  v &= mask;
  bool neg = (v >> (bits - 1)) & 1;
  u128 mag = neg ? (0 - v) & mask : v;
  u128 q = mag / d;
  return (neg ? (0 - q) : q) & mask;
}

int bit_length(uint64_t v) {
  int n = 0;
  while (v) {
    n++;
    v >>= 1;
  }
  return n;
}

struct SigmoidConsts {
  int64_t c0, c1, c2;
  uint64_t d1, d2;
};

SigmoidConsts sigmoid_consts(const FixedPointSpec& spec) {
  SigmoidConsts k;
  k.c0 = (int64_t)std::llround(0.5 * (double)spec.scale);
  k.c1 = (int64_t)std::llround(0.197 * (double)spec.scale);
  k.c2 = (int64_t)std::llround(0.004 * (double)spec.scale);
  k.d1 = (uint64_t)spec.scale;
  k.d2 = (uint64_t)spec.scale * (uint64_t)spec.scale;
  return k;
}

void check_spec(const FixedPointSpec& spec) {
  require(spec.width == 32 || spec.width == 64, Err::WidthMismatch,
          "unsupported fixed-point width");
  require(spec.scale >= 1, Err::InvalidArgument, "fixed-point scale must be positive");
}

struct Builder {
  BooleanCircuit c;
  uint32_t k0 = UINT32_MAX, k1 = UINT32_MAX;

  std::vector<uint32_t> input(int width) {
    std::vector<uint32_t> g((size_t)width);
    for (auto& w : g) w = c.wire_count++;
    c.input_groups.push_back(g);
    return g;
  }
  uint32_t emit(GateKind k, uint32_t a, uint32_t b) {
    uint32_t o = c.wire_count++;
    c.gates.push_back({k, a, b, o});
    return o;
  }
  uint32_t xor_(uint32_t a, uint32_t b) { return emit(GateKind::Xor, a, b); }
  uint32_t and_(uint32_t a, uint32_t b) { return emit(GateKind::And, a, b); }
  uint32_t not_(uint32_t a) { return emit(GateKind::Not, a, UINT32_MAX); }
  uint32_t const0() {
    if (k0 == UINT32_MAX) k0 = emit(GateKind::Const0, UINT32_MAX, UINT32_MAX);
    return k0;
  }
  uint32_t const1() {
    if (k1 == UINT32_MAX) k1 = emit(GateKind::Const1, UINT32_MAX, UINT32_MAX);
    return k1;
  }
  std::vector<uint32_t> const_bits(u128 v, int width) {
    std::vector<uint32_t> out((size_t)width);
    for (int i = 0; i < width; i++) out[i] = ((v >> i) & 1) ? const1() : const0();
    return out;
  }
  std::vector<uint32_t> not_vec(const std::vector<uint32_t>& a) {
    std::vector<uint32_t> out(a.size());
    for (size_t i = 0; i < a.size(); i++) out[i] = not_(a[i]);
    return out;
  }

  // Ripple adder; one AND per bit via the shared-carry trick
  // c' = c XOR ((a XOR c) AND (b XOR c)). The final carry is skipped unless
  // the caller asks for it.
  std::vector<uint32_t> add(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                            uint32_t cin, uint32_t* carry_out = nullptr) {
    size_t w = a.size();
    std::vector<uint32_t> s(w);
    uint32_t carry = cin;
    for (size_t i = 0; i < w; i++) {
      uint32_t axc = xor_(a[i], carry);
      s[i] = xor_(axc, b[i]);
      if (i + 1 == w && !carry_out) break;
      uint32_t bxc = xor_(b[i], carry);
      uint32_t t = and_(axc, bxc);
      carry = xor_(carry, t);
    }
    if (carry_out) *carry_out = carry;
    return s;
  }

  std::vector<uint32_t> sub(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    return add(a, not_vec(b), const1());
  }

  // (x XOR s) + s: negates the two's-complement value when s = 1.
  std::vector<uint32_t> cond_negate(const std::vector<uint32_t>& x, uint32_t s) {
    std::vector<uint32_t> xs(x.size());
    for (size_t i = 0; i < x.size(); i++) xs[i] = xor_(x[i], s);
    std::vector<uint32_t> z(x.size(), const0());
    return add(xs, z, s);
  }

  // Product of two width-W (already extended) operands, wrapped mod 2^W.
  std::vector<uint32_t> mul_mod(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    size_t W = a.size();
    std::vector<uint32_t> acc(W);
    for (size_t j = 0; j < W; j++) acc[j] = and_(a[j], b[0]);
    for (size_t i = 1; i < W; i++) {
      size_t span = W - i;
      std::vector<uint32_t> row(span), head(span);
      for (size_t j = 0; j < span; j++) {
        row[j] = and_(a[j], b[i]);
        head[j] = acc[i + j];
      }
      auto sum = add(head, row, const0());
      for (size_t j = 0; j < span; j++) acc[i + j] = sum[j];
    }
    return acc;
  }

  // x * k for a nonnegative constant k, wrapped mod 2^W (shift-and-add).
  std::vector<uint32_t> const_mul(const std::vector<uint32_t>& x, uint64_t k) {
    size_t W = x.size();
    std::vector<uint32_t> acc;
    for (int i = 0; i < 64; i++) {
      if (!((k >> i) & 1)) continue;
      std::vector<uint32_t> shifted((size_t)W, const0());
      for (size_t j = 0; i + j < W; j++) shifted[i + j] = x[j];
      acc = acc.empty() ? shifted : add(acc, shifted, const0());
    }
    if (acc.empty()) acc.assign(W, const0());
    return acc;
  }

  // Restoring division of |x| by a constant: per step the remainder register
  // (divisor width + 1 bits) shifts in one dividend bit and conditionally
  // drops the divisor.
  std::vector<uint32_t> udiv_const(const std::vector<uint32_t>& x, uint64_t divisor) {
    int W = (int)x.size();
    int rw = bit_length(divisor) + 1;
    std::vector<uint32_t> R((size_t)rw, const0());
    auto nD = not_vec(const_bits(divisor, rw));
    std::vector<uint32_t> q((size_t)W);
    for (int i = W - 1; i >= 0; i--) {
      R.insert(R.begin(), x[(size_t)i]);
      R.pop_back();
      uint32_t geq;
      auto T = add(R, nD, const1(), &geq);
      for (int j = 0; j < rw; j++) {
        uint32_t diff = xor_(R[(size_t)j], T[(size_t)j]);
        R[(size_t)j] = xor_(R[(size_t)j], and_(geq, diff));
      }
      q[(size_t)i] = geq;
    }
    return q;
  }

  std::vector<uint32_t> sdiv_const(const std::vector<uint32_t>& x, uint64_t divisor) {
    uint32_t s = x.back();
    auto mag = cond_negate(x, s);
    auto q = udiv_const(mag, divisor);
    return cond_negate(q, s);
  }

  std::vector<uint32_t> sign_extend(const std::vector<uint32_t>& x, int width) {
    std::vector<uint32_t> out = x;
    while ((int)out.size() < width) out.push_back(x.back());
    return out;
  }
};

}  // namespace

int64_t fixed_encode(double v, const FixedPointSpec& spec) {
  check_spec(spec);
  double scaled = v * (double)spec.scale;
  require(std::isfinite(scaled), Err::Overflow, "non-finite fixed-point value");
  double bound = std::ldexp(1.0, spec.width - 1);
  require(std::abs(scaled) < bound, Err::Overflow, "value exceeds fixed-point range");
  return (int64_t)std::llround(scaled);  // llround is half-away-from-zero
}

double fixed_decode(int64_t v, const FixedPointSpec& spec) {
  return (double)v / (double)spec.scale;
}

const char* net_kind_name(NetKind k) {
  switch (k) {
    case NetKind::Add: return "ADD";
    case NetKind::Sub: return "SUB";
    case NetKind::Mul: return "MUL";
    case NetKind::DivScale: return "DIVSCALE";
    case NetKind::Relu: return "RELU";
    case NetKind::Poly2Sigmoid: return "POLY2_SIGMOID";
  }
  return "?";
}

bool is_binary(NetKind k) {
  return k == NetKind::Add || k == NetKind::Sub || k == NetKind::Mul;
}

int operand_width(NetKind k, int slot, const FixedPointSpec& spec) {
  (void)slot;
  return k == NetKind::DivScale ? 2 * spec.width : spec.width;
}

int result_width(NetKind k, const FixedPointSpec& spec) {
  return k == NetKind::Mul ? 2 * spec.width : spec.width;
}

BooleanCircuit build_netlist(NetKind kind, const FixedPointSpec& spec) {
  check_spec(spec);
  Builder b;
  const int w = spec.width;
  switch (kind) {
    case NetKind::Add: {
      auto x = b.input(w), y = b.input(w);
      b.c.outputs = b.add(x, y, b.const0());
      break;
    }
    case NetKind::Sub: {
      auto x = b.input(w), y = b.input(w);
      b.c.outputs = b.sub(x, y);
      break;
    }
    case NetKind::Mul: {
      auto x = b.input(w), y = b.input(w);
      b.c.outputs = b.mul_mod(b.sign_extend(x, 2 * w), b.sign_extend(y, 2 * w));
      break;
    }
    case NetKind::DivScale: {
      auto x = b.input(2 * w);
      auto q = b.sdiv_const(x, (uint64_t)spec.scale);
      b.c.outputs.assign(q.begin(), q.begin() + w);
      break;
    }
    case NetKind::Relu: {
      auto x = b.input(w);
      uint32_t keep = b.not_(x.back());
      b.c.outputs.resize((size_t)w);
      for (int i = 0; i < w; i++) b.c.outputs[(size_t)i] = b.and_(x[(size_t)i], keep);
      break;
    }
    case NetKind::Poly2Sigmoid: {
      auto k = sigmoid_consts(spec);
      auto z = b.input(w);
      auto ext = b.sign_extend(z, 2 * w);
      auto q1 = b.sdiv_const(b.const_mul(ext, (uint64_t)k.c1), k.d1);
      auto zz = b.mul_mod(ext, ext);
      auto q2 = b.sdiv_const(b.const_mul(zz, (uint64_t)k.c2), k.d2);
      auto sum = b.sub(b.add(b.const_bits((u128)k.c0, 2 * w), q1, b.const0()), q2);
      b.c.outputs.assign(sum.begin(), sum.begin() + w);
      break;
    }
  }
  return std::move(b.c);
}

CircuitStats circuit_stats(const BooleanCircuit& c) {
  CircuitStats s;
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::And: s.and_count++; break;
      case GateKind::Xor: s.xor_count++; break;
      case GateKind::Not: s.not_count++; break;
      default: s.const_count++; break;
    }
  }
  s.total_gates = c.gates.size();
  for (const auto& g : c.input_groups) s.input_bits += g.size();
  s.output_bits = c.outputs.size();
  return s;
}

std::vector<uint8_t> eval_plain(const BooleanCircuit& c,
                                const std::vector<std::vector<uint8_t>>& inputs) {
  require(inputs.size() == c.input_groups.size(), Err::WidthMismatch,
          "operand group count mismatch");
  std::vector<uint8_t> v(c.wire_count, 0);
  for (size_t g = 0; g < inputs.size(); g++) {
    require(inputs[g].size() == c.input_groups[g].size(), Err::WidthMismatch,
            "operand width mismatch");
    for (size_t i = 0; i < inputs[g].size(); i++) v[c.input_groups[g][i]] = inputs[g][i] & 1;
  }
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::Xor: v[g.out] = v[g.in0] ^ v[g.in1]; break;
      case GateKind::And: v[g.out] = v[g.in0] & v[g.in1]; break;
      case GateKind::Not: v[g.out] = v[g.in0] ^ 1; break;
      case GateKind::Const0: v[g.out] = 0; break;
      case GateKind::Const1: v[g.out] = 1; break;
    }
  }
  std::vector<uint8_t> out(c.outputs.size());
  for (size_t i = 0; i < out.size(); i++) out[i] = v[c.outputs[i]];
  return out;
}

std::string export_text(const BooleanCircuit& c) {
  std::ostringstream os;
  os << "wires " << c.wire_count << " gates " << c.gates.size() << "\n";
  for (size_t g = 0; g < c.input_groups.size(); g++) {
    os << "input " << g << ":";
    for (uint32_t w : c.input_groups[g]) os << ' ' << w;
    os << "\n";
  }
  os << "output:";
  for (uint32_t w : c.outputs) os << ' ' << w;
  os << "\n";
  for (size_t i = 0; i < c.gates.size(); i++) {
    const auto& g = c.gates[i];
    os << i << ' ';
    switch (g.kind) {
      case GateKind::Xor: os << "XOR " << g.in0 << ' ' << g.in1; break;
      case GateKind::And: os << "AND " << g.in0 << ' ' << g.in1; break;
      case GateKind::Not: os << "NOT " << g.in0; break;
      case GateKind::Const0: os << "CONST0"; break;
      case GateKind::Const1: os << "CONST1"; break;
    }
    os << ' ' << g.out << "\n";
  }
  return os.str();
}

std::vector<uint8_t> to_bits(u128 v, int width) {
  std::vector<uint8_t> out((size_t)width);
  for (int i = 0; i < width; i++) out[(size_t)i] = (uint8_t)((v >> i) & 1);
  return out;
}

u128 from_bits(std::span<const uint8_t> bits) {
  u128 v = 0;
  for (size_t i = 0; i < bits.size(); i++) v |= (u128)(bits[i] & 1) << i;
  return v;
}

int64_t bits_to_i64(std::span<const uint8_t> bits) {
  return wrap_i(from_bits(bits), (int)bits.size());
}

int64_t ref_add(int64_t a, int64_t b, const FixedPointSpec& spec) {
  return wrap_i((u128)(uint64_t)a + (u128)(uint64_t)b, spec.width);
}

int64_t ref_sub(int64_t a, int64_t b, const FixedPointSpec& spec) {
  return wrap_i((u128)(uint64_t)a - (u128)(uint64_t)b, spec.width);
}

u128 ref_mul_full(int64_t a, int64_t b, const FixedPointSpec& spec) {
  u128 ua = (u128)(__int128)a, ub = (u128)(__int128)b;
  return (ua * ub) & width_mask(2 * spec.width);
}

int64_t ref_divscale(u128 v, const FixedPointSpec& spec) {
  return wrap_i(sdiv_wrapped(v, (uint64_t)spec.scale, 2 * spec.width), spec.width);
}

int64_t ref_relu(int64_t a, const FixedPointSpec& spec) {
  (void)spec;
  return a < 0 ? 0 : a;
}

int64_t ref_poly2_sigmoid(int64_t z, const FixedPointSpec& spec) {
  auto k = sigmoid_consts(spec);
  const int bits = 2 * spec.width;
  const u128 mask = width_mask(bits);
  u128 ext = (u128)(__int128)z & mask;
  u128 q1 = sdiv_wrapped(ext * (u128)(uint64_t)k.c1, k.d1, bits);
  u128 zz = (ext * ext) & mask;
  u128 q2 = sdiv_wrapped(zz * (u128)(uint64_t)k.c2, k.d2, bits);
  u128 sum = ((u128)(uint64_t)k.c0 + q1 - q2) & mask;
  return wrap_i(sum, spec.width);
}

std::vector<ValueRef> compose_layer(Plan& plan, uint32_t rows, uint32_t cols, bool with_bias,
                                    std::optional<NetKind> activation,
                                    const std::vector<ValueRef>& inputs) {
  require(rows >= 1 && cols >= 1, Err::InvalidArgument, "layer dims must be positive");
  require(inputs.size() == cols, Err::DimMismatch, "layer input arity mismatch");
  auto carried = [&](size_t step) { return ValueRef{Src::Carried, (uint32_t)step}; };
  std::vector<ValueRef> outs;
  for (uint32_t r = 0; r < rows; r++) {
    ValueRef acc{};
    for (uint32_t c = 0; c < cols; c++) {
      ValueRef w{Src::Garbler, plan.garbler_count++};
      plan.steps.push_back({NetKind::Mul, w, inputs[c]});
      plan.steps.push_back({NetKind::DivScale, carried(plan.steps.size() - 1), {}});
      ValueRef term = carried(plan.steps.size() - 1);
      if (c == 0) {
        acc = term;
      } else {
        plan.steps.push_back({NetKind::Add, acc, term});
        acc = carried(plan.steps.size() - 1);
      }
    }
    if (with_bias) {
      ValueRef bias{Src::Garbler, plan.garbler_count++};
      plan.steps.push_back({NetKind::Add, acc, bias});
      acc = carried(plan.steps.size() - 1);
    }
    if (activation) {
      plan.steps.push_back({*activation, acc, {}});
      acc = carried(plan.steps.size() - 1);
    }
    outs.push_back(acc);
  }
  return outs;
}

int value_width(const Plan& plan, const ValueRef& ref) {
  if (ref.src == Src::Carried) {
    require(ref.index < plan.steps.size(), Err::InvalidArgument, "carried value out of range");
    return result_width(plan.steps[ref.index].kind, plan.spec);
  }
  return plan.spec.width;
}

std::vector<int64_t> eval_plan_plain(const Plan& plan, const std::vector<int64_t>& garbler_vals,
                                     const std::vector<int64_t>& evaluator_vals) {
  require(garbler_vals.size() == plan.garbler_count, Err::DimMismatch,
          "garbler value count mismatch");
  require(evaluator_vals.size() == plan.evaluator_count, Err::DimMismatch,
          "evaluator value count mismatch");
  std::vector<BooleanCircuit> cache(6);
  std::vector<bool> built(6, false);
  auto circuit = [&](NetKind k) -> const BooleanCircuit& {
    size_t i = (size_t)k;
    if (!built[i]) {
      cache[i] = build_netlist(k, plan.spec);
      built[i] = true;
    }
    return cache[i];
  };
  std::vector<std::vector<uint8_t>> carried(plan.steps.size());
  auto bits_of = [&](const ValueRef& ref) -> std::vector<uint8_t> {
    switch (ref.src) {
      case Src::Garbler:
        return to_bits((u128)(__int128)garbler_vals.at(ref.index), plan.spec.width);
      case Src::Evaluator:
        return to_bits((u128)(__int128)evaluator_vals.at(ref.index), plan.spec.width);
      default:
        require(!carried.at(ref.index).empty(), Err::InvalidArgument,
                "carried value referenced before production");
        return carried[ref.index];
    }
  };
  for (size_t i = 0; i < plan.steps.size(); i++) {
    const auto& st = plan.steps[i];
    std::vector<std::vector<uint8_t>> inputs;
    inputs.push_back(bits_of(st.a));
    if (is_binary(st.kind)) inputs.push_back(bits_of(st.b));
    carried[i] = eval_plain(circuit(st.kind), inputs);
  }
  std::vector<int64_t> out;
  for (const auto& ref : plan.outputs) out.push_back(bits_to_i64(bits_of(ref)));
  return out;
}

}  // namespace secnn::gc
