#include "secnn/gc_runtime.hpp"

#include <array>
#include <cstring>

#include <wmmintrin.h>

#include "secnn/serial.hpp"

namespace secnn::gcrt {

namespace {

__m128i expand_step(__m128i key, __m128i kg) {
  kg = _mm_shuffle_epi32(kg, _MM_SHUFFLE(3, 3, 3, 3));
  key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
  key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
  key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
  return _mm_xor_si128(key, kg);
}

struct Aes {
  __m128i rk[11];
  Aes() {
    // public fixed key (hex digits of pi); secrecy lives in the labels
    rk[0] = _mm_set_epi64x((long long)0x452821E638D01377ull, (long long)0x243F6A8885A308D3ull);
#define SECNN_AES_EXPAND(i, rcon) \
  rk[i] = expand_step(rk[i - 1], _mm_aeskeygenassist_si128(rk[i - 1], rcon))
    SECNN_AES_EXPAND(1, 0x01);
    SECNN_AES_EXPAND(2, 0x02);
    SECNN_AES_EXPAND(3, 0x04);
    SECNN_AES_EXPAND(4, 0x08);
    SECNN_AES_EXPAND(5, 0x10);
    SECNN_AES_EXPAND(6, 0x20);
    SECNN_AES_EXPAND(7, 0x40);
    SECNN_AES_EXPAND(8, 0x80);
    SECNN_AES_EXPAND(9, 0x1B);
    SECNN_AES_EXPAND(10, 0x36);
#undef SECNN_AES_EXPAND
  }
};

const Aes& aes() {
  static const Aes a;
  return a;
}

}  // namespace

Label random_label(std::mt19937_64& rng) {
  Label l;
  l.lo = rng();
  l.hi = rng();
  return l;
}

ot::Msg label_to_msg(const Label& l) {
  ot::Msg m;
  std::memcpy(m.data(), &l.lo, 8);
  std::memcpy(m.data() + 8, &l.hi, 8);
  return m;
}

Label msg_to_label(const ot::Msg& m) {
  Label l;
  std::memcpy(&l.lo, m.data(), 8);
  std::memcpy(&l.hi, m.data() + 8, 8);
  return l;
}

Label hash_label(const Label& x, uint64_t tweak) {
  const Aes& a = aes();
  __m128i u = _mm_set_epi64x((long long)x.hi, (long long)(x.lo ^ tweak));
  __m128i e = _mm_xor_si128(u, a.rk[0]);
  for (int r = 1; r < 10; r++) e = _mm_aesenc_si128(e, a.rk[r]);
  e = _mm_aesenclast_si128(e, a.rk[10]);
  e = _mm_xor_si128(e, u);
  alignas(16) uint64_t tmp[2];
  _mm_store_si128((__m128i*)tmp, e);
  return {tmp[0], tmp[1]};
}

namespace {

void append_label(serial::ByteWriter& w, const Label& l) {
  w.u64(l.lo);
  w.u64(l.hi);
}

Label read_label(serial::ByteReader& r) {
  Label l;
  l.lo = r.u64();
  l.hi = r.u64();
  return l;
}

size_t const_gate_count(const gc::BooleanCircuit& c) {
  size_t n = 0;
  for (const auto& g : c.gates)
    if (g.kind == gc::GateKind::Const0 || g.kind == gc::GateKind::Const1) n++;
  return n;
}

// Netlists and tweak numbering both sides derive identically from the plan.
struct PlanLayout {
  std::array<gc::BooleanCircuit, 6> cache;
  std::array<bool, 6> built{};
  std::vector<const gc::BooleanCircuit*> circuits;  // per step
  std::vector<uint64_t> and_base;                   // per step
  uint64_t total_ands = 0;

  explicit PlanLayout(const gc::Plan& plan) {
    for (const auto& st : plan.steps) {
      size_t k = (size_t)st.kind;
      if (!built[k]) {
        cache[k] = gc::build_netlist(st.kind, plan.spec);
        built[k] = true;
      }
      and_base.push_back(total_ands);
      circuits.push_back(&cache[k]);
      total_ands += gc::circuit_stats(cache[k]).and_count;
    }
  }
};

std::vector<uint8_t> value_bits(int64_t v, int width) {
  return gc::to_bits((gc::u128)(__int128)v, width);
}

}  // namespace

StepGarbling garble_step(const gc::BooleanCircuit& c, uint64_t and_base, const Label& delta,
                         const std::vector<std::vector<Label>>& preset, std::mt19937_64& rng) {
  require(delta.lsb() == 1, Err::InvalidArgument, "offset label must have its point bit set");
  require(preset.size() == c.input_groups.size(), Err::DimMismatch,
          "input group count mismatch");
  StepGarbling g;
  std::vector<Label> w0((size_t)c.wire_count);

  g.in0.resize(preset.size());
  for (size_t i = 0; i < preset.size(); i++) {
    const auto& grp = c.input_groups[i];
    if (preset[i].empty()) {
      g.in0[i].reserve(grp.size());
      for (uint32_t wire : grp) {
        w0[wire] = random_label(rng);
        g.in0[i].push_back(w0[wire]);
      }
    } else {
      require(preset[i].size() == grp.size(), Err::DimMismatch, "carried label width mismatch");
      g.in0[i] = preset[i];
      for (size_t k = 0; k < grp.size(); k++) w0[grp[k]] = preset[i][k];
    }
  }

  uint64_t and_idx = 0;
  for (const auto& gate : c.gates) {
    switch (gate.kind) {
      case gc::GateKind::Xor:
        w0[gate.out] = w0[gate.in0] ^ w0[gate.in1];
        break;
      case gc::GateKind::Not:
        w0[gate.out] = w0[gate.in0] ^ delta;
        break;
      case gc::GateKind::Const0:
      case gc::GateKind::Const1: {
        Label r = random_label(rng);
        w0[gate.out] = r;
        g.const_active.push_back(gate.kind == gc::GateKind::Const1 ? r ^ delta : r);
        break;
      }
      case gc::GateKind::And: {
        const Label A = w0[gate.in0], B = w0[gate.in1];
        const int pa = A.lsb(), pb = B.lsb();
        const uint64_t j0 = 2 * (and_base + and_idx), j1 = j0 + 1;
        and_idx++;
        const Label ha0 = hash_label(A, j0), ha1 = hash_label(A ^ delta, j0);
        Label tg = ha0 ^ ha1;
        if (pb) tg ^= delta;
        Label wg = ha0;
        if (pa) wg ^= tg;
        const Label hb0 = hash_label(B, j1), hb1 = hash_label(B ^ delta, j1);
        const Label te = hb0 ^ hb1 ^ A;
        Label we = hb0;
        if (pb) we ^= te ^ A;
        w0[gate.out] = wg ^ we;
        auto mt = label_to_msg(tg), me = label_to_msg(te);
        g.tables.insert(g.tables.end(), mt.begin(), mt.end());
        g.tables.insert(g.tables.end(), me.begin(), me.end());
        break;
      }
    }
  }
  g.out0.reserve(c.outputs.size());
  for (uint32_t wire : c.outputs) g.out0.push_back(w0[wire]);
  return g;
}

std::vector<Label> eval_step(const gc::BooleanCircuit& c, uint64_t and_base,
                             std::span<const uint8_t> tables,
                             const std::vector<std::vector<Label>>& active_inputs,
                             std::span<const Label> const_active) {
  require(active_inputs.size() == c.input_groups.size(), Err::DimMismatch,
          "input group count mismatch");
  std::vector<Label> w((size_t)c.wire_count);
  for (size_t i = 0; i < active_inputs.size(); i++) {
    const auto& grp = c.input_groups[i];
    require(active_inputs[i].size() == grp.size(), Err::DimMismatch,
            "active label width mismatch");
    for (size_t k = 0; k < grp.size(); k++) w[grp[k]] = active_inputs[i][k];
  }

  uint64_t and_idx = 0;
  size_t const_idx = 0;
  for (const auto& gate : c.gates) {
    switch (gate.kind) {
      case gc::GateKind::Xor:
        w[gate.out] = w[gate.in0] ^ w[gate.in1];
        break;
      case gc::GateKind::Not:
        w[gate.out] = w[gate.in0];
        break;
      case gc::GateKind::Const0:
      case gc::GateKind::Const1:
        require(const_idx < const_active.size(), Err::TruncatedPayload,
                "missing constant labels");
        w[gate.out] = const_active[const_idx++];
        break;
      case gc::GateKind::And: {
        const size_t off = (size_t)and_idx * 32;
        require(off + 32 <= tables.size(), Err::TruncatedPayload, "garbled table truncated");
        ot::Msg row;
        std::memcpy(row.data(), tables.data() + off, 16);
        const Label tg = msg_to_label(row);
        std::memcpy(row.data(), tables.data() + off + 16, 16);
        const Label te = msg_to_label(row);
        const Label wa = w[gate.in0], wb = w[gate.in1];
        const uint64_t j0 = 2 * (and_base + and_idx), j1 = j0 + 1;
        and_idx++;
        Label wg = hash_label(wa, j0);
        if (wa.lsb()) wg ^= tg;
        Label we = hash_label(wb, j1);
        if (wb.lsb()) we ^= te ^ wa;
        w[gate.out] = wg ^ we;
        break;
      }
    }
  }
  std::vector<Label> out;
  out.reserve(c.outputs.size());
  for (uint32_t wire : c.outputs) out.push_back(w[wire]);
  return out;
}

std::vector<uint8_t> decode_bits(const StepGarbling& g) {
  std::vector<uint8_t> d;
  d.reserve(g.out0.size());
  for (const auto& l : g.out0) d.push_back((uint8_t)l.lsb());
  return d;
}

std::vector<uint8_t> decode_outputs(std::span<const Label> active,
                                    std::span<const uint8_t> decode) {
  require(active.size() == decode.size(), Err::DimMismatch, "decode width mismatch");
  std::vector<uint8_t> bits(active.size());
  for (size_t i = 0; i < active.size(); i++) bits[i] = (uint8_t)(active[i].lsb() ^ decode[i]);
  return bits;
}

size_t plan_table_bytes(const gc::Plan& plan) {
  PlanLayout layout(plan);
  return (size_t)layout.total_ands * 32;
}

namespace {

using transport::Kind;

std::vector<uint8_t> recv_kind(transport::Endpoint& ep, Kind want) {
  auto [kind, payload] = ep.recv();
  require(kind == want, Err::ProtocolAbort, "unexpected frame kind");
  return payload;
}

}  // namespace

SessionResult run_garbler(transport::Endpoint& ep, const gc::Plan& plan,
                          const std::vector<int64_t>& garbler_vals, ot::Sender& sender,
                          uint64_t seed) {
  require(garbler_vals.size() == plan.garbler_count, Err::DimMismatch,
          "garbler value count mismatch");
  require(plan.evaluator_count >= 1, Err::InvalidArgument,
          "interactive run needs evaluator inputs");
  PlanLayout layout(plan);
  std::mt19937_64 rng(seed);
  Label delta = random_label(rng);
  delta.lo |= 1;

  const int w = plan.spec.width;
  auto fresh = [&](int width) {
    std::vector<Label> v((size_t)width);
    for (auto& l : v) l = random_label(rng);
    return v;
  };
  std::vector<std::vector<Label>> garbler0, evaluator0;
  for (uint32_t i = 0; i < plan.garbler_count; i++) garbler0.push_back(fresh(w));
  for (uint32_t i = 0; i < plan.evaluator_count; i++) evaluator0.push_back(fresh(w));

  std::vector<std::vector<Label>> carried0(plan.steps.size());
  auto zero_labels = [&](const gc::ValueRef& ref) -> const std::vector<Label>& {
    switch (ref.src) {
      case gc::Src::Garbler: return garbler0.at(ref.index);
      case gc::Src::Evaluator: return evaluator0.at(ref.index);
      default: return carried0.at(ref.index);
    }
  };

  std::vector<uint8_t> tables;
  std::vector<Label> const_labels;
  for (size_t i = 0; i < plan.steps.size(); i++) {
    const auto& st = plan.steps[i];
    std::vector<std::vector<Label>> preset;
    preset.push_back(zero_labels(st.a));
    if (gc::is_binary(st.kind)) preset.push_back(zero_labels(st.b));
    auto g = garble_step(*layout.circuits[i], layout.and_base[i], delta, preset, rng);
    carried0[i] = std::move(g.out0);
    tables.insert(tables.end(), g.tables.begin(), g.tables.end());
    const_labels.insert(const_labels.end(), g.const_active.begin(), g.const_active.end());
  }

  // garbler input labels: active label per bit of every garbler-held value,
  // then the per-step constant labels
  serial::ByteWriter input_labels;
  for (uint32_t i = 0; i < plan.garbler_count; i++) {
    auto bits = value_bits(garbler_vals[i], w);
    for (int k = 0; k < w; k++)
      append_label(input_labels, bits[(size_t)k] ? garbler0[i][(size_t)k] ^ delta
                                                 : garbler0[i][(size_t)k]);
  }
  for (const auto& l : const_labels) append_label(input_labels, l);

  serial::ByteWriter decode;
  std::vector<Label> out0_flat;
  for (const auto& ref : plan.outputs) {
    const auto& zl = zero_labels(ref);
    for (const auto& l : zl) {
      decode.u8((uint8_t)l.lsb());
      out0_flat.push_back(l);
    }
  }

  for (uint32_t v = 0; v < plan.evaluator_count; v++) {
    auto req = recv_kind(ep, Kind::OtReq);
    std::vector<ot::MsgPair> pairs((size_t)w);
    for (int k = 0; k < w; k++) {
      pairs[(size_t)k].m0 = label_to_msg(evaluator0[v][(size_t)k]);
      pairs[(size_t)k].m1 = label_to_msg(evaluator0[v][(size_t)k] ^ delta);
    }
    ep.send(Kind::OtResp, sender.respond(req, pairs));
    if (v == 0) ep.send(Kind::InputLabels, input_labels.view());
    if (v + 1 == plan.evaluator_count) {
      ep.send(Kind::Tables, tables);
      ep.send(Kind::DecodeBits, decode.view());
    }
  }

  auto reveal = recv_kind(ep, Kind::Reveal);
  serial::ByteReader rd(reveal);
  std::vector<uint8_t> bits;
  for (const auto& l0 : out0_flat) {
    Label got = read_label(rd);
    if (got == l0)
      bits.push_back(0);
    else if (got == (l0 ^ delta))
      bits.push_back(1);
    else
      fail(Err::LabelMismatch, "revealed label is not on its wire");
  }
  rd.expect_end();

  SessionResult res;
  size_t off = 0;
  for (const auto& ref : plan.outputs) {
    int width = gc::value_width(plan, ref);
    res.outputs.push_back(
        gc::bits_to_i64(std::span<const uint8_t>(bits).subspan(off, (size_t)width)));
    off += (size_t)width;
  }
  return res;
}

SessionResult run_evaluator(transport::Endpoint& ep, const gc::Plan& plan,
                            const std::vector<int64_t>& evaluator_vals,
                            ot::Receiver& receiver) {
  require(evaluator_vals.size() == plan.evaluator_count, Err::DimMismatch,
          "evaluator value count mismatch");
  require(plan.evaluator_count >= 1, Err::InvalidArgument,
          "interactive run needs evaluator inputs");
  PlanLayout layout(plan);
  const int w = plan.spec.width;

  std::vector<std::vector<Label>> garbler_act(plan.garbler_count),
      evaluator_act(plan.evaluator_count);
  std::vector<uint8_t> tables, decode;
  std::vector<std::vector<Label>> step_consts(plan.steps.size());

  for (uint32_t v = 0; v < plan.evaluator_count; v++) {
    auto bits = value_bits(evaluator_vals[v], w);
    ep.send(Kind::OtReq, receiver.make_request(bits));
    auto msgs = receiver.finish(recv_kind(ep, Kind::OtResp));
    require(msgs.size() == (size_t)w, Err::ProtocolAbort, "transfer batch width mismatch");
    for (const auto& m : msgs) evaluator_act[v].push_back(msg_to_label(m));

    if (v == 0) {
      auto payload = recv_kind(ep, Kind::InputLabels);
      serial::ByteReader rd(payload);
      for (uint32_t i = 0; i < plan.garbler_count; i++)
        for (int k = 0; k < w; k++) {
          (void)k;
          garbler_act[i].push_back(read_label(rd));
        }
      for (size_t s = 0; s < plan.steps.size(); s++) {
        size_t n = const_gate_count(*layout.circuits[s]);
        for (size_t k = 0; k < n; k++) step_consts[s].push_back(read_label(rd));
      }
      rd.expect_end();
    }
    if (v + 1 == plan.evaluator_count) {
      tables = recv_kind(ep, Kind::Tables);
      require(tables.size() == (size_t)layout.total_ands * 32, Err::ProtocolAbort,
              "garbled table size mismatch");
      decode = recv_kind(ep, Kind::DecodeBits);
    }
  }

  std::vector<std::vector<Label>> carried_act(plan.steps.size());
  auto active_labels = [&](const gc::ValueRef& ref) -> const std::vector<Label>& {
    switch (ref.src) {
      case gc::Src::Garbler: return garbler_act.at(ref.index);
      case gc::Src::Evaluator: return evaluator_act.at(ref.index);
      default: return carried_act.at(ref.index);
    }
  };

  for (size_t i = 0; i < plan.steps.size(); i++) {
    const auto& st = plan.steps[i];
    std::vector<std::vector<Label>> inputs;
    inputs.push_back(active_labels(st.a));
    if (gc::is_binary(st.kind)) inputs.push_back(active_labels(st.b));
    size_t nbytes = (size_t)gc::circuit_stats(*layout.circuits[i]).and_count * 32;
    auto slice = std::span<const uint8_t>(tables).subspan((size_t)layout.and_base[i] * 32,
                                                          nbytes);
    carried_act[i] = eval_step(*layout.circuits[i], layout.and_base[i], slice, inputs,
                               step_consts[i]);
  }

  std::vector<Label> out_active;
  for (const auto& ref : plan.outputs)
    for (const auto& l : active_labels(ref)) out_active.push_back(l);
  require(decode.size() == out_active.size(), Err::ProtocolAbort, "decode size mismatch");
  auto bits = decode_outputs(out_active, decode);

  serial::ByteWriter reveal;
  for (const auto& l : out_active) append_label(reveal, l);
  ep.send(Kind::Reveal, reveal.view());

  SessionResult res;
  size_t off = 0;
  for (const auto& ref : plan.outputs) {
    int width = gc::value_width(plan, ref);
    res.outputs.push_back(
        gc::bits_to_i64(std::span<const uint8_t>(bits).subspan(off, (size_t)width)));
    off += (size_t)width;
  }
  return res;
}

}  // namespace secnn::gcrt
