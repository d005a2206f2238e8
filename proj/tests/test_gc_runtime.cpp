#include <doctest.h>

#include <random>
#include <thread>

#include "secnn/gc_runtime.hpp"
#include "secnn/nn_model.hpp"

using namespace secnn;
using gcrt::Label;

namespace {

const gc::FixedPointSpec kSpec{};

std::vector<uint8_t> random_bits(size_t n, std::mt19937_64& rng) {
  std::vector<uint8_t> b(n);
  for (auto& v : b) v = (uint8_t)(rng() & 1);
  return b;
}

// Garble with fresh labels, feed the chosen plaintext bits, evaluate, decode.
std::vector<uint8_t> garbled_roundtrip(const gc::BooleanCircuit& c,
                                       const std::vector<std::vector<uint8_t>>& inputs,
                                       uint64_t seed) {
  std::mt19937_64 rng(seed);
  Label delta = gcrt::random_label(rng);
  delta.lo |= 1;
  std::vector<std::vector<Label>> preset(c.input_groups.size());
  auto g = gcrt::garble_step(c, 0, delta, preset, rng);
  CHECK(g.tables.size() == (size_t)gc::circuit_stats(c).and_count * 32);

  std::vector<std::vector<Label>> active(c.input_groups.size());
  for (size_t i = 0; i < inputs.size(); i++)
    for (size_t k = 0; k < inputs[i].size(); k++)
      active[i].push_back(inputs[i][k] ? g.in0[i][k] ^ delta : g.in0[i][k]);

  auto out = gcrt::eval_step(c, 0, g.tables, active, g.const_active);
  return gcrt::decode_outputs(out, gcrt::decode_bits(g));
}

gc::BooleanCircuit random_circuit(std::mt19937_64& rng) {
  gc::BooleanCircuit c;
  size_t ngroups = 1 + rng() % 2;
  for (size_t g = 0; g < ngroups; g++) {
    std::vector<uint32_t> grp;
    size_t width = 2 + rng() % 8;
    for (size_t k = 0; k < width; k++) grp.push_back(c.wire_count++);
    c.input_groups.push_back(grp);
  }
  size_t ngates = 1 + rng() % 500;
  for (size_t i = 0; i < ngates; i++) {
    uint32_t a = (uint32_t)(rng() % c.wire_count);
    uint32_t b = (uint32_t)(rng() % c.wire_count);
    uint32_t out = c.wire_count++;
    switch (rng() % 10) {
      case 0: c.gates.push_back({gc::GateKind::Not, a, UINT32_MAX, out}); break;
      case 1:
        c.gates.push_back({rng() & 1 ? gc::GateKind::Const1 : gc::GateKind::Const0,
                           UINT32_MAX, UINT32_MAX, out});
        break;
      case 2:
      case 3:
      case 4:
      case 5: c.gates.push_back({gc::GateKind::And, a, b, out}); break;
      default: c.gates.push_back({gc::GateKind::Xor, a, b, out}); break;
    }
  }
  size_t nouts = 1 + rng() % 8;
  for (size_t i = 0; i < nouts; i++) c.outputs.push_back((uint32_t)(rng() % c.wire_count));
  return c;
}

struct SessionOutcome {
  gcrt::SessionResult garbler, evaluator;
  transport::CommStats stats;
};

SessionOutcome run_session(const gc::Plan& plan, const std::vector<int64_t>& garbler_vals,
                           const std::vector<int64_t>& evaluator_vals, bool np_backend,
                           uint64_t seed, transport::Endpoint* tamper_side = nullptr) {
  auto [a, b] = transport::make_inproc_pair();
  transport::Endpoint* eval_ep = tamper_side ? tamper_side : a.get();

  SessionOutcome out;
  std::exception_ptr garbler_err;
  std::thread garbler([&] {
    try {
      if (np_backend) {
        auto s = ot::make_np_sender();
        out.garbler = gcrt::run_garbler(*b, plan, garbler_vals, *s, seed);
      } else {
        auto [s, r] = ot::make_dealer_pair();
        (void)r;
        out.garbler = gcrt::run_garbler(*b, plan, garbler_vals, *s, seed);
      }
    } catch (...) {
      garbler_err = std::current_exception();
    }
  });
  std::exception_ptr eval_err;
  try {
    if (np_backend) {
      auto r = ot::make_np_receiver();
      out.evaluator = gcrt::run_evaluator(*eval_ep, plan, evaluator_vals, *r);
    } else {
      auto [s, r] = ot::make_dealer_pair();
      (void)s;
      out.evaluator = gcrt::run_evaluator(*eval_ep, plan, evaluator_vals, *r);
    }
  } catch (...) {
    eval_err = std::current_exception();
  }
  garbler.join();
  out.stats = a->stats();
  if (garbler_err) std::rethrow_exception(garbler_err);
  if (eval_err) std::rethrow_exception(eval_err);
  return out;
}

// Flips one bit of the reveal payload on its way out.
class RevealTamper : public transport::Endpoint {
 public:
  explicit RevealTamper(transport::Endpoint& inner) : inner_(inner) {}
  void send(transport::Kind kind, std::span<const uint8_t> payload) override {
    if (kind == transport::Kind::Reveal) {
      std::vector<uint8_t> copy(payload.begin(), payload.end());
      copy[0] ^= 1;
      inner_.send(kind, copy);
    } else {
      inner_.send(kind, payload);
    }
  }
  std::pair<transport::Kind, std::vector<uint8_t>> recv() override { return inner_.recv(); }
  transport::CommStats stats() const override { return inner_.stats(); }
  void close() override { inner_.close(); }

 private:
  transport::Endpoint& inner_;
};

}  // namespace

TEST_CASE("label hash separates tweaks and inputs") {
  Label x{0x1234, 0x5678};
  CHECK(gcrt::hash_label(x, 0) == gcrt::hash_label(x, 0));
  CHECK(gcrt::hash_label(x, 0) != gcrt::hash_label(x, 1));
  Label y{0x1235, 0x5678};
  CHECK(gcrt::hash_label(x, 0) != gcrt::hash_label(y, 0));
}

TEST_CASE("garbled netlists agree with plain evaluation on every kind") {
  std::mt19937_64 rng(7);
  for (auto kind : {gc::NetKind::Add, gc::NetKind::Sub, gc::NetKind::Mul, gc::NetKind::DivScale,
                    gc::NetKind::Relu, gc::NetKind::Poly2Sigmoid}) {
    auto c = gc::build_netlist(kind, kSpec);
    for (int trial = 0; trial < 4; trial++) {
      std::vector<std::vector<uint8_t>> inputs;
      for (const auto& grp : c.input_groups) inputs.push_back(random_bits(grp.size(), rng));
      auto want = gc::eval_plain(c, inputs);
      auto got = garbled_roundtrip(c, inputs, rng());
      CHECK(got == want);
    }
  }
}

TEST_CASE("fifty random circuits garble and evaluate correctly") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 50; i++) {
    auto c = random_circuit(rng);
    std::vector<std::vector<uint8_t>> inputs;
    for (const auto& grp : c.input_groups) inputs.push_back(random_bits(grp.size(), rng));
    auto want = gc::eval_plain(c, inputs);
    auto got = garbled_roundtrip(c, inputs, rng());
    REQUIRE(got == want);
  }
}

TEST_CASE("xor-only circuits ship zero table bytes") {
  gc::BooleanCircuit c;
  c.input_groups.push_back({0, 1, 2, 3});
  c.wire_count = 4;
  c.gates.push_back({gc::GateKind::Xor, 0, 1, 4});
  c.gates.push_back({gc::GateKind::Xor, 2, 3, 5});
  c.gates.push_back({gc::GateKind::Xor, 4, 5, 6});
  c.wire_count = 7;
  c.outputs = {6};
  std::mt19937_64 rng(3);
  Label delta = gcrt::random_label(rng);
  delta.lo |= 1;
  auto g = gcrt::garble_step(c, 0, delta, {{}}, rng);
  CHECK(g.tables.empty());
  for (int x = 0; x < 16; x++) {
    std::vector<uint8_t> bits = {(uint8_t)(x & 1), (uint8_t)((x >> 1) & 1),
                                 (uint8_t)((x >> 2) & 1), (uint8_t)((x >> 3) & 1)};
    auto got = garbled_roundtrip(c, {bits}, 1000 + (uint64_t)x);
    CHECK(got[0] == (bits[0] ^ bits[1] ^ bits[2] ^ bits[3]));
  }
}

TEST_CASE("regarbling draws fresh tables and labels") {
  auto c = gc::build_netlist(gc::NetKind::Add, kSpec);
  std::mt19937_64 rng(42);
  Label d1 = gcrt::random_label(rng);
  d1.lo |= 1;
  auto g1 = gcrt::garble_step(c, 0, d1, {{}, {}}, rng);
  Label d2 = gcrt::random_label(rng);
  d2.lo |= 1;
  auto g2 = gcrt::garble_step(c, 0, d2, {{}, {}}, rng);
  CHECK(g1.tables != g2.tables);
  CHECK(g1.in0[0] != g2.in0[0]);
}

TEST_CASE("carried labels chain two circuits without re-encoding") {
  // x + y, then relu of the sum, labels flowing directly between the steps
  auto add = gc::build_netlist(gc::NetKind::Add, kSpec);
  auto relu = gc::build_netlist(gc::NetKind::Relu, kSpec);
  std::mt19937_64 rng(5);
  Label delta = gcrt::random_label(rng);
  delta.lo |= 1;
  auto g_add = gcrt::garble_step(add, 0, delta, {{}, {}}, rng);
  uint64_t base = gc::circuit_stats(add).and_count;
  auto g_relu = gcrt::garble_step(relu, base, delta, {g_add.out0}, rng);

  int64_t x = -31234, y = 500;
  auto bx = gc::to_bits((gc::u128)(__int128)x, 64), by = gc::to_bits((gc::u128)(__int128)y, 64);
  std::vector<std::vector<Label>> act(2);
  for (int k = 0; k < 64; k++) {
    act[0].push_back(bx[(size_t)k] ? g_add.in0[0][(size_t)k] ^ delta : g_add.in0[0][(size_t)k]);
    act[1].push_back(by[(size_t)k] ? g_add.in0[1][(size_t)k] ^ delta : g_add.in0[1][(size_t)k]);
  }
  auto mid = gcrt::eval_step(add, 0, g_add.tables, act, g_add.const_active);
  auto out = gcrt::eval_step(relu, base, g_relu.tables, {mid}, g_relu.const_active);
  auto bits = gcrt::decode_outputs(out, gcrt::decode_bits(g_relu));
  CHECK(gc::bits_to_i64(bits) == gc::ref_relu(gc::ref_add(x, y, kSpec), kSpec));
}

TEST_CASE("interactive plan run matches plain plan evaluation") {
  auto m = nn::make_model(4, 372);
  auto bind = nn::to_gc_plan(m, kSpec);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ux(-2, 2);
  for (int trial = 0; trial < 2; trial++) {
    std::vector<double> x = {ux(rng), ux(rng), ux(rng)};
    auto enc = nn::encode_inputs(x, kSpec);
    auto want = gc::eval_plan_plain(bind.plan, bind.garbler_vals, enc);
    auto out = run_session(bind.plan, bind.garbler_vals, enc, false, 1000 + (uint64_t)trial);
    CHECK(out.garbler.outputs == want);
    CHECK(out.evaluator.outputs == want);
    CHECK(out.stats.flights == 7);  // 3 choice/transfer exchanges plus the reveal
    CHECK(out.stats.round_trips == 3);
    // the garbled tables dominate the garbler-to-evaluator traffic
    CHECK(out.stats.bytes_b_to_a > gcrt::plan_table_bytes(bind.plan));
  }
}

TEST_CASE("interactive run over the public-key transfer backend") {
  auto m = nn::make_model(3, 9);
  auto bind = nn::to_gc_plan(m, kSpec);
  std::vector<double> x = {0.75, -1.5, 2.0};
  auto enc = nn::encode_inputs(x, kSpec);
  auto want = gc::eval_plan_plain(bind.plan, bind.garbler_vals, enc);
  auto out = run_session(bind.plan, bind.garbler_vals, enc, true, 77);
  CHECK(out.garbler.outputs == want);
  CHECK(out.evaluator.outputs == want);
  CHECK(out.stats.flights == 7);
}

TEST_CASE("tampered reveal label is rejected") {
  auto m = nn::make_model(2, 31);
  auto bind = nn::to_gc_plan(m, kSpec);
  auto enc = nn::encode_inputs({0.5, 0.5, 0.5}, kSpec);

  auto [a, b] = transport::make_inproc_pair();
  RevealTamper tampered(*a);
  std::exception_ptr garbler_err;
  std::thread garbler([&, bp = b.get()] {
    try {
      auto [s, r] = ot::make_dealer_pair();
      (void)r;
      gcrt::run_garbler(*bp, bind.plan, bind.garbler_vals, *s, 5);
    } catch (...) {
      garbler_err = std::current_exception();
    }
  });
  auto [s, r] = ot::make_dealer_pair();
  (void)s;
  gcrt::run_evaluator(tampered, bind.plan, enc, *r);
  garbler.join();
  REQUIRE(garbler_err);
  try {
    std::rethrow_exception(garbler_err);
  } catch (const Error& e) {
    CHECK(e.code == Err::LabelMismatch);
  }
}
