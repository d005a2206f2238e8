// Acceptance gate. Each check prints exactly one PASS/FAIL line with the
// measured numbers; the exit status is the number of failures. Kept free of
// any test framework so the output reads as a report.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "secnn/ckks.hpp"
#include "secnn/errors.hpp"
#include "secnn/fhe_protocol.hpp"
#include "secnn/gc_circuits.hpp"
#include "secnn/gc_runtime.hpp"
#include "secnn/harness.hpp"
#include "secnn/nn_model.hpp"
#include "secnn/ntt.hpp"
#include "secnn/ot.hpp"
#include "secnn/transport.hpp"

using namespace secnn;
using gcrt::Label;

namespace {

std::string repo(const std::string& rel) { return std::string(SECNN_REPO_DIR) + "/" + rel; }

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double now_seconds() {
  using clk = std::chrono::steady_clock;
  static const clk::time_point t0 = clk::now();
  return std::chrono::duration<double>(clk::now() - t0).count();
}

struct Outcome {
  bool ok = false;
  std::string msg;
};

int g_failures = 0;

void gate(int idx, const std::string& name, const std::function<Outcome()>& body) {
  Outcome r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, fmt("exception: %s", e.what())};
  }
  printf("[%2d/11] %s  %s: %s\n", idx, r.ok ? "PASS" : "FAIL", name.c_str(), r.msg.c_str());
  fflush(stdout);
  if (!r.ok) g_failures++;
}

// ---- shared fixtures ------------------------------------------------------

std::vector<std::vector<double>> draw_inputs(uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<std::vector<double>> xs;
  for (int i = 0; i < count; i++) xs.push_back({u(rng), u(rng), u(rng)});
  return xs;
}

struct FheBatch {
  std::vector<double> ys;
  transport::CommStats stats;
};

FheBatch run_fhe_inproc(const ckks::CkksParams& params, const nn::Model& m,
                        const std::vector<std::vector<double>>& inputs, bool reuse_keys,
                        uint64_t seed) {
  auto [a, b] = transport::make_inproc_pair();
  std::exception_ptr server_err;
  std::thread server([&] {
    try {
      fhe::run_fhe_server(*b, m);
    } catch (...) {
      server_err = std::current_exception();
    }
  });
  FheBatch out;
  out.ys = fhe::run_fhe_client(*a, params, m.h, inputs, reuse_keys, seed);
  server.join();
  if (server_err) std::rethrow_exception(server_err);
  out.stats = a->stats();
  return out;
}

// Mirrors the fuzz generator in the runtime unit tests: small fan-in-2
// netlists over one or two input groups with every gate kind represented.
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

// ---- 1: encode/encrypt/decrypt/decode roundtrip ---------------------------

Outcome check_roundtrip() {
  ckks::Context cx(ckks::test_preset());
  std::mt19937_64 rng(101);
  auto [sk, keys] = ckks::keygen(cx, 7, {});
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  double t0 = now_seconds();
  double worst = 0;
  const int trials = 100;
  for (int t = 0; t < trials; t++) {
    std::vector<double> v(cx.slots());
    for (auto& x : v) x = u(rng);
    auto pt = ckks::encode(cx, v, cx.params.initial_scale, cx.params.chain_length());
    auto ct = ckks::encrypt(cx, keys.pk, pt, rng);
    auto back = ckks::decode(cx, ckks::decrypt(cx, sk, ct));
    for (size_t i = 0; i < v.size(); i++) worst = std::max(worst, std::fabs(back[i] - v[i]));
  }
  double secs = now_seconds() - t0;
  bool ok = worst < 1e-4 && secs < 5.0;
  return {ok, fmt("max abs err %.3g over %d vectors of %u slots in %.2f s (limits 1e-4, 5 s)",
                  worst, trials, cx.slots(), secs)};
}

// ---- 2: add/mul/rotate against the slotwise reference, NTT exactness ------

Outcome check_homomorphism() {
  ckks::Context cx(ckks::test_preset());
  std::mt19937_64 rng(202);
  auto [sk, keys] = ckks::keygen(cx, 11, {1});
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  const size_t n = cx.slots();
  std::vector<double> a(n), b(n), c(n);
  for (size_t i = 0; i < n; i++) {
    a[i] = u(rng);
    b[i] = u(rng);
    c[i] = u(rng);
  }
  const double s0 = cx.params.initial_scale;
  const size_t top = cx.params.chain_length();
  auto enc = [&](const std::vector<double>& v) {
    return ckks::encrypt(cx, keys.pk, ckks::encode(cx, v, s0, top), rng);
  };
  auto A = enc(a), B = enc(b), C = enc(c);

  // depth 2: ((a + b) * c) * rot(a, 1), the rotation dragged down one level
  // by a unit multiplication so the final product lines up.
  auto prod1 = ckks::rescale(cx, ckks::relinearize(cx, ckks::eval_mul(cx, ckks::eval_add(cx, A, B), C), keys.rk));
  auto rotA = ckks::rotate(cx, A, 1, keys.gk);
  auto rotA2 = ckks::rescale(cx, ckks::mul_plain(cx, rotA, ckks::encode_const(cx, 1.0, s0, top)));
  auto prod2 = ckks::rescale(cx, ckks::relinearize(cx, ckks::eval_mul(cx, prod1, rotA2), keys.rk));

  auto got = ckks::decode(cx, ckks::decrypt(cx, sk, prod2));
  double worst = 0;
  for (size_t i = 0; i < n; i++) {
    double want = (a[i] + b[i]) * c[i] * a[(i + 1) % n];
    worst = std::max(worst, std::fabs(got[i] - want));
  }

  // forward/inverse transform must be an exact bijection on the top limb
  std::vector<uint64_t> coeffs(cx.params.degree);
  for (auto& x : coeffs) x = rng() % cx.ntts[0].mod.q;
  auto f = coeffs;
  cx.ntts[0].forward(f.data());
  cx.ntts[0].inverse(f.data());
  bool ntt_exact = f == coeffs;

  // pointwise products in the transform domain must equal schoolbook
  // multiplication mod x^n + 1, bit for bit
  const uint32_t sn = 256;
  NttTables small(sn, pick_ntt_prime(sn, 30, {}));
  const Modulus& md = small.mod;
  std::vector<uint64_t> pa(sn), pb(sn), want(sn, 0);
  for (auto& x : pa) x = rng() % md.q;
  for (auto& x : pb) x = rng() % md.q;
  for (uint32_t i = 0; i < sn; i++)
    for (uint32_t j = 0; j < sn; j++) {
      uint64_t v = md.mul(pa[i], pb[j]);
      uint32_t k = i + j;
      if (k < sn)
        want[k] = md.add(want[k], v);
      else
        want[k - sn] = md.sub(want[k - sn], v);
    }
  auto fa = pa, fb = pb;
  small.forward(fa.data());
  small.forward(fb.data());
  for (uint32_t k = 0; k < sn; k++) fa[k] = md.mul(fa[k], fb[k]);
  small.inverse(fa.data());
  bool conv_exact = fa == want;

  bool ok = worst < 1e-2 && ntt_exact && conv_exact;
  return {ok, fmt("depth-2 add/mul/rotate err %.3g (limit 1e-2), ntt roundtrip %s, "
                  "negacyclic convolution %s",
                  worst, ntt_exact ? "exact" : "BROKEN", conv_exact ? "exact" : "BROKEN")};
}

// ---- 3: modulus budget table and its edges --------------------------------

Outcome check_budget_table() {
  const std::vector<std::pair<uint32_t, int>> expect = {
      {1024, 27}, {2048, 54}, {4096, 109}, {8192, 218}, {16384, 438}, {32768, 881}};
  bool rows_ok = ckks::degree_budget_table() == expect;

  auto accepts = [](uint32_t deg, std::vector<int> bits, double scale) {
    try {
      ckks::make_params(deg, bits, scale);
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  auto rejects_with = [](uint32_t deg, std::vector<int> bits, double scale, Err code) {
    try {
      ckks::make_params(deg, bits, scale);
      return false;
    } catch (const Error& e) {
      return e.code == code;
    }
  };

  const double s20 = std::ldexp(1.0, 20);
  struct Probe {
    uint32_t deg;
    std::vector<int> at_budget;
  };
  const std::vector<Probe> probes = {
      {2048, {30, 24}},
      {4096, {40, 40, 29}},
      {8192, {60, 40, 40, 40, 38}},
      {16384, {60, 60, 60, 60, 60, 60, 50, 28}},
      {32768, {60, 60, 60, 60, 60, 60, 60, 60, 60, 60, 60, 60, 60, 60, 41}},
  };
  bool edges_ok = true;
  for (const auto& p : probes) {
    edges_ok = edges_ok && accepts(p.deg, p.at_budget, s20);
    auto over = p.at_budget;
    over.back() += 1;
    edges_ok = edges_ok && rejects_with(p.deg, over, s20, Err::BudgetExceeded);
  }
  bool floor_ok = rejects_with(1024, {27}, s20, Err::DegreeUnusable) &&
                  rejects_with(1024, {25}, s20, Err::DegreeUnusable);

  bool ok = rows_ok && edges_ok && floor_ok;
  return {ok, fmt("six budget rows %s, at-budget chains accept / +1 bit rejects %s, "
                  "degree 1024 unusable %s",
                  rows_ok ? "exact" : "WRONG", edges_ok ? "ok" : "BROKEN",
                  floor_ok ? "ok" : "BROKEN")};
}

// ---- 4: one-round-trip encrypted inference at the big preset --------------

Outcome check_fhe_end_to_end() {
  auto m = nn::load_model(repo("models/canonical.json"));
  auto inputs = draw_inputs(42, 25);

  double t0 = now_seconds();
  auto batch = run_fhe_inproc(ckks::paper_preset(), m, inputs, true, 1);
  double secs = now_seconds() - t0;

  double worst = 0;
  for (size_t i = 0; i < inputs.size(); i++) {
    double want = nn::infer_fhe_approx(m, inputs[i]);
    worst = std::max(worst, std::fabs(batch.ys[i] - want) / std::fabs(want));
  }
  bool traffic_ok = batch.stats.flights == 2 * inputs.size() &&
                    batch.stats.round_trips == inputs.size();
  bool ok = worst < 0.01 && traffic_ok && secs < 600.0;
  return {ok, fmt("25 inputs, worst rel err %.2e vs the squared/poly reference (limit 1e-2), "
                  "%zu flights / %zu round trips, %.1f s (limit 600)",
                  worst, (size_t)batch.stats.flights, (size_t)batch.stats.round_trips, secs)};
}

// ---- 5: garbled inference is bit-exact, seven flights per session ---------

Outcome check_gc_end_to_end() {
  auto m = nn::load_model(repo("models/canonical.json"));
  const gc::FixedPointSpec spec{};
  auto inputs = draw_inputs(4242, 100);
  auto bind = nn::to_gc_plan(m, spec);

  int exact = 0;
  bool traffic_ok = true;
  for (size_t i = 0; i < inputs.size(); i++) {
    auto [a, b] = transport::make_inproc_pair();
    std::exception_ptr garbler_err;
    std::thread garbler([&, i] {
      try {
        auto s = ot::make_np_sender();
        gcrt::run_garbler(*b, bind.plan, bind.garbler_vals, *s, 9000 + i);
      } catch (...) {
        garbler_err = std::current_exception();
      }
    });
    std::vector<int64_t> vals;
    for (double x : inputs[i]) vals.push_back(gc::fixed_encode(x, spec));
    auto r = ot::make_np_receiver();
    auto res = gcrt::run_evaluator(*a, bind.plan, vals, *r);
    garbler.join();
    if (garbler_err) std::rethrow_exception(garbler_err);

    double y = gc::fixed_decode(res.outputs[0], spec);
    if (y == nn::infer_gc_fixed(m, inputs[i], spec)) exact++;
    auto st = a->stats();
    traffic_ok = traffic_ok && st.flights == 7 && st.round_trips == 3;
  }
  bool ok = exact == 100 && traffic_ok;
  return {ok, fmt("%d/100 sessions bit-exact against the fixed-point reference, "
                  "7 flights / 3 round trips each: %s",
                  exact, traffic_ok ? "yes" : "NO")};
}

// ---- 6: garble/evaluate equals plain evaluation on random circuits --------

Outcome check_garbling_oracle() {
  std::mt19937_64 rng(60606);
  const int trials = 50;
  int agree = 0;
  bool sizes_ok = true;
  for (int t = 0; t < trials; t++) {
    auto c = random_circuit(rng);
    std::vector<std::vector<uint8_t>> inputs;
    for (const auto& grp : c.input_groups) {
      std::vector<uint8_t> bits;
      for (size_t k = 0; k < grp.size(); k++) bits.push_back(rng() & 1);
      inputs.push_back(bits);
    }

    Label delta = gcrt::random_label(rng);
    delta.lo |= 1;
    std::vector<std::vector<Label>> preset(c.input_groups.size());
    auto g = gcrt::garble_step(c, 0, delta, preset, rng);
    sizes_ok = sizes_ok && g.tables.size() == (size_t)gc::circuit_stats(c).and_count * 32;

    std::vector<std::vector<Label>> active(c.input_groups.size());
    for (size_t i = 0; i < inputs.size(); i++)
      for (size_t k = 0; k < inputs[i].size(); k++)
        active[i].push_back(inputs[i][k] ? g.in0[i][k] ^ delta : g.in0[i][k]);
    auto out = gcrt::eval_step(c, 0, g.tables, active, g.const_active);
    auto got = gcrt::decode_outputs(out, gcrt::decode_bits(g));
    if (got == gc::eval_plain(c, inputs)) agree++;
  }

  // a linear circuit must cost zero table bytes
  gc::BooleanCircuit lin;
  lin.input_groups.push_back({0, 1, 2, 3});
  lin.wire_count = 4;
  lin.gates.push_back({gc::GateKind::Xor, 0, 1, 4});
  lin.gates.push_back({gc::GateKind::Xor, 2, 3, 5});
  lin.gates.push_back({gc::GateKind::Xor, 4, 5, 6});
  lin.wire_count = 7;
  lin.outputs = {6};
  Label delta = gcrt::random_label(rng);
  delta.lo |= 1;
  std::vector<std::vector<Label>> lin_preset(lin.input_groups.size());
  auto gl = gcrt::garble_step(lin, 0, delta, lin_preset, rng);
  bool free_xor = gl.tables.empty();

  bool ok = agree == trials && sizes_ok && free_xor;
  return {ok, fmt("%d/%d random circuits agree with plain evaluation, table bytes == "
                  "32 * AND count %s, all-XOR circuit ships 0 table bytes %s",
                  agree, trials, sizes_ok ? "everywhere" : "VIOLATED",
                  free_xor ? "yes" : "NO")};
}

// ---- 7: batching amortizes key setup but never garbling -------------------

Outcome check_amortization() {
  auto m = nn::load_model(repo("models/canonical.json"));
  const std::vector<double> probe = {1.0, -1.0, 0.5};

  harness::RunConfig gcfg;
  gcfg.mode = harness::Mode::Gc;
  gcfg.seed = 5;
  auto g1 = harness::run_experiment(m, {probe}, gcfg);
  auto g3 = harness::run_experiment(m, {probe, probe, probe}, gcfg);
  auto total = [](const harness::RunReport& r) {
    return (double)(r.comm.bytes_a_to_b + r.comm.bytes_b_to_a);
  };
  double t1 = total(g1), t3 = total(g3);
  bool gc_linear = std::fabs(t3 - 3.0 * t1) <= 0.01 * 3.0 * t1;

  harness::RunConfig fcfg;
  fcfg.mode = harness::Mode::Fhe;
  fcfg.params = ckks::make_params(8192, {60, 40, 30, 30, 30}, std::ldexp(1.0, 30));
  fcfg.reuse_keys = true;
  fcfg.seed = 5;
  auto f1 = harness::run_experiment(m, {probe}, fcfg);
  auto f3 = harness::run_experiment(m, {probe, probe, probe}, fcfg);
  double b1 = total(f1), b3 = total(f3);
  double marginal = (b3 - b1) / 2.0;
  bool fhe_amortized = marginal < 0.05 * b1;

  bool ok = gc_linear && fhe_amortized;
  return {ok, fmt("garbled bytes 1->3 inferences %.0f -> %.0f (3x within 1%%: %s); "
                  "encrypted marginal %.0f bytes/inference vs %.0f setup (under 5%%: %s)",
                  t1, t3, gc_linear ? "yes" : "NO", marginal, b1,
                  fhe_amortized ? "yes" : "NO")};
}

// ---- 8: cost grows linearly with stacked hidden layers --------------------

Outcome check_depth_scaling() {
  auto m = nn::load_model(repo("models/canonical.json"));
  auto points = harness::run_gc_scaling(m, {1.0, -1.0, 0.5}, 4, 8, gc::FixedPointSpec{});
  std::vector<double> xs, bytes;
  for (const auto& p : points) {
    xs.push_back(p.layers);
    bytes.push_back((double)p.session_bytes);
  }
  double r2 = harness::linear_fit_r2(xs, bytes);
  bool ok = points.size() == 4 && r2 > 0.99;
  return {ok, fmt("session bytes over depths 1..4 fit a line with R^2 = %.6f (floor 0.99), "
                  "deepest run ships %.1f MB",
                  r2, bytes.back() / 1e6)};
}

// ---- 9: the paradigms order as expected on latency, traffic, memory -------

Outcome check_orderings() {
  auto m = nn::load_model(repo("models/canonical.json"));
  std::vector<std::vector<double>> inputs = {{1.0, -1.0, 0.5}, {0.3, 0.2, -0.6}};

  harness::RunConfig pcfg;
  pcfg.mode = harness::Mode::Plain;
  auto plain = harness::run_experiment(m, inputs, pcfg);

  harness::RunConfig gcfg;
  gcfg.mode = harness::Mode::Gc;
  gcfg.channel = harness::Channel::Tcp;
  gcfg.seed = 5;
  auto gcr = harness::run_experiment(m, inputs, gcfg);

  harness::RunConfig fcfg;
  fcfg.mode = harness::Mode::Fhe;
  fcfg.channel = harness::Channel::Tcp;
  fcfg.reuse_keys = true;
  fcfg.seed = 5;
  auto fhe = harness::run_experiment(m, inputs, fcfg);

  auto total = [](const harness::RunReport& r) {
    return (double)(r.comm.bytes_a_to_b + r.comm.bytes_b_to_a);
  };
  bool rtt_ok = plain.seconds_per_inference < gcr.seconds_per_inference &&
                gcr.seconds_per_inference < fhe.seconds_per_inference;
  bool bytes_ok = total(plain) == 0 && total(gcr) > 0 && total(gcr) < total(fhe);
  long gc_peak = std::max(gcr.client_maxrss_kb, gcr.server_maxrss_kb);
  long fhe_peak = std::max(fhe.client_maxrss_kb, fhe.server_maxrss_kb);
  bool mem_ok = gc_peak < fhe_peak;

  bool ok = rtt_ok && bytes_ok && mem_ok;
  return {ok, fmt("per-inference %.4f s plain < %.2f s garbled < %.2f s encrypted: %s; "
                  "traffic 0 < %.1f MB < %.1f MB: %s; peak rss %ld MB < %ld MB: %s",
                  plain.seconds_per_inference, gcr.seconds_per_inference,
                  fhe.seconds_per_inference, rtt_ok ? "yes" : "NO", total(gcr) / 1e6,
                  total(fhe) / 1e6, bytes_ok ? "yes" : "NO", gc_peak / 1024, fhe_peak / 1024,
                  mem_ok ? "yes" : "NO")};
}

// ---- 10: accuracy story on the stress set ---------------------------------

Outcome check_deviation_report() {
  auto m = nn::load_model(repo("models/canonical.json"));
  auto inputs = nn::load_inputs(repo("inputs/stress.json"));

  harness::RunConfig gcfg;
  gcfg.mode = harness::Mode::Gc;
  gcfg.seed = 5;
  auto gcr = harness::run_experiment(m, inputs, gcfg);

  harness::RunConfig fcfg;
  fcfg.mode = harness::Mode::Fhe;
  fcfg.reuse_keys = true;
  fcfg.seed = 5;
  auto fhe = harness::run_experiment(m, inputs, fcfg);

  bool ok = gcr.worst_deviation_pct < fhe.worst_deviation_pct;
  return {ok, fmt("over %zu stress inputs the garbled path stays within %.2f%% of plain "
                  "while the encrypted path reaches %.1f%% (square+poly2 drift)",
                  inputs.size(), gcr.worst_deviation_pct, fhe.worst_deviation_pct)};
}

// ---- 11: activation plot data reproduces the curves exactly ---------------

Outcome check_plot_data() {
  const std::string path = "/tmp/secnn_acceptance_plot.json";
  harness::write_activation_plot_data(path);
  std::ifstream in(path);
  nlohmann::json j;
  in >> j;
  std::remove(path.c_str());

  const auto& relu = j["relu_vs_square"];
  const auto& sig = j["sigmoid_vs_poly"];
  bool sizes_ok = relu.size() == 121 && sig.size() == 121;
  bool grid_ok = sizes_ok && relu.front()["x"].get<double>() == -6.0 &&
                 relu.back()["x"].get<double>() == 6.0;
  bool values_ok = sizes_ok;
  for (size_t i = 0; sizes_ok && i < 121; i++) {
    double x = -6.0 + 0.1 * (double)i;
    values_ok = values_ok && relu[i]["x"].get<double>() == x &&
                relu[i]["relu"].get<double>() == (x > 0 ? x : 0.0) &&
                relu[i]["square"].get<double>() == x * x &&
                sig[i]["z"].get<double>() == x &&
                sig[i]["exact"].get<double>() == nn::sigmoid_exact(x) &&
                sig[i]["poly"].get<double>() == nn::sigmoid_poly2(x);
  }
  bool ok = sizes_ok && grid_ok && values_ok;
  return {ok, fmt("121 samples per curve across [-6, 6] %s, every relu/square and "
                  "sigmoid/poly2 value reproduced bit-exactly %s",
                  grid_ok ? "present" : "MISSING", values_ok ? "yes" : "NO")};
}

}  // namespace

int main() {
  printf("workbench acceptance, model %s\n", repo("models/canonical.json").c_str());
  fflush(stdout);

  gate(1, "ckks roundtrip", check_roundtrip);
  gate(2, "homomorphic ops vs slotwise reference", check_homomorphism);
  gate(3, "modulus budget table", check_budget_table);
  gate(4, "encrypted inference, one round trip", check_fhe_end_to_end);
  gate(5, "garbled inference, seven flights", check_gc_end_to_end);
  gate(6, "garbling vs plain circuit evaluation", check_garbling_oracle);
  gate(7, "setup amortization", check_amortization);
  gate(8, "depth scaling linearity", check_depth_scaling);
  gate(9, "latency/traffic/memory ordering", check_orderings);
  gate(10, "stress-set deviation comparison", check_deviation_report);
  gate(11, "activation plot data", check_plot_data);

  if (g_failures == 0)
    printf("all 11 checks passed\n");
  else
    printf("%d of 11 checks FAILED\n", g_failures);
  return g_failures;
}
