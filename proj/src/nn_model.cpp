#include "secnn/nn_model.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

namespace secnn::nn {

using json = nlohmann::json;

void validate_dims(const Model& m) {
  require(m.d == 3, Err::DimMismatch, "input width must be 3");
  require(m.h >= 1, Err::DimMismatch, "hidden width must be positive");
  require((int)m.W1.size() == m.h, Err::DimMismatch, "W1 row count != h");
  for (const auto& row : m.W1)
    require((int)row.size() == m.d, Err::DimMismatch, "W1 row width != 3");
  require((int)m.b1.size() == m.h, Err::DimMismatch, "b1 length != h");
  require((int)m.W2.size() == m.h, Err::DimMismatch, "W2 length != h");
  for (const auto& row : m.W1)
    for (double v : row) require(std::isfinite(v), Err::ParseError, "non-finite weight");
}

namespace {

std::vector<double> affine_hidden(const Model& m, const std::vector<double>& x) {
  require((int)x.size() == m.d, Err::DimMismatch, "input length != 3");
  std::vector<double> z(m.h);
  for (int r = 0; r < m.h; r++) {
    double acc = 0;
    for (int c = 0; c < m.d; c++) acc += m.W1[(size_t)r][(size_t)c] * x[(size_t)c];
    z[(size_t)r] = acc + m.b1[(size_t)r];
  }
  return z;
}

double output_layer(const Model& m, const std::vector<double>& hidden) {
  double acc = 0;
  for (int r = 0; r < m.h; r++) acc += m.W2[(size_t)r] * hidden[(size_t)r];
  return acc + m.b2;
}

}  // namespace

Model make_model(int h, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Model m;
  m.h = h;
  m.W1.assign((size_t)h, std::vector<double>(3));
  for (auto& row : m.W1)
    for (auto& v : row) v = u(rng);
  m.b1.resize((size_t)h);
  for (auto& v : m.b1) v = u(rng);
  m.W2.resize((size_t)h);
  for (auto& v : m.W2) v = u(rng);
  m.b2 = u(rng);
  return m;
}

Model load_model(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), Err::ParseError, "cannot open model file: " + path);
  Model m;
  try {
    json j = json::parse(f);
    m.d = j.at("d").get<int>();
    m.h = j.at("h").get<int>();
    m.W1 = j.at("W1").get<std::vector<std::vector<double>>>();
    m.b1 = j.at("b1").get<std::vector<double>>();
    m.W2 = j.at("W2").get<std::vector<double>>();
    m.b2 = j.at("b2").get<double>();
  } catch (const json::exception& e) {
    fail(Err::ParseError, std::string("model file: ") + e.what());
  }
  validate_dims(m);
  return m;
}

void save_model(const Model& m, const std::string& path) {
  validate_dims(m);
  json j;
  j["d"] = m.d;
  j["h"] = m.h;
  j["W1"] = m.W1;
  j["b1"] = m.b1;
  j["W2"] = m.W2;
  j["b2"] = m.b2;
  std::ofstream f(path);
  require(f.good(), Err::ParseError, "cannot open output file: " + path);
  f << j.dump(2) << "\n";
}

std::vector<std::vector<double>> load_inputs(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), Err::ParseError, "cannot open input file: " + path);
  std::vector<std::vector<double>> xs;
  try {
    json j = json::parse(f);
    xs = j.get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    fail(Err::ParseError, std::string("input file: ") + e.what());
  }
  for (const auto& x : xs)
    require(x.size() == 3, Err::DimMismatch, "input vectors must have 3 entries");
  return xs;
}

double sigmoid_exact(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double sigmoid_poly2(double z) { return 0.5 + 0.197 * z - 0.004 * z * z; }

double infer_plain(const Model& m, const std::vector<double>& x) {
  validate_dims(m);
  auto z = affine_hidden(m, x);
  for (auto& v : z) v = v > 0 ? v : 0;
  return sigmoid_exact(output_layer(m, z));
}

double infer_fhe_approx(const Model& m, const std::vector<double>& x) {
  validate_dims(m);
  auto z = affine_hidden(m, x);
  for (auto& v : z) v = v * v;
  return sigmoid_poly2(output_layer(m, z));
}

double infer_gc_fixed(const Model& m, const std::vector<double>& x,
                      const gc::FixedPointSpec& spec) {
  validate_dims(m);
  require((int)x.size() == m.d, Err::DimMismatch, "input length != 3");
  auto xs = encode_inputs(x, spec);
  // Same operation order as the composed circuit plan: term-by-term
  // accumulation, per-row bias, exact ReLU, then the integer sigmoid.
  std::vector<int64_t> hidden((size_t)m.h);
  for (int r = 0; r < m.h; r++) {
    int64_t acc = 0;
    for (int c = 0; c < m.d; c++) {
      int64_t w = gc::fixed_encode(m.W1[(size_t)r][(size_t)c], spec);
      int64_t term = gc::ref_divscale(gc::ref_mul_full(w, xs[(size_t)c], spec), spec);
      acc = c == 0 ? term : gc::ref_add(acc, term, spec);
    }
    acc = gc::ref_add(acc, gc::fixed_encode(m.b1[(size_t)r], spec), spec);
    hidden[(size_t)r] = gc::ref_relu(acc, spec);
  }
  int64_t out = 0;
  for (int r = 0; r < m.h; r++) {
    int64_t w = gc::fixed_encode(m.W2[(size_t)r], spec);
    int64_t term = gc::ref_divscale(gc::ref_mul_full(w, hidden[(size_t)r], spec), spec);
    out = r == 0 ? term : gc::ref_add(out, term, spec);
  }
  out = gc::ref_add(out, gc::fixed_encode(m.b2, spec), spec);
  return gc::fixed_decode(gc::ref_poly2_sigmoid(out, spec), spec);
}

Deviation deviation(double y_mode, double y_plain) {
  if (y_plain == 0.0) return {std::abs(y_mode), true};
  return {100.0 * std::abs(y_mode - y_plain) / std::abs(y_plain), false};
}

std::vector<int64_t> encode_inputs(const std::vector<double>& x, const gc::FixedPointSpec& spec) {
  std::vector<int64_t> out;
  for (double v : x) out.push_back(gc::fixed_encode(v, spec));
  return out;
}

GcBinding to_gc_plan(const Model& m, const gc::FixedPointSpec& spec) {
  return to_gc_plan_deep(m, 1, 0, spec);
}

GcBinding to_gc_plan_deep(const Model& m, int extra_layers, uint64_t seed,
                          const gc::FixedPointSpec& spec) {
  validate_dims(m);
  require(extra_layers >= 1, Err::InvalidArgument, "layer count must be >= 1");
  GcBinding out;
  out.plan.spec = spec;
  out.plan.evaluator_count = 3;
  std::vector<gc::ValueRef> x = {{gc::Src::Evaluator, 0}, {gc::Src::Evaluator, 1},
                                 {gc::Src::Evaluator, 2}};

  auto live = gc::compose_layer(out.plan, (uint32_t)m.h, 3, true, gc::NetKind::Relu, x);
  for (int r = 0; r < m.h; r++) {
    for (int c = 0; c < 3; c++)
      out.garbler_vals.push_back(gc::fixed_encode(m.W1[(size_t)r][(size_t)c], spec));
    out.garbler_vals.push_back(gc::fixed_encode(m.b1[(size_t)r], spec));
  }

  // Extra hidden layers (scaling sweeps only) use small seeded weights so the
  // fixed-point values stay far from overflow.
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 1);
  std::uniform_real_distribution<double> u(-0.25, 0.25);
  for (int layer = 1; layer < extra_layers; layer++) {
    live = gc::compose_layer(out.plan, (uint32_t)m.h, (uint32_t)m.h, true, gc::NetKind::Relu,
                             live);
    for (int r = 0; r < m.h; r++) {
      for (int c = 0; c < m.h; c++) out.garbler_vals.push_back(gc::fixed_encode(u(rng), spec));
      out.garbler_vals.push_back(gc::fixed_encode(u(rng), spec));
    }
  }

  auto y = gc::compose_layer(out.plan, 1, (uint32_t)m.h, true, gc::NetKind::Poly2Sigmoid, live);
  for (int r = 0; r < m.h; r++) out.garbler_vals.push_back(gc::fixed_encode(m.W2[(size_t)r], spec));
  out.garbler_vals.push_back(gc::fixed_encode(m.b2, spec));

  out.plan.outputs = y;
  require(out.garbler_vals.size() == out.plan.garbler_count, Err::DimMismatch,
          "value packing does not match plan allocation");
  return out;
}

}  // namespace secnn::nn
