#pragma once

#include <string>
#include <vector>

#include "secnn/gc_circuits.hpp"

namespace secnn::nn {

// Two-layer network: y = sigmoid(W2 . act(W1 x + b1) + b2), input width fixed
// at 3, one output.
struct Model {
  int d = 3;
  int h = 4;
  std::vector<std::vector<double>> W1;  // h rows x 3
  std::vector<double> b1;               // h
  std::vector<double> W2;               // 1 x h
  double b2 = 0;
};

Model make_model(int h, uint64_t seed);  // weights uniform in [-1, 1]

void validate_dims(const Model& m);  // Err::DimMismatch on any shape violation

Model load_model(const std::string& path);            // Err::ParseError / Err::DimMismatch
void save_model(const Model& m, const std::string& path);

std::vector<std::vector<double>> load_inputs(const std::string& path);  // JSON array of [x0,x1,x2]

// The three reference pipelines. Plain is the ground truth; the other two are
// the exact-arithmetic references for what each protocol actually computes:
// the homomorphic path squares instead of ReLU and uses the degree-2 sigmoid;
// the garbled path keeps exact ReLU but runs entirely in fixed point.
double infer_plain(const Model& m, const std::vector<double>& x);
double infer_fhe_approx(const Model& m, const std::vector<double>& x);
double infer_gc_fixed(const Model& m, const std::vector<double>& x, const gc::FixedPointSpec& spec);

double sigmoid_exact(double z);
double sigmoid_poly2(double z);  // 0.5 + 0.197 z - 0.004 z^2

// Percentage deviation vs the plain output; falls back to the absolute
// difference (flagged) when the plain output is exactly zero.
struct Deviation {
  double value = 0;
  bool absolute = false;
};
Deviation deviation(double y_mode, double y_plain);

// Garbled-circuit binding: the execution plan plus the garbler's fixed-point
// values packed in plan allocation order (per row: weights, then bias).
struct GcBinding {
  gc::Plan plan;
  std::vector<int64_t> garbler_vals;
};
GcBinding to_gc_plan(const Model& m, const gc::FixedPointSpec& spec);

// Same, but with extra_layers-1 additional h x h hidden layers stacked before
// the output layer (extra_layers = 1 is exactly to_gc_plan). Scaling sweeps
// use this; weights for the added layers are drawn small from the seed so
// values stay in range.
GcBinding to_gc_plan_deep(const Model& m, int extra_layers, uint64_t seed,
                          const gc::FixedPointSpec& spec);

std::vector<int64_t> encode_inputs(const std::vector<double>& x, const gc::FixedPointSpec& spec);

}  // namespace secnn::nn
