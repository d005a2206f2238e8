#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "secnn/ckks.hpp"
#include "secnn/gc_circuits.hpp"
#include "secnn/nn_model.hpp"
#include "secnn/transport.hpp"

namespace secnn::harness {

// Benchmark orchestration: run one inference batch under a chosen paradigm
// and channel, and report latency, traffic, peak memory, and accuracy side
// by side. The client plays endpoint A throughout (it holds the inputs and
// learns the outputs); the model owner serves as endpoint B.

enum class Mode { Plain, Gc, Fhe };

// Inproc runs both parties in one process on an in-memory channel (peak RSS
// is shared); Tcp forks each party into its own process over loopback so the
// two sides get separate memory accounting.
enum class Channel { Inproc, Tcp };

std::string mode_name(Mode m);

struct RunConfig {
  Mode mode = Mode::Plain;
  Channel channel = Channel::Inproc;
  ckks::CkksParams params = ckks::paper_preset();  // Fhe only
  bool reuse_keys = false;                         // Fhe only: one SETUP, then input frames
  gc::FixedPointSpec spec{};                       // Gc only
  uint64_t seed = 1;
  std::string tcp_addr;  // Tcp only; empty picks a free loopback port
};

struct RunReport {
  std::vector<double> outputs;  // one per input, in order
  std::vector<double> plain;    // cleartext reference on the same inputs
  double total_seconds = 0;     // wall clock for the whole batch, setup included
  double seconds_per_inference = 0;
  transport::CommStats comm;  // client-side view; all zero for Mode::Plain
  long client_maxrss_kb = 0;
  long server_maxrss_kb = 0;       // 0 when both parties share one process
  double worst_deviation_pct = 0;  // vs plain; absolute fallback at plain == 0
  double mean_deviation_pct = 0;
};

RunReport run_experiment(const nn::Model& m, const std::vector<std::vector<double>>& inputs,
                         const RunConfig& cfg);

// Garbled-circuit cost growth with network depth: one full session per depth
// over an in-process channel, deeper networks built by stacking hidden
// layers.
struct ScalingPoint {
  int layers = 1;
  uint64_t and_gates = 0;
  uint64_t session_bytes = 0;  // garbler-to-evaluator traffic for one inference
  double seconds = 0;
};
std::vector<ScalingPoint> run_gc_scaling(const nn::Model& m, const std::vector<double>& x,
                                         int max_layers, uint64_t seed,
                                         const gc::FixedPointSpec& spec);

// Coefficient of determination of the least-squares line through (xs, ys),
// for "cost grows linearly" checks. A zero-variance ys fits exactly.
double linear_fit_r2(const std::vector<double>& xs, const std::vector<double>& ys);

// Table emission. CSV carries the summary row per run; JSON additionally
// keeps the raw outputs.
struct ReportRow {
  std::string label;
  size_t inferences = 0;
  RunReport report;
};
void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows);
void write_report_json(const std::string& path, const std::vector<ReportRow>& rows);

// Data behind the accuracy story: over [-6, 6] in steps of 0.1, ReLU against
// the squaring that replaces it under encryption, and the logistic function
// against its degree-2 stand-in.
void write_activation_plot_data(const std::string& path);

}  // namespace secnn::harness
