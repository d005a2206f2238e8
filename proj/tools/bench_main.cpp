#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "secnn/harness.hpp"

using namespace secnn;

namespace {

ckks::CkksParams parse_preset(const std::string& s) {
  if (s == "paper") return ckks::paper_preset();
  if (s == "test") return ckks::test_preset();
  // custom form: degree:bits,bits,...:scalebits e.g. 8192:60,40,30,30,30:30
  auto c1 = s.find(':');
  auto c2 = s.rfind(':');
  require(c1 != std::string::npos && c2 != c1, Err::InvalidArgument,
          "preset must be 'paper', 'test', or degree:bits,...:scalebits");
  uint32_t degree = (uint32_t)std::stoul(s.substr(0, c1));
  std::vector<int> bits;
  std::string mid = s.substr(c1 + 1, c2 - c1 - 1);
  for (size_t p = 0; p < mid.size();) {
    auto q = mid.find(',', p);
    if (q == std::string::npos) q = mid.size();
    bits.push_back(std::stoi(mid.substr(p, q - p)));
    p = q + 1;
  }
  int scale_bits = std::stoi(s.substr(c2 + 1));
  return ckks::make_params(degree, bits, std::ldexp(1.0, scale_bits));
}

std::vector<std::vector<double>> repeat_inputs(std::vector<std::vector<double>> v, int times) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < times; i++) out.insert(out.end(), v.begin(), v.end());
  return out;
}

void print_rows(const std::vector<harness::ReportRow>& rows) {
  printf("%-16s %5s %10s %10s %12s %12s %7s %5s %11s %11s %10s %10s\n", "label", "n", "total_s",
         "per_inf_s", "A->B_bytes", "B->A_bytes", "flights", "RTs", "cli_rss_kB", "srv_rss_kB",
         "worst_dev%", "mean_dev%");
  for (const auto& row : rows) {
    const auto& r = row.report;
    printf("%-16s %5zu %10.3f %10.3f %12llu %12llu %7llu %5llu %11ld %11ld %10.3f %10.3f\n",
           row.label.c_str(), row.inferences, r.total_seconds, r.seconds_per_inference,
           (unsigned long long)r.comm.bytes_a_to_b, (unsigned long long)r.comm.bytes_b_to_a,
           (unsigned long long)r.comm.flights, (unsigned long long)r.comm.round_trips,
           r.client_maxrss_kb, r.server_maxrss_kb, r.worst_deviation_pct, r.mean_deviation_pct);
  }
}

void emit(const std::vector<harness::ReportRow>& rows, const std::string& csv,
          const std::string& js) {
  print_rows(rows);
  if (!csv.empty()) harness::write_report_csv(csv, rows);
  if (!js.empty()) harness::write_report_json(js, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-party inference benchmark workbench"};
  app.require_subcommand(1);

  std::string model_path = "models/canonical.json";
  std::string inputs_path = "inputs/stress.json";
  std::string mode_str = "plain", transport_str = "inproc", preset_str = "paper";
  std::string out_csv, out_json, out_path;
  bool reuse_keys = false;
  int repeat = 1, layers = 4, fixed_width = 64;
  long fixed_scale = 1000;
  uint64_t seed = 1;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--model", model_path, "model JSON path");
    c->add_option("--inputs", inputs_path, "inputs JSON path");
    c->add_option("--seed", seed, "randomness seed");
    c->add_option("--out", out_csv, "write CSV report here");
    c->add_option("--json", out_json, "write JSON report here");
    c->add_option("--repeat", repeat, "repeat the input list this many times")
        ->check(CLI::PositiveNumber);
    c->add_option("--transport", transport_str, "inproc | tcp")
        ->check(CLI::IsMember({"inproc", "tcp"}));
    c->add_option("--preset", preset_str, "paper | test | degree:bits,...:scalebits");
    c->add_flag("--reuse-keys", reuse_keys, "one key shipment for the whole batch (fhe)");
    c->add_option("--fixed-scale", fixed_scale, "fixed-point scale factor (gc)");
    c->add_option("--fixed-width", fixed_width, "fixed-point width in bits (gc)")
        ->check(CLI::IsMember({32, 64}));
  };

  CLI::App* run = app.add_subcommand("run", "run one mode over an input batch");
  run->add_option("--mode", mode_str, "plain | gc | fhe")
      ->required()
      ->check(CLI::IsMember({"plain", "gc", "fhe"}));
  add_common(run);

  CLI::App* compare = app.add_subcommand("compare", "run all three modes over the same batch");
  add_common(compare);

  CLI::App* sweep = app.add_subcommand("sweep", "garbled-circuit depth sweep");
  sweep->add_option("--model", model_path, "model JSON path");
  sweep->add_option("--layers", layers, "maximum depth")->check(CLI::Range(1, 16));
  sweep->add_option("--seed", seed, "randomness seed");
  sweep->add_option("--fixed-scale", fixed_scale, "fixed-point scale factor");
  sweep->add_option("--fixed-width", fixed_width, "fixed-point width in bits")
      ->check(CLI::IsMember({32, 64}));

  CLI::App* plot = app.add_subcommand("plot-data", "emit activation comparison series");
  plot->add_option("--out", out_path, "output JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (plot->parsed()) {
      harness::write_activation_plot_data(out_path);
      printf("wrote %s\n", out_path.c_str());
      return 0;
    }

    nn::Model m = nn::load_model(model_path);

    if (sweep->parsed()) {
      gc::FixedPointSpec spec{fixed_width, fixed_scale};
      auto pts = harness::run_gc_scaling(m, {1.0, -1.0, 0.5}, layers, seed, spec);
      printf("%6s %12s %14s %10s\n", "layers", "and_gates", "session_bytes", "seconds");
      std::vector<double> xs, ys;
      for (const auto& p : pts) {
        printf("%6d %12llu %14llu %10.3f\n", p.layers, (unsigned long long)p.and_gates,
               (unsigned long long)p.session_bytes, p.seconds);
        xs.push_back((double)p.layers);
        ys.push_back((double)p.session_bytes);
      }
      if (pts.size() >= 2) printf("bytes-vs-layers R^2 = %.6f\n", harness::linear_fit_r2(xs, ys));
      return 0;
    }

    auto inputs = repeat_inputs(nn::load_inputs(inputs_path), repeat);
    harness::RunConfig cfg;
    cfg.channel = transport_str == "tcp" ? harness::Channel::Tcp : harness::Channel::Inproc;
    cfg.params = parse_preset(preset_str);
    cfg.reuse_keys = reuse_keys;
    cfg.spec = gc::FixedPointSpec{fixed_width, fixed_scale};
    cfg.seed = seed;

    std::vector<harness::ReportRow> rows;
    auto one = [&](harness::Mode mode) {
      cfg.mode = mode;
      std::string label = harness::mode_name(mode) + "/" + transport_str;
      rows.push_back({label, inputs.size(), harness::run_experiment(m, inputs, cfg)});
    };
    if (compare->parsed()) {
      one(harness::Mode::Plain);
      one(harness::Mode::Gc);
      one(harness::Mode::Fhe);
    } else {
      one(mode_str == "gc"    ? harness::Mode::Gc
          : mode_str == "fhe" ? harness::Mode::Fhe
                              : harness::Mode::Plain);
    }
    emit(rows, out_csv, out_json);
  } catch (const std::exception& e) {
    fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
