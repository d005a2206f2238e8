#include "secnn/harness.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/resource.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <thread>

#include "secnn/fhe_protocol.hpp"
#include "secnn/gc_runtime.hpp"
#include "secnn/ot.hpp"

namespace secnn::harness {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

long self_maxrss_kb() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return ru.ru_maxrss;  // kilobytes on Linux
}

int pick_free_port() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  require(fd >= 0, Err::SocketError, "socket creation failed");
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::bind(fd, (sockaddr*)&sa, sizeof sa) != 0) {
    ::close(fd);
    fail(Err::SocketError, "no free loopback port");
  }
  socklen_t len = sizeof sa;
  ::getsockname(fd, (sockaddr*)&sa, &len);
  int port = ntohs(sa.sin_port);
  ::close(fd);
  return port;
}

// Model owner's side of the channel: answer inferences until the peer hangs
// up. A closed channel is only ever observed between sessions, so it means a
// clean end of the batch.
void serve_peer(transport::Endpoint& ep, const nn::Model& m, const RunConfig& cfg) {
  if (cfg.mode == Mode::Fhe) {
    fhe::run_fhe_server(ep, m);
    return;
  }
  nn::GcBinding bind = nn::to_gc_plan(m, cfg.spec);
  for (uint64_t i = 0;; i++) {
    try {
      auto sender = ot::make_np_sender();
      gcrt::run_garbler(ep, bind.plan, bind.garbler_vals, *sender, cfg.seed + i);
    } catch (const Error& e) {
      if (e.code == Err::ChannelClosed) return;
      throw;
    }
  }
}

// Input owner's side. The garbled plan is public (it depends only on the
// architecture), so the client derives it from the same model and ignores
// the weight bindings.
std::vector<double> drive_client(transport::Endpoint& ep, const nn::Model& m,
                                 const std::vector<std::vector<double>>& inputs,
                                 const RunConfig& cfg) {
  if (cfg.mode == Mode::Fhe)
    return fhe::run_fhe_client(ep, cfg.params, m.h, inputs, cfg.reuse_keys, cfg.seed);
  gc::Plan plan = nn::to_gc_plan(m, cfg.spec).plan;
  std::vector<double> ys;
  ys.reserve(inputs.size());
  for (const auto& x : inputs) {
    auto receiver = ot::make_np_receiver();
    auto res = gcrt::run_evaluator(ep, plan, nn::encode_inputs(x, cfg.spec), *receiver);
    ys.push_back(gc::fixed_decode(res.outputs[0], cfg.spec));
  }
  ep.close();
  return ys;
}

// Forked-party plumbing: the child runs `work` and ships one JSON blob back
// through a pipe; abnormal ends surface as an "error" field.
pid_t fork_child(const std::function<json()>& work, int& read_fd) {
  int fds[2];
  require(::pipe(fds) == 0, Err::SocketError, "pipe creation failed");
  pid_t pid = ::fork();
  require(pid >= 0, Err::SocketError, "fork failed");
  if (pid == 0) {
    ::close(fds[0]);
    json j;
    int status = 0;
    try {
      j = work();
    } catch (const std::exception& e) {
      j = json{{"error", e.what()}};
      status = 1;
    }
    std::string s = j.dump();
    size_t off = 0;
    while (off < s.size()) {
      ssize_t k = ::write(fds[1], s.data() + off, s.size() - off);
      if (k <= 0) break;
      off += (size_t)k;
    }
    ::close(fds[1]);
    ::_exit(status);
  }
  ::close(fds[1]);
  read_fd = fds[0];
  return pid;
}

json read_child(int fd, pid_t pid, const char* who) {
  std::string s;
  char buf[4096];
  ssize_t k;
  while ((k = ::read(fd, buf, sizeof buf)) > 0) s.append(buf, (size_t)k);
  ::close(fd);
  int st = 0;
  ::waitpid(pid, &st, 0);
  json j = json::parse(s, nullptr, false);
  require(!j.is_discarded(), Err::ProtocolAbort, std::string(who) + " child sent no usable report");
  if (j.contains("error"))
    fail(Err::ProtocolAbort, std::string(who) + " child failed: " + j["error"].get<std::string>());
  return j;
}

void fill_accuracy(const nn::Model& m, const std::vector<std::vector<double>>& inputs,
                   RunReport& r) {
  r.plain.clear();
  double worst = 0, sum = 0;
  for (size_t i = 0; i < inputs.size(); i++) {
    r.plain.push_back(nn::infer_plain(m, inputs[i]));
    double d = nn::deviation(r.outputs[i], r.plain[i]).value;
    worst = std::max(worst, d);
    sum += d;
  }
  r.worst_deviation_pct = worst;
  r.mean_deviation_pct = inputs.empty() ? 0 : sum / (double)inputs.size();
}

RunReport run_inproc(const nn::Model& m, const std::vector<std::vector<double>>& inputs,
                     const RunConfig& cfg) {
  auto [a, b] = transport::make_inproc_pair();
  RunReport r;
  std::exception_ptr server_err;
  auto t0 = Clock::now();
  std::thread server([&] {
    try {
      serve_peer(*b, m, cfg);
    } catch (...) {
      server_err = std::current_exception();
    }
    b->close();  // a failed server must not leave the client blocked in recv
  });
  std::exception_ptr client_err;
  try {
    r.outputs = drive_client(*a, m, inputs, cfg);
  } catch (...) {
    client_err = std::current_exception();
    a->close();
  }
  server.join();
  r.total_seconds = seconds_since(t0);
  // the server error is the root cause when both sides fell over
  if (server_err) std::rethrow_exception(server_err);
  if (client_err) std::rethrow_exception(client_err);
  r.comm = a->stats();
  r.client_maxrss_kb = self_maxrss_kb();
  return r;
}

RunReport run_tcp(const nn::Model& m, const std::vector<std::vector<double>>& inputs,
                  const RunConfig& cfg) {
  std::string addr =
      cfg.tcp_addr.empty() ? "127.0.0.1:" + std::to_string(pick_free_port()) : cfg.tcp_addr;

  int server_fd = -1, client_fd = -1;
  pid_t server_pid = fork_child(
      [&]() -> json {
        auto ep = transport::listen_tcp(addr);
        serve_peer(*ep, m, cfg);
        return json{{"rss", self_maxrss_kb()}};
      },
      server_fd);
  pid_t client_pid = fork_child(
      [&]() -> json {
        auto ep = transport::connect_tcp(addr);
        auto t0 = Clock::now();
        std::vector<double> ys = drive_client(*ep, m, inputs, cfg);
        double dt = seconds_since(t0);
        auto st = ep->stats();
        return json{{"rss", self_maxrss_kb()},
                    {"seconds", dt},
                    {"outputs", ys},
                    {"a2b", st.bytes_a_to_b},
                    {"b2a", st.bytes_b_to_a},
                    {"flights", st.flights},
                    {"round_trips", st.round_trips}};
      },
      client_fd);

  json sj = read_child(server_fd, server_pid, "server");
  json cj = read_child(client_fd, client_pid, "client");

  RunReport r;
  r.outputs = cj["outputs"].get<std::vector<double>>();
  r.total_seconds = cj["seconds"].get<double>();
  r.comm.bytes_a_to_b = cj["a2b"].get<uint64_t>();
  r.comm.bytes_b_to_a = cj["b2a"].get<uint64_t>();
  r.comm.flights = cj["flights"].get<uint64_t>();
  r.comm.round_trips = cj["round_trips"].get<uint64_t>();
  r.client_maxrss_kb = cj["rss"].get<long>();
  r.server_maxrss_kb = sj["rss"].get<long>();
  return r;
}

}  // namespace

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::Plain: return "plain";
    case Mode::Gc: return "gc";
    case Mode::Fhe: return "fhe";
  }
  return "?";
}

RunReport run_experiment(const nn::Model& m, const std::vector<std::vector<double>>& inputs,
                         const RunConfig& cfg) {
  require(!inputs.empty(), Err::InvalidArgument, "no inputs to run");
  RunReport r;
  if (cfg.mode == Mode::Plain) {
    // The cleartext baseline has no second party and no channel.
    auto t0 = Clock::now();
    for (const auto& x : inputs) r.outputs.push_back(nn::infer_plain(m, x));
    r.total_seconds = seconds_since(t0);
    r.client_maxrss_kb = self_maxrss_kb();
  } else {
    r = cfg.channel == Channel::Inproc ? run_inproc(m, inputs, cfg) : run_tcp(m, inputs, cfg);
  }
  r.seconds_per_inference = r.total_seconds / (double)inputs.size();
  fill_accuracy(m, inputs, r);
  return r;
}

std::vector<ScalingPoint> run_gc_scaling(const nn::Model& m, const std::vector<double>& x,
                                         int max_layers, uint64_t seed,
                                         const gc::FixedPointSpec& spec) {
  std::vector<ScalingPoint> pts;
  for (int layers = 1; layers <= max_layers; layers++) {
    nn::GcBinding bind = nn::to_gc_plan_deep(m, layers, seed, spec);
    auto [a, b] = transport::make_inproc_pair();
    ScalingPoint p;
    p.layers = layers;
    p.and_gates = gcrt::plan_table_bytes(bind.plan) / 32;

    std::exception_ptr err;
    auto t0 = Clock::now();
    std::thread garbler([&] {
      try {
        auto sender = ot::make_np_sender();
        gcrt::run_garbler(*b, bind.plan, bind.garbler_vals, *sender, seed + (uint64_t)layers);
      } catch (...) {
        err = std::current_exception();
      }
      b->close();
    });
    std::exception_ptr eval_err;
    try {
      auto receiver = ot::make_np_receiver();
      gcrt::run_evaluator(*a, bind.plan, nn::encode_inputs(x, spec), *receiver);
    } catch (...) {
      eval_err = std::current_exception();
      a->close();
    }
    garbler.join();
    p.seconds = seconds_since(t0);
    if (err) std::rethrow_exception(err);
    if (eval_err) std::rethrow_exception(eval_err);
    p.session_bytes = a->stats().bytes_b_to_a;
    pts.push_back(p);
  }
  return pts;
}

double linear_fit_r2(const std::vector<double>& xs, const std::vector<double>& ys) {
  require(xs.size() == ys.size() && xs.size() >= 2, Err::InvalidArgument,
          "fit needs matched samples");
  const double n = (double)xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); i++) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  require(denom != 0, Err::InvalidArgument, "fit needs varying x");
  double slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0, mean_y = sy / n;
  for (size_t i = 0; i < xs.size(); i++) {
    double e = ys[i] - (slope * xs[i] + intercept);
    ss_res += e * e;
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  if (ss_tot == 0) return 1.0;  // flat data, exactly fit by a flat line
  return 1.0 - ss_res / ss_tot;
}

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows) {
  std::ofstream f(path);
  require(f.good(), Err::ParseError, "cannot open " + path);
  f << "label,inferences,total_seconds,seconds_per_inference,bytes_a_to_b,bytes_b_to_a,"
       "flights,round_trips,client_maxrss_kb,server_maxrss_kb,worst_deviation_pct,"
       "mean_deviation_pct\n";
  char buf[320];
  for (const auto& row : rows) {
    const RunReport& r = row.report;
    snprintf(buf, sizeof buf, "%s,%zu,%.6f,%.6f,%llu,%llu,%llu,%llu,%ld,%ld,%.6f,%.6f\n",
             row.label.c_str(), row.inferences, r.total_seconds, r.seconds_per_inference,
             (unsigned long long)r.comm.bytes_a_to_b, (unsigned long long)r.comm.bytes_b_to_a,
             (unsigned long long)r.comm.flights, (unsigned long long)r.comm.round_trips,
             r.client_maxrss_kb, r.server_maxrss_kb, r.worst_deviation_pct,
             r.mean_deviation_pct);
    f << buf;
  }
}

void write_report_json(const std::string& path, const std::vector<ReportRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    const RunReport& r = row.report;
    out.push_back({{"label", row.label},
                   {"inferences", row.inferences},
                   {"total_seconds", r.total_seconds},
                   {"seconds_per_inference", r.seconds_per_inference},
                   {"bytes_a_to_b", r.comm.bytes_a_to_b},
                   {"bytes_b_to_a", r.comm.bytes_b_to_a},
                   {"flights", r.comm.flights},
                   {"round_trips", r.comm.round_trips},
                   {"client_maxrss_kb", r.client_maxrss_kb},
                   {"server_maxrss_kb", r.server_maxrss_kb},
                   {"worst_deviation_pct", r.worst_deviation_pct},
                   {"mean_deviation_pct", r.mean_deviation_pct},
                   {"outputs", r.outputs},
                   {"plain", r.plain}});
  }
  std::ofstream f(path);
  require(f.good(), Err::ParseError, "cannot open " + path);
  f << out.dump(2) << "\n";
}

void write_activation_plot_data(const std::string& path) {
  json relu_rows = json::array();
  json sig_rows = json::array();
  for (int i = 0; i <= 120; i++) {
    double x = -6.0 + 0.1 * (double)i;
    relu_rows.push_back({{"x", x}, {"relu", x > 0 ? x : 0.0}, {"square", x * x}});
    sig_rows.push_back({{"z", x}, {"exact", nn::sigmoid_exact(x)}, {"poly", nn::sigmoid_poly2(x)}});
  }
  json out{{"lo", -6.0},
           {"hi", 6.0},
           {"step", 0.1},
           {"relu_vs_square", relu_rows},
           {"sigmoid_vs_poly", sig_rows}};
  std::ofstream f(path);
  require(f.good(), Err::ParseError, "cannot open " + path);
  f << out.dump(2) << "\n";
}

}  // namespace secnn::harness
