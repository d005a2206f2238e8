#include "secnn/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

#include "secnn/serial.hpp"

namespace secnn::transport {

namespace {

// Direction bookkeeping shared by both backends. Bytes include the 16-byte
// frame header so inproc and TCP report identical totals for the same trace.
struct StatsAcc {
  CommStats s;
  int last_dir = 0;  // 0 none, 1 a->b, 2 b->a

  void on_event(bool a_to_b, uint64_t frame_bytes) {
    (a_to_b ? s.bytes_a_to_b : s.bytes_b_to_a) += frame_bytes;
    int dir = a_to_b ? 1 : 2;
    if (dir != last_dir) {
      s.flights++;
      last_dir = dir;
    }
  }
  CommStats snapshot() const {
    CommStats out = s;
    out.round_trips = out.flights / 2;
    return out;
  }
};

struct InprocCore {
  std::mutex m;
  std::condition_variable cv;
  std::deque<std::pair<Kind, std::vector<uint8_t>>> q_ab, q_ba;
  StatsAcc acc;
  bool a_open = true, b_open = true;
};

class InprocEndpoint final : public Endpoint {
 public:
  InprocEndpoint(std::shared_ptr<InprocCore> core, bool is_a)
      : core_(std::move(core)), is_a_(is_a) {}
  ~InprocEndpoint() override { close(); }

  void send(Kind kind, std::span<const uint8_t> payload) override {
    require(payload.size() <= frame_cap_, Err::FrameTooLarge, "payload exceeds frame cap");
    std::lock_guard<std::mutex> lk(core_->m);
    bool& self_open = is_a_ ? core_->a_open : core_->b_open;
    bool& peer_open = is_a_ ? core_->b_open : core_->a_open;
    require(self_open && peer_open, Err::ChannelClosed, "send on a closed channel");
    auto& q = is_a_ ? core_->q_ab : core_->q_ba;
    q.emplace_back(kind, std::vector<uint8_t>(payload.begin(), payload.end()));
    core_->acc.on_event(is_a_, serial::kFrameHeaderBytes + payload.size());
    core_->cv.notify_all();
  }

  std::pair<Kind, std::vector<uint8_t>> recv() override {
    std::unique_lock<std::mutex> lk(core_->m);
    auto& q = is_a_ ? core_->q_ba : core_->q_ab;
    bool& peer_open = is_a_ ? core_->b_open : core_->a_open;
    core_->cv.wait(lk, [&] { return !q.empty() || !peer_open; });
    require(!q.empty(), Err::ChannelClosed, "peer closed with no frame pending");
    auto f = std::move(q.front());
    q.pop_front();
    return f;
  }

  CommStats stats() const override {
    std::lock_guard<std::mutex> lk(core_->m);
    return core_->acc.snapshot();
  }

  void close() override {
    std::lock_guard<std::mutex> lk(core_->m);
    (is_a_ ? core_->a_open : core_->b_open) = false;
    core_->cv.notify_all();
  }

 private:
  std::shared_ptr<InprocCore> core_;
  bool is_a_;
};

void write_all(int fd, const uint8_t* p, size_t n) {
  while (n > 0) {
    ssize_t k = ::write(fd, p, n);
    if (k < 0) {
      if (errno == EINTR) continue;
      fail(Err::SocketError, "socket write failed");
    }
    p += k;
    n -= (size_t)k;
  }
}

// Returns false on clean EOF before the first byte; mid-buffer EOF throws.
bool read_all(int fd, uint8_t* p, size_t n) {
  size_t got = 0;
  while (got < n) {
    ssize_t k = ::read(fd, p + got, n - got);
    if (k < 0) {
      if (errno == EINTR) continue;
      fail(Err::SocketError, "socket read failed");
    }
    if (k == 0) {
      require(got == 0, Err::SocketError, "connection dropped mid-frame");
      return false;
    }
    got += (size_t)k;
  }
  return true;
}

class TcpEndpoint final : public Endpoint {
 public:
  TcpEndpoint(int fd, bool is_a) : fd_(fd), is_a_(is_a) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpEndpoint() override { close(); }

  void send(Kind kind, std::span<const uint8_t> payload) override {
    require(payload.size() <= frame_cap_, Err::FrameTooLarge, "payload exceeds frame cap");
    require(fd_ >= 0, Err::ChannelClosed, "send on a closed channel");
    serial::ByteWriter w;
    serial::write_frame_header(w, (uint16_t)kind, payload.size());
    write_all(fd_, w.view().data(), w.view().size());
    if (!payload.empty()) write_all(fd_, payload.data(), payload.size());
    std::lock_guard<std::mutex> lk(m_);
    acc_.on_event(is_a_, serial::kFrameHeaderBytes + payload.size());
  }

  std::pair<Kind, std::vector<uint8_t>> recv() override {
    require(fd_ >= 0, Err::ChannelClosed, "recv on a closed channel");
    uint8_t hdr[serial::kFrameHeaderBytes];
    require(read_all(fd_, hdr, sizeof(hdr)), Err::ChannelClosed, "peer closed the connection");
    serial::ByteReader r(std::span<const uint8_t>(hdr, sizeof(hdr)));
    auto h = serial::read_frame_header(r);
    require(h.payload_len <= frame_cap_, Err::FrameTooLarge, "incoming frame exceeds cap");
    std::vector<uint8_t> payload(h.payload_len);
    if (h.payload_len > 0)
      require(read_all(fd_, payload.data(), payload.size()), Err::SocketError,
              "connection dropped mid-frame");
    {
      std::lock_guard<std::mutex> lk(m_);
      acc_.on_event(!is_a_, serial::kFrameHeaderBytes + h.payload_len);
    }
    return {(Kind)h.kind, std::move(payload)};
  }

  CommStats stats() const override {
    std::lock_guard<std::mutex> lk(m_);
    return acc_.snapshot();
  }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
  bool is_a_;
  mutable std::mutex m_;
  StatsAcc acc_;
};

sockaddr_in parse_addr(const std::string& addr) {
  auto colon = addr.rfind(':');
  require(colon != std::string::npos, Err::InvalidArgument, "address must be host:port");
  std::string host = addr.substr(0, colon);
  if (host == "localhost") host = "127.0.0.1";
  int port = std::atoi(addr.c_str() + colon + 1);
  require(port > 0 && port < 65536, Err::InvalidArgument, "bad port");
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons((uint16_t)port);
  require(inet_pton(AF_INET, host.c_str(), &sa.sin_addr) == 1, Err::InvalidArgument,
          "bad IPv4 host");
  return sa;
}

}  // namespace

Endpoint::Endpoint() : frame_cap_(serial::kDefaultFrameCap) {}

std::pair<std::unique_ptr<Endpoint>, std::unique_ptr<Endpoint>> make_inproc_pair() {
  auto core = std::make_shared<InprocCore>();
  return {std::make_unique<InprocEndpoint>(core, true),
          std::make_unique<InprocEndpoint>(core, false)};
}

std::unique_ptr<Endpoint> listen_tcp(const std::string& addr) {
  sockaddr_in sa = parse_addr(addr);
  int lfd = ::socket(AF_INET, SOCK_STREAM, 0);
  require(lfd >= 0, Err::SocketError, "socket() failed");
  int one = 1;
  ::setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(lfd, (const sockaddr*)&sa, sizeof(sa)) != 0) {
    ::close(lfd);
    fail(Err::SocketError, "bind failed (address in use?)");
  }
  if (::listen(lfd, 1) != 0) {
    ::close(lfd);
    fail(Err::SocketError, "listen failed");
  }
  int fd = ::accept(lfd, nullptr, nullptr);
  ::close(lfd);
  require(fd >= 0, Err::SocketError, "accept failed");
  return std::make_unique<TcpEndpoint>(fd, false);
}

std::unique_ptr<Endpoint> connect_tcp(const std::string& addr) {
  sockaddr_in sa = parse_addr(addr);
  // The peer may not be listening yet; retry briefly so party startup order
  // does not matter.
  for (int attempt = 0; attempt < 100; attempt++) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    require(fd >= 0, Err::SocketError, "socket() failed");
    if (::connect(fd, (const sockaddr*)&sa, sizeof(sa)) == 0)
      return std::make_unique<TcpEndpoint>(fd, true);
    ::close(fd);
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  fail(Err::SocketError, "connect failed after retries");
}

}  // namespace secnn::transport
