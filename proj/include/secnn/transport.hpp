#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "secnn/errors.hpp"

namespace secnn::transport {

// Frame kinds shared by both protocols. SETUP and RESULT are the pinned FHE
// exchange tags; the rest cover key reuse and the garbled-circuit session.
enum class Kind : uint16_t {
  Setup = 1,
  Result = 2,
  FheInput = 3,
  OtReq = 4,
  OtResp = 5,
  Tables = 6,
  Reveal = 7,
  InputLabels = 8,
  DecodeBits = 9,
};

// Direction totals are named for the two endpoints of a pair: A is the side
// returned first by make_inproc_pair and the connecting side of a TCP pair.
// A flight is a maximal run of same-direction sends; a round trip is two
// consecutive flights (there and back).
struct CommStats {
  uint64_t bytes_a_to_b = 0;
  uint64_t bytes_b_to_a = 0;
  uint64_t flights = 0;
  uint64_t round_trips = 0;
};

class Endpoint {
 public:
  virtual ~Endpoint() = default;
  virtual void send(Kind kind, std::span<const uint8_t> payload) = 0;
  virtual std::pair<Kind, std::vector<uint8_t>> recv() = 0;
  virtual CommStats stats() const = 0;
  virtual void close() = 0;

  void set_frame_cap(uint64_t cap) { frame_cap_ = cap; }

 protected:
  uint64_t frame_cap_;
  Endpoint();
};

std::pair<std::unique_ptr<Endpoint>, std::unique_ptr<Endpoint>> make_inproc_pair();

// addr is "host:port". The listener accepts exactly one peer and acts as
// endpoint B; the connecting side is endpoint A. The connector retries
// briefly so the two parties need not start in a fixed order.
std::unique_ptr<Endpoint> listen_tcp(const std::string& addr);
std::unique_ptr<Endpoint> connect_tcp(const std::string& addr);

}  // namespace secnn::transport
