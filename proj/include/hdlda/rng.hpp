#pragma once

#include <array>
#include <cstdint>

namespace hdlda {

/// Counter-based random stream (Philox4x32-10).
///
/// A stream is fully identified by (seed, stream_id); the position within the
/// stream is a 64-bit block counter. Replaying a stream therefore reproduces
/// the exact draw sequence on any platform and with any thread layout, and
/// streams with distinct ids never share counter blocks. Monte Carlo loops
/// assign stream_id = base + b for replication b; within one draw, samplers
/// carve out child streams via substream().
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64();

  /// Uniform draw on the open interval (0, 1) with 53-bit resolution.
  double next_double();

  /// Child stream keyed by (stream_id, index). Children are statistically
  /// independent of the parent and of each other; deriving one does not
  /// advance the parent.
  RngStream substream(std::uint64_t index) const noexcept;

private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

}  // namespace hdlda
