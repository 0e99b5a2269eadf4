#include "hdlda/rng.hpp"

namespace hdlda {

namespace {

constexpr std::uint32_t kPhiloxMul0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxWeyl1 = 0xBB67AE85u;

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t prod0 = std::uint64_t{kPhiloxMul0} * ctr[0];
    const std::uint64_t prod1 = std::uint64_t{kPhiloxMul1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(prod1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(prod1),
           static_cast<std::uint32_t>(prod0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(prod0)};
    key[0] += kPhiloxWeyl0;
    key[1] += kPhiloxWeyl1;
  }
  return ctr;
}

// splitmix64 finalizer; used only to spread substream indices over the id
// space.
std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

}  // namespace

void RngStream::refill() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_id_),
      static_cast<std::uint32_t>(stream_id_ >> 32)};
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  const auto out = philox4x32_10(ctr, key);
  buffer_[0] = out[0] | (std::uint64_t{out[1]} << 32);
  buffer_[1] = out[2] | (std::uint64_t{out[3]} << 32);
  available_ = 2;
  ++block_;
}

std::uint64_t RngStream::next_u64() {
  if (available_ == 0) refill();
  return buffer_[2 - available_--];
}

double RngStream::next_double() {
  // 53-bit mantissa, offset by half an ulp so 0 and 1 are excluded.
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

RngStream RngStream::substream(std::uint64_t index) const noexcept {
  const std::uint64_t child =
      mix64(stream_id_ + 0x9E3779B97F4A7C15ull * (index + 1));
  return RngStream(seed_, child);
}

}  // namespace hdlda
