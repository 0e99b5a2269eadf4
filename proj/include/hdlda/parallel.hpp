#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "hdlda/rng.hpp"

namespace hdlda {

/// Runs fn(index) for every index in [0, count) across the given number of
/// worker threads. Indices are pulled from a shared counter in chunks; since
/// every index writes only its own slot in caller-owned storage, the result
/// is identical for any worker count.
template <typename Fn>
void parallel_for_index(std::size_t count, int threads, Fn&& fn) {
  if (threads < 1) threads = 1;
  if (threads == 1 || count < 512) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  constexpr std::size_t chunk = 256;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= count) return;
      const std::size_t end = std::min(begin + chunk, count);
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed) std::rethrow_exception(error);
}

/// Draws `count` replications, replication b using the stream
/// (seed, base_stream_id + b). Slot-assignment keeps the output independent
/// of the worker count.
template <typename Draw>
std::vector<double> replicate_draws(std::uint64_t seed, std::uint64_t base_stream_id,
                                    std::size_t count, int threads, Draw&& draw) {
  std::vector<double> out(count);
  parallel_for_index(count, threads, [&](std::size_t b) {
    RngStream stream(seed, base_stream_id + b);
    out[b] = draw(stream);
  });
  return out;
}

}  // namespace hdlda
