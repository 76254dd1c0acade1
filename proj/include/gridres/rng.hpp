#pragma once

#include <cstdint>

namespace gridres {

// Counter-based random stream: the i-th draw of stream s under seed k is
// splitmix64(key(k, s) + i), so any (seed, stream, index) triple can be
// replayed without generating its predecessors. Training uses one stream per
// iteration, Monte Carlo evaluation one per path; parallel consumers never
// share state.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream)
      : key_(mix(seed ^ mix(stream * 0x9e3779b97f4a7c15ull))) {}

  uint64_t next_u64() { return mix(key_ + ++counter_); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n); n must be positive. Multiply-shift bounding;
  // bias is negligible for the action-count ranges used here.
  uint32_t uniform_int(uint32_t n) {
    return static_cast<uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace gridres
