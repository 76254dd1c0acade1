#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridres {

// Malformed input: bad files, schema violations, unknown ids, out-of-range
// options, exceeded enumeration guards. CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine could not certify its result (LP iteration limit,
// singular basis, unexpectedly infeasible dispatch). CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline void input_check(bool ok, const std::string& msg) {
  if (!ok) throw InputError(msg);
}

// FNV-1a, used for content hashes in output headers.
inline uint64_t fnv1a(const void* data, size_t n,
                      uint64_t h = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

// Fixed-capacity bit set over line indices (not ids); value-type map key for
// the action and dispatch caches. Capacity 256 covers the bundled feeders
// with headroom; Network construction enforces the limit.
struct LineMask {
  static constexpr int kCapacity = 256;
  std::array<uint64_t, 4> w{};

  void set(int i) { w[static_cast<unsigned>(i) >> 6] |= 1ull << (i & 63); }
  void reset(int i) { w[static_cast<unsigned>(i) >> 6] &= ~(1ull << (i & 63)); }
  bool test(int i) const {
    return (w[static_cast<unsigned>(i) >> 6] >> (i & 63)) & 1u;
  }
  bool any() const { return (w[0] | w[1] | w[2] | w[3]) != 0; }
  friend bool operator==(const LineMask&, const LineMask&) = default;

  struct Hash {
    size_t operator()(const LineMask& m) const {
      uint64_t h = 1469598103934665603ull;
      for (uint64_t word : m.w) {
        h ^= word;
        h *= 1099511628211ull;
        h ^= h >> 29;
      }
      return static_cast<size_t>(h);
    }
  };
};

std::string join_ids(const std::vector<int>& ids, char sep = ',');

// Parses "3,7,12" (or the empty string) into a sorted id vector.
std::vector<int> parse_id_list(const std::string& text);

}  // namespace gridres
