#pragma once

// Pinned, reproducible random streams.
//
// All randomness in the library flows through RngStream so that results are
// bit-for-bit reproducible for a given seed on a given platform:
//   * generator: std::mt19937_64 (the engine itself is specified by the
//     standard, so its raw output is portable),
//   * uniform doubles: top 53 bits of the engine output,
//   * normals: Box-Muller on two uniforms (no cached spare, no rejection),
//   * substreams: derived with splitmix64 so that independent parts of an
//     experiment (matrix entries, right-hand side, weights, ...) do not
//     share a stream.

#include <cstdint>
#include <cmath>
#include <random>

namespace prsplit {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  // Substream `tag` of a base seed. Distinct tags give independent streams.
  static RngStream substream(std::uint64_t base, std::uint64_t tag) {
    return RngStream(splitmix64(base ^ splitmix64(tag)));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Inclusive range. The modulo bias is ~2^-57 for the ranges used here.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(gen_() % span);
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal() {
    const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace prsplit
