#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace twotime {

// Counter-based normal generator (Philox2x64-10 + Box-Muller).
//
// Every draw is a pure function of (master_seed, stream, epoch, index), so
// replicas can run in parallel, in any order, or resume from a checkpoint and
// still produce bit-identical trajectories.  "epoch" is a monotone counter
// advanced by the caller (one tick per integrator substep, slice init, ...).

namespace detail {

inline constexpr std::uint64_t kPhiloxM = 0xD2B74407B1CE6E93ULL;
inline constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct U128 {
  std::uint64_t hi, lo;
};

inline U128 mulwide(std::uint64_t a, std::uint64_t b) {
  __uint128_t p = static_cast<__uint128_t>(a) * b;
  return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
}

// 10-round Philox2x64 block: counter (c0,c1), 64-bit key.
inline U128 philox2x64(std::uint64_t c0, std::uint64_t c1, std::uint64_t key) {
  for (int r = 0; r < 10; ++r) {
    U128 p = mulwide(c0, kPhiloxM);
    c0 = p.hi ^ key ^ c1;
    c1 = p.lo;
    key += kWeyl;
  }
  return {c0, c1};
}

// maps to (0,1]; never 0, so log() below is safe
inline double u64_to_open_unit(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 1.0) * 0x1p-53;
}

inline double u64_to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1p-53;
}

}  // namespace detail

enum class StreamPurpose : std::uint32_t {
  field_noise = 0,
  slice_init = 1,
  pointer_noise = 2,
  nelson_noise = 3,
  state_init = 4,
};

struct CounterRng {
  std::uint64_t key = 0;

  static CounterRng make(std::uint64_t master_seed, std::uint32_t replica,
                         StreamPurpose purpose) {
    std::uint64_t stream =
        (static_cast<std::uint64_t>(replica) << 8) |
        static_cast<std::uint64_t>(purpose);
    CounterRng r;
    r.key = detail::splitmix64(detail::splitmix64(master_seed) + stream);
    return r;
  }

  // Two independent standard normals for (epoch, index).
  std::pair<double, double> gaussian_pair(std::uint64_t epoch,
                                          std::uint64_t index) const {
    detail::U128 w = detail::philox2x64(epoch, index, key);
    double u1 = detail::u64_to_open_unit(w.hi);
    double u2 = detail::u64_to_unit(w.lo);
    double r = std::sqrt(-2.0 * std::log(u1));
    double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  // Single standard normal addressed per site: sites share a Philox block in
  // pairs, so draws stay a pure function of (epoch, site).
  double gaussian(std::uint64_t epoch, std::uint64_t site) const {
    auto [z0, z1] = gaussian_pair(epoch, site >> 1);
    return (site & 1) ? z1 : z0;
  }

  std::uint64_t uniform_u64(std::uint64_t epoch, std::uint64_t index) const {
    return detail::philox2x64(epoch, index, key).hi;
  }
};

}  // namespace twotime
