// Deterministic counter-based random streams.
//
// Every random quantity in the library comes from a stream keyed by
// (seed, tag, a, b).  A stream costs one hash to construct, so call sites
// key one per logical unit (per dyad, per node-and-iteration, ...) and the
// values drawn never depend on evaluation order or on unrelated draws.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

namespace lfnet::rng {

// splitmix64 finalizer; bijective 64-bit scramble.
constexpr std::uint64_t scramble(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kWeyl = 0x9e3779b97f4a7c15ULL;

// Stream tags; must stay distinct so keyed streams never collide.
enum Tag : std::uint64_t {
  kTagDyad = 1,        // one uniform per generated dyad
  kTagLatent = 2,      // generator latent positions
  kTagBlock = 3,       // block assignments
  kTagInit = 4,        // variational initialization
  kTagPerm = 5,        // per-iteration node permutation
  kTagNode = 6,        // per-(iteration, node) sampling stream
  kTagDyadSample = 7,  // balanced evaluation dyads
};

struct Stream {
  std::uint64_t state = 0;

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }
  result_type operator()() {
    state += kWeyl;
    return scramble(state);
  }
};

inline Stream make_stream(std::uint64_t seed, std::uint64_t tag,
                          std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = scramble(seed + kWeyl);
  h = scramble(h ^ (tag + kWeyl));
  h = scramble(h ^ (a + kWeyl));
  h = scramble(h ^ (b + kWeyl));
  return Stream{h};
}

// Uniform on [0, 1), 53 bits.
inline double uniform01(Stream& s) { return double(s() >> 11) * 0x1.0p-53; }

// Uniform on (0, 1]; safe as a log() argument.
inline double uniform01_open(Stream& s) {
  return double((s() >> 11) + 1) * 0x1.0p-53;
}

// Unbiased integer in [0, n) via Lemire's multiply-reject method.
inline std::uint64_t below(Stream& s, std::uint64_t n) {
  unsigned __int128 m = static_cast<unsigned __int128>(s()) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    const std::uint64_t cutoff = -n % n;
    while (lo < cutoff) {
      m = static_cast<unsigned __int128>(s()) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Standard normal, Box-Muller cosine branch (two uniforms per call).
inline double normal01(Stream& s) {
  const double u1 = uniform01_open(s);
  const double u2 = uniform01(s);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Exp(1).
inline double exponential(Stream& s) { return -std::log(uniform01_open(s)); }

// Fisher-Yates permutation of 0..n-1.
inline std::vector<std::int32_t> permutation(std::int32_t n, Stream& s) {
  std::vector<std::int32_t> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (std::int32_t i = n - 1; i > 0; --i) {
    const auto k = static_cast<std::int32_t>(below(s, std::uint64_t(i) + 1));
    std::swap(p[std::size_t(i)], p[std::size_t(k)]);
  }
  return p;
}

}  // namespace lfnet::rng
