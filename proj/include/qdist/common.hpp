#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdist {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when a constraint set has no feasible region (or a witness fails
/// its strict-slack check at construction time).
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on file read/write failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

/// Exact log2 for power-of-two sizes; throws otherwise.
inline int log2_exact(std::size_t v) {
  if (!is_power_of_two(v)) {
    throw std::invalid_argument("size " + std::to_string(v) + " is not a power of two");
  }
  int n = 0;
  while ((std::size_t{1} << n) < v) ++n;
  return n;
}

namespace detail {

/// splitmix64 step; used to derive independent seed streams from
/// (seed, index) pairs so parallel restarts and per-evaluation shot
/// draws never share a stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return detail::splitmix64(detail::splitmix64(seed) ^ stream);
}

/// Uniform double in [0, 1) with fully specified bit-level behaviour
/// (std::uniform_real_distribution is implementation-defined).
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace qdist
