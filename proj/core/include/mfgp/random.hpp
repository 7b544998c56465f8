#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mfgp {

/// Portable deterministic generator. Unlike the std distributions, every draw
/// here is specified bit-for-bit, so equal seeds give equal designs on any
/// standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream keyed by (seed, keys...), e.g. (seed, replicate, level).
  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform_open();

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// Mixes keys into a single 64-bit seed (splitmix64 finalizer chain).
std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

}  // namespace mfgp
