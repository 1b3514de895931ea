#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cdid {

// Stream tags. A generator is identified by (seed, tag, a, b); the same
// identity always yields the same sequence on every platform, so parallel
// work that derives one stream per task is schedule independent.
enum class Stream : std::uint32_t {
  simulate = 1,      // a = period
  hyper = 2,         // DGP hyper-parameter draws
  bootstrap = 3,     // a = replicate, b = period
  oracle = 4,        // a = evaluation index
  dominance = 5,     // a = replicate
  user = 6,
};

/// Seedable generator built on std::mt19937_64 and std::seed_seq, both of
/// which are fully specified by the standard. Distributions are implemented
/// here rather than through <random> so the output is bit-identical across
/// standard libraries.
class Rng {
public:
  Rng(std::uint64_t seed, Stream tag, std::uint64_t a = 0, std::uint64_t b = 0);

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() {
    double u;
    do { u = uniform(); } while (u == 0.0);
    return u;
  }

  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  /// Standard normal by the polar method.
  double normal();

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cdid
