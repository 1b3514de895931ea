#include "cdid/rng.hpp"

#include <cmath>

namespace cdid {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, Stream tag, std::uint64_t a, std::uint64_t b) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), static_cast<std::uint32_t>(tag),
                    lo(a), hi(a), lo(b), hi(b)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, Stream tag, std::uint64_t a, std::uint64_t b)
    : engine_(make_engine(seed, tag, a, b)) {}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

}  // namespace cdid
