#pragma once

#include "cdid/data_model.hpp"
#include "cdid/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace cdid::test {

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline CrossSection section(int period, Vector y, Vector x) {
  CrossSection s;
  s.period = period;
  s.outcomes = std::move(y);
  s.treatments = std::move(x);
  return s;
}

inline Vector normals(Index n, std::uint64_t seed, std::uint64_t stream = 0, double loc = 0.0,
                      double scale = 1.0) {
  Rng rng(seed, Stream::user, stream);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = loc + scale * rng.normal();
  return v;
}

// Continuous (tie-free with probability one) sample with y depending on x.
inline CrossSection random_section(int period, Index n, std::uint64_t seed) {
  Vector x = normals(n, seed, 1, 1.0, 1.5);
  Vector e = normals(n, seed, 2);
  Vector y = (2.0 + 0.7 * x.array() + 0.15 * x.array().abs() + e.array()).matrix();
  return section(period, y, x);
}

// One sample used as both periods.
inline Dataset duplicated(Index n, std::uint64_t seed) {
  auto s = random_section(1, n, seed);
  auto r = s;
  r.period = 2;
  return Dataset({s, r});
}

// Apply f to every outcome of every period.
inline Dataset map_outcomes(const Dataset& d, const std::function<double(double)>& f) {
  std::vector<CrossSection> out = d.sections();
  for (auto& s : out) s.outcomes = s.outcomes.unaryExpr(f);
  return Dataset(out);
}

inline Dataset map_treatments(const Dataset& d, const std::function<double(double)>& f) {
  std::vector<CrossSection> out = d.sections();
  for (auto& s : out) s.treatments = s.treatments.unaryExpr(f);
  return Dataset(out);
}

template <typename F>
ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected cdid::Error");
  return ErrorKind::invalid_input;
}

}  // namespace cdid::test
