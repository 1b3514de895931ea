#pragma once

#include "cdid/core.hpp"
#include "cdid/data_model.hpp"
#include "cdid/distribution.hpp"

#include <array>
#include <cstdint>

namespace cdid {

inline constexpr double kDefaultTrimLower = 0.05;
inline constexpr double kDefaultTrimUpper = 0.95;

/// Estimated crossing point of two treatment CDFs.
struct CrossingPoint {
  double location = kNaN;
  double objective = kNaN;        // |Psi_n(location)|
  double trim_lower = kDefaultTrimLower;
  double trim_upper = kDefaultTrimUpper;
  Interval search_interval;
  double flat_set_width = 0.0;    // span of near-minimizers (tolerance 1e-12)
};

/// Smallest minimizer of |F2 - F1| over [F1^-1(trim_lower), F1^-1(trim_upper)],
/// where F1 is the ECDF of `first` treatments and F2 that of `reference`.
/// Psi_n is a step function, so enumerating pooled sample points is exact.
CrossingPoint estimate_crossing(const CrossSection& first, const CrossSection& reference,
                                double trim_lower = kDefaultTrimLower,
                                double trim_upper = kDefaultTrimUpper);

/// Rank map q(x) = F_source^-1(F_target(x)) between two treatment samples.
class RankMap {
public:
  RankMap(const Vector& source_treatments, const Vector& target_treatments, int source_period = 0,
          int target_period = 0);

  /// Points below the target support (F_target(x) == 0) are clamped to the
  /// source minimum; `clamped` reports it.
  double operator()(double x, bool* clamped = nullptr) const;

  int source_period() const { return source_period_; }
  int target_period() const { return target_period_; }
  const EmpiricalCdf& source() const { return source_; }
  const EmpiricalCdf& target() const { return target_; }

private:
  EmpiricalCdf source_;
  EmpiricalCdf target_;
  int source_period_;
  int target_period_;
};

/// q_t matching period-`target` treatments to equally ranked period-`source` ones.
RankMap rank_map(const Dataset& data, int source, int target);

struct DominanceResult {
  double statistic = kNaN;  // sup over [a, b] of F1 - F2
  double p_value = kNaN;
  int replicates = 0;
};

/// One-sided test of F1 <= F2 on [a, b] with a pooled-resampling bootstrap.
DominanceResult dominance_test(const CrossSection& first, const CrossSection& second,
                               Interval interval, int replicates, std::uint64_t seed);

inline constexpr std::array<double, 4> kDefaultKnots{12.0, 15.2, 23.4, 26.8};

/// Constrained piecewise-linear model of the inverse rank map:
///   m(x) = x + z0 (x-k0)+ + z1 (x-k1)+ + z2 (x-k2)+ - (z0+z1+z2) (x-k3)+.
struct PiecewiseQFit {
  std::array<double, 4> knots = kDefaultKnots;
  std::array<double, 3> zeta{0.0, 0.0, 0.0};
  double fit_error = 0.0;  // integrated squared residual over [k0, k3]

  double operator()(double x) const;
};

/// Least-squares fit of PiecewiseQFit to F2^-1 o F1 on a midpoint grid over
/// [k0, k3]. grid_step <= 0 selects (k3 - k0) / 400.
PiecewiseQFit fit_piecewise_q(const CrossSection& first, const CrossSection& second,
                              const std::array<double, 4>& knots = kDefaultKnots,
                              double grid_step = 0.0);

}  // namespace cdid
