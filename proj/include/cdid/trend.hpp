#pragma once

#include "cdid/core.hpp"
#include "cdid/data_model.hpp"
#include "cdid/distribution.hpp"
#include "cdid/empirical.hpp"
#include "cdid/kernel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cdid {

inline constexpr int kDefaultTrendGrid = 512;

enum class TrendSource { point, interval, shift };
const char* to_string(TrendSource source);

/// Monotone transport between the reference-period outcome scale and the
/// period-t scale.
///
/// g() carries a reference-period outcome to the period-t scale;
/// to_reference() is its inverse and places period-t outcomes on the
/// reference scale. At support points of the anchor laws both are exact
/// quantile-quantile compositions; between support points the argument is
/// clamped to the images of its two neighbors. Outside, they continue along the affine
/// approximation through the anchor medians with slope equal to the ratio of
/// the 10-90% quantile spreads, never crossing the edge values (so both stay
/// monotone).
class TrendMap {
public:
  /// Quantile-quantile transport between two anchor outcome laws.
  TrendMap(int period, TrendSource source, WeightedDistribution period_law,
           WeightedDistribution reference_law);

  /// Pure location trend g(y) = y + shift.
  static TrendMap shift(int period, double shift);

  int period() const { return period_; }
  TrendSource source() const { return source_; }

  double g(double y, bool* extrapolated = nullptr) const;
  double to_reference(double y, bool* extrapolated = nullptr) const;

  /// Reference-scale range where g is identified without extrapolation.
  Interval identified_range() const;
  /// Central [p, 1-p] quantile range of the reference anchor law.
  Interval central_range(double p) const;

  const WeightedDistribution& period_law() const { return period_law_; }
  const WeightedDistribution& reference_law() const { return reference_law_; }
  double tail_slope() const { return slope_; }
  double shift_value() const { return shift_; }

  /// Evaluates g on `size` uniform points over [lo, hi]; micro-inversions
  /// below 1e-10 are projected away.
  void build_grid(double lo, double hi, int size);
  const Vector& grid() const { return grid_; }
  const Vector& g_values() const { return g_values_; }

  // Provenance, serialized with the map.
  double anchor = kNaN;             // crossing location for point trends
  IntervalSet control_set;          // for interval trends
  double bandwidth_period = kNaN;
  double bandwidth_reference = kNaN;
  std::vector<std::string> flags;

private:
  TrendMap() = default;

  int period_ = 0;
  TrendSource source_ = TrendSource::point;
  WeightedDistribution period_law_;
  WeightedDistribution reference_law_;
  double median_period_ = 0.0;
  double median_reference_ = 0.0;
  double slope_ = 1.0;   // d(period scale) / d(reference scale)
  double shift_ = 0.0;
  Vector grid_;
  Vector g_values_;
};

/// g_t at a crossing point: F_{Y_t|X_t}^-1[F_{Y_T|X_T}(y | x*) | x*].
TrendMap estimate_trend_point(const Dataset& data, int t, const CrossingPoint& crossing,
                              const KernelSpec& spec, int grid_size = kDefaultTrendGrid);

/// Same, from prebuilt smoothers (outcome values) of periods t and T.
TrendMap estimate_trend_point(const KernelSmoother& period, const KernelSmoother& reference,
                              int t, double anchor);

/// g_t from the subsamples with treatment in a control set S.
TrendMap estimate_trend_interval(const Dataset& data, int t, const IntervalSet& control,
                                 int grid_size = kDefaultTrendGrid);

/// Location summary of g_t(y) - y under a pure-shift trend: mean of the
/// central 80% of the differences over the reference anchor support.
double rc_shift(const TrendMap& trend);

struct AdjustedOutcomes {
  Vector values;
  Index extrapolated = 0;
};

/// Places period-t outcomes on the reference scale.
AdjustedOutcomes adjust_outcomes(const CrossSection& section, const TrendMap& trend);

struct OverIdResult {
  double statistic = kNaN;  // sup |g_a - g_b| on the common grid
  double p_value = kNaN;    // NaN when no replicates were requested
  Interval common_range;
  int replicates = 0;
};

/// Compares the trends identified at two crossing points of the same period.
OverIdResult overid_diagnostic(const Dataset& data, int t, const CrossingPoint& first,
                               const CrossingPoint& second, const KernelSpec& spec,
                               int grid_size = kDefaultTrendGrid, int replicates = 0,
                               std::uint64_t seed = 0);

}  // namespace cdid
