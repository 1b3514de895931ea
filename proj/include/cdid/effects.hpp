#pragma once

#include "cdid/core.hpp"
#include "cdid/data_model.hpp"
#include "cdid/empirical.hpp"
#include "cdid/kernel.hpp"
#include "cdid/trend.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cdid {

enum class EffectKind { att, qtt, ame_app, ame_avg, ame_rc, bound_lower, bound_upper };
const char* to_string(EffectKind kind);

struct EffectEstimate {
  EffectKind kind = EffectKind::att;
  double eval_x = kNaN;
  double counterfactual_x = kNaN;   // q_t(x); NaN for averaged kinds
  std::optional<double> quantile_p;
  double value = kNaN;
  std::optional<Interval> ci;
  int period_t = 0;
  double retained_fraction = 1.0;   // averaged kinds: share of period-T points used
  std::vector<std::string> flags;
};

/// Effect estimation for one comparison period t against the reference T.
///
/// Period-t outcomes are carried to the reference scale through the trend's
/// inverse before smoothing, so every effect is a contrast of reference-scale
/// conditional laws at q_t(x) and x.
class EffectEngine {
public:
  EffectEngine(const Dataset& data, int t, TrendMap trend, const KernelSpec& spec);

  int period() const { return t_; }
  const RankMap& rank() const { return rank_; }
  const TrendMap& trend() const { return trend_; }
  double reference_bandwidth() const { return reference_.bandwidth(); }
  /// Degeneracy tolerance for |q(x) - x|: 0.1 h_T.
  double default_tolerance() const { return 0.1 * reference_.bandwidth(); }
  const Vector& reference_treatments() const { return reference_x_; }

  /// q_t(x).
  double image(double x) const { return rank_(x); }

  EffectEstimate att(double x) const;
  /// Reference-scale conditional quantiles: {adjusted period t at q(x), period T at x}.
  std::pair<double, double> qtt_components(double p, double x) const;
  EffectEstimate qtt(double p, double x) const;
  EffectEstimate ame_app(double x, std::optional<double> tol_q = std::nullopt) const;
  EffectEstimate ame_avg(double c) const;
  EffectEstimate rc_ame(double x, std::optional<double> tol_q = std::nullopt) const;
  EffectEstimate rc_ame_overall(double c) const;

  /// E[Y_T adjusted | X_t = q] - E[Y_T | X_T = x], no metadata.
  double att_value(double x, double q) const;

private:
  EffectEstimate average(double c, EffectKind kind) const;

  int t_;
  TrendMap trend_;
  RankMap rank_;
  KernelSmoother period_;
  KernelSmoother reference_;
  Vector reference_x_;
};

struct Neighbors {
  double lower = -kInf;
  double upper = kInf;
  int lower_index = -1;   // position in the image list, -1 when infinite
  int upper_index = -1;
};

/// Closest images strictly below and above x' among those with |q - x| > tol.
Neighbors neighbors(double x, double xprime, std::span<const double> images, double tol = 0.0);

struct BoundsResult {
  double eval_x = kNaN;
  double counterfactual_x = kNaN;
  double lower = -kInf;
  double upper = kInf;
  Neighbors neighbors;
  std::vector<int> periods_used;
  bool point_identified = false;
};

/// Inputs shared by estimated and population bounds.
struct SecantProblem {
  double x = kNaN;
  double xprime = kNaN;                     // equal to x for AME bounds
  bool marginal = false;                    // AME bounds instead of ATT bounds
  std::vector<double> images;               // q_t(x), one per comparison period
  std::vector<int> periods;                 // labels matching images
  std::function<double(std::size_t)> att;   // Delta^ATT(x, images[i])
  std::function<double()> limit_ame;        // AME at a crossing, used when some |q - x| <= tol
  double tol = 0.0;
};

/// Secant bounds from the two neighbors. Both bounds are infinite when a
/// neighbor is missing. For AME queries at a crossing (some image within tol
/// of x) the AME is point identified and both bounds equal limit_ame().
BoundsResult secant_bounds(const SecantProblem& problem);

/// Estimated bounds over a set of comparison periods.
BoundsResult att_bounds(std::span<const EffectEngine> engines, double x, double xprime);
BoundsResult ame_bounds(std::span<const EffectEngine> engines, double x);

/// Limit of Delta^ATT(z, q_s(z)) / (q_s(z) - z) at a crossing x of period s:
/// least-squares slope through the origin over period-T points within 3 h_T.
double crossing_ame(const EffectEngine& engine, double x);

struct LinearityStatistic {
  double statistic = kNaN;
  std::vector<double> ratios;   // per usable period
  std::vector<int> periods;
};

/// max_{s,t} |ratio_s(x) - ratio_t(x)| over periods with |q_t(x) - x| > tol.
LinearityStatistic rc_linearity_statistic(std::span<const EffectEngine> engines, double x);

}  // namespace cdid
