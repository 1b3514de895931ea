#include "cdid/trend.hpp"

#include "cdid/parallel.hpp"
#include "cdid/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cdid {

const char* to_string(TrendSource source) {
  switch (source) {
    case TrendSource::point: return "point";
    case TrendSource::interval: return "interval";
    case TrendSource::shift: return "shift";
  }
  return "unknown";
}

TrendMap::TrendMap(int period, TrendSource source, WeightedDistribution period_law,
                   WeightedDistribution reference_law)
    : period_(period),
      source_(source),
      period_law_(std::move(period_law)),
      reference_law_(std::move(reference_law)) {
  if (period_law_.empty() || reference_law_.empty()) {
    throw Error(ErrorKind::empty_window, "trend anchor law is empty");
  }
  median_period_ = period_law_.quantile(0.5);
  median_reference_ = reference_law_.quantile(0.5);
  const double spread_period = period_law_.quantile(0.9) - period_law_.quantile(0.1);
  const double spread_reference = reference_law_.quantile(0.9) - reference_law_.quantile(0.1);
  slope_ = spread_period / spread_reference;
  if (!(slope_ > 0.0) || !std::isfinite(slope_)) {
    slope_ = 1.0;
    flags.emplace_back("degenerate quantile spread; tails extrapolated with unit slope");
  }
}

TrendMap TrendMap::shift(int period, double shift) {
  TrendMap map;
  map.period_ = period;
  map.source_ = TrendSource::shift;
  map.shift_ = shift;
  return map;
}

namespace {

// Q_to(F_from(y)) at support points of `from`. Between two support points the
// value is y clamped to the images of its neighbors: continuous, monotone,
// the identity when both laws agree, and commuting with increasing maps.
double transport(double y, const WeightedDistribution& from, const WeightedDistribution& to) {
  const auto& v = from.values();
  auto it = std::lower_bound(v.begin(), v.end(), y);
  if (*it == y) return to.quantile(from.cdf(y));
  const double lo = to.quantile(from.cdf(*(it - 1)));
  const double hi = to.quantile(from.cdf(*it));
  return std::clamp(y, lo, hi);
}

}  // namespace

double TrendMap::g(double y, bool* extrapolated) const {
  if (extrapolated) *extrapolated = false;
  if (source_ == TrendSource::shift) return y + shift_;
  if (y >= reference_law_.min() && y <= reference_law_.max()) {
    return transport(y, reference_law_, period_law_);
  }
  if (extrapolated) *extrapolated = true;
  const double affine = median_period_ + slope_ * (y - median_reference_);
  if (y < reference_law_.min()) return std::min(affine, transport(reference_law_.min(), reference_law_, period_law_));
  return std::max(affine, transport(reference_law_.max(), reference_law_, period_law_));
}

double TrendMap::to_reference(double y, bool* extrapolated) const {
  if (extrapolated) *extrapolated = false;
  if (source_ == TrendSource::shift) return y - shift_;
  if (y >= period_law_.min() && y <= period_law_.max()) {
    return transport(y, period_law_, reference_law_);
  }
  if (extrapolated) *extrapolated = true;
  const double affine = median_reference_ + (y - median_period_) / slope_;
  if (y < period_law_.min()) return std::min(affine, transport(period_law_.min(), period_law_, reference_law_));
  return std::max(affine, transport(period_law_.max(), period_law_, reference_law_));
}

Interval TrendMap::identified_range() const {
  if (source_ == TrendSource::shift) return {-kInf, kInf};
  return {reference_law_.min(), reference_law_.max()};
}

Interval TrendMap::central_range(double p) const {
  if (source_ == TrendSource::shift) return {-kInf, kInf};
  return {reference_law_.quantile(p), reference_law_.quantile(1.0 - p)};
}

void TrendMap::build_grid(double lo, double hi, int size) {
  if (size < 2 || !(lo < hi)) {
    throw Error(ErrorKind::invalid_input, "trend grid needs size >= 2 and lo < hi");
  }
  grid_ = Vector::LinSpaced(size, lo, hi);
  g_values_.resize(size);
  for (Index i = 0; i < size; ++i) {
    g_values_[i] = g(grid_[i]);
    if (i > 0 && g_values_[i] < g_values_[i - 1]) {
      if (g_values_[i - 1] - g_values_[i] > 1e-10) {
        throw Error(ErrorKind::degenerate, "trend map is not monotone on its grid");
      }
      g_values_[i] = g_values_[i - 1];
    }
  }
}

TrendMap estimate_trend_point(const KernelSmoother& period, const KernelSmoother& reference,
                              int t, double anchor) {
  TrendMap map(t, TrendSource::point, period.distribution(anchor), reference.distribution(anchor));
  map.anchor = anchor;
  map.bandwidth_period = period.bandwidth();
  map.bandwidth_reference = reference.bandwidth();
  return map;
}

namespace {

void check_anchor_support(const CrossSection& section, double anchor) {
  if (anchor < section.treatments.minCoeff() || anchor > section.treatments.maxCoeff()) {
    std::ostringstream msg;
    msg << "crossing " << anchor << " lies outside the treatment support of period "
        << section.period;
    throw Error(ErrorKind::invalid_input, msg.str());
  }
}

void check_trend_period(const Dataset& data, int t) {
  if (t < 1 || t >= data.reference_period()) {
    throw Error(ErrorKind::invalid_input,
                "trend period must lie in 1.." + std::to_string(data.reference_period() - 1));
  }
}

}  // namespace

TrendMap estimate_trend_point(const Dataset& data, int t, const CrossingPoint& crossing,
                              const KernelSpec& spec, int grid_size) {
  check_trend_period(data, t);
  const auto& period = data.period(t);
  const auto& reference = data.reference();
  check_anchor_support(period, crossing.location);
  check_anchor_support(reference, crossing.location);
  KernelSmoother period_smoother(period, spec);
  KernelSmoother reference_smoother(reference, spec);
  auto map = estimate_trend_point(period_smoother, reference_smoother, t, crossing.location);
  if (grid_size > 0) {
    map.build_grid(reference.outcomes.minCoeff(), reference.outcomes.maxCoeff(), grid_size);
  }
  if (crossing.flat_set_width > 0.0) {
    map.flags.emplace_back("crossing set is an interval; consider an interval control set");
  }
  return map;
}

TrendMap estimate_trend_interval(const Dataset& data, int t, const IntervalSet& control,
                                 int grid_size) {
  check_trend_period(data, t);
  auto subsample = [&](const CrossSection& s, std::vector<double>& y, std::vector<double>& x) {
    for (Index i = 0; i < s.size(); ++i) {
      if (contains(control, s.treatments[i])) {
        y.push_back(s.outcomes[i]);
        x.push_back(s.treatments[i]);
      }
    }
    if (y.empty()) {
      throw Error(ErrorKind::empty_set,
                  "no period-" + std::to_string(s.period) + " observation in the control set");
    }
  };
  std::vector<double> y_t, x_t, y_ref, x_ref;
  subsample(data.period(t), y_t, x_t);
  subsample(data.reference(), y_ref, x_ref);

  std::vector<double> ones_t(y_t.size(), 1.0), ones_ref(y_ref.size(), 1.0);
  TrendMap map(t, TrendSource::interval, WeightedDistribution(y_t, ones_t),
               WeightedDistribution(y_ref, ones_ref));
  map.control_set = control;

  // The control set should itself be a crossing set: the restricted
  // treatment laws must agree. Flag a two-sample KS distance above the 5%
  // critical value.
  EmpiricalCdf fx_t(x_t), fx_ref(x_ref);
  double ks = 0.0;
  for (const auto* f : {&fx_t, &fx_ref}) {
    for (double v : f->sorted_values()) ks = std::max(ks, std::abs(fx_t(v) - fx_ref(v)));
  }
  const double m = static_cast<double>(x_t.size());
  const double n = static_cast<double>(x_ref.size());
  const double critical = 1.358 * std::sqrt((m + n) / (m * n));
  if (ks > critical) {
    std::ostringstream msg;
    msg << "treatment laws differ on the control set (KS " << ks << " > " << critical << ")";
    map.flags.push_back(msg.str());
  }
  if (grid_size > 0) {
    const auto& ref = data.reference().outcomes;
    map.build_grid(ref.minCoeff(), ref.maxCoeff(), grid_size);
  }
  return map;
}

double rc_shift(const TrendMap& trend) {
  if (trend.source() == TrendSource::shift) return trend.shift_value();
  // Support points of the reference anchor law, where g is an exact
  // quantile-quantile composition.
  std::vector<double> diffs;
  for (double y : trend.reference_law().values()) diffs.push_back(trend.g(y) - y);
  std::sort(diffs.begin(), diffs.end());
  const std::size_t cut = diffs.size() / 10;
  double acc = 0.0;
  for (std::size_t i = cut; i < diffs.size() - cut; ++i) acc += diffs[i];
  return acc / static_cast<double>(diffs.size() - 2 * cut);
}

AdjustedOutcomes adjust_outcomes(const CrossSection& section, const TrendMap& trend) {
  AdjustedOutcomes out;
  out.values.resize(section.size());
  for (Index i = 0; i < section.size(); ++i) {
    bool extrapolated = false;
    out.values[i] = trend.to_reference(section.outcomes[i], &extrapolated);
    if (extrapolated) ++out.extrapolated;
  }
  return out;
}

namespace {

Vector trend_difference(const KernelSmoother& period, const KernelSmoother& reference, int t,
                        double a, double b, const Vector& grid) {
  auto map_a = estimate_trend_point(period, reference, t, a);
  auto map_b = estimate_trend_point(period, reference, t, b);
  Vector d(grid.size());
  for (Index i = 0; i < grid.size(); ++i) d[i] = map_a.g(grid[i]) - map_b.g(grid[i]);
  return d;
}

}  // namespace

OverIdResult overid_diagnostic(const Dataset& data, int t, const CrossingPoint& first,
                               const CrossingPoint& second, const KernelSpec& spec, int grid_size,
                               int replicates, std::uint64_t seed) {
  check_trend_period(data, t);
  const auto& period = data.period(t);
  const auto& reference = data.reference();
  const double a = first.location;
  const double b = second.location;
  for (double anchor : {a, b}) {
    check_anchor_support(period, anchor);
    check_anchor_support(reference, anchor);
  }
  KernelSmoother period_smoother(period, spec);
  KernelSmoother reference_smoother(reference, spec);
  const double h = std::max(period_smoother.bandwidth(), reference_smoother.bandwidth());
  if (std::abs(a - b) < h) {
    throw Error(ErrorKind::invalid_input,
                "crossing points closer than one bandwidth; trends are not distinguishable");
  }
  if (grid_size < 2) grid_size = kDefaultTrendGrid;

  auto map_a = estimate_trend_point(period_smoother, reference_smoother, t, a);
  auto map_b = estimate_trend_point(period_smoother, reference_smoother, t, b);
  const Interval ca = map_a.central_range(0.05);
  const Interval cb = map_b.central_range(0.05);
  OverIdResult out;
  out.common_range = {std::max(ca.lo, cb.lo), std::min(ca.hi, cb.hi)};
  if (!(out.common_range.lo < out.common_range.hi)) {
    throw Error(ErrorKind::empty_set, "outcome laws at the two crossings do not overlap");
  }
  const Vector grid = Vector::LinSpaced(grid_size, out.common_range.lo, out.common_range.hi);
  const Vector d = trend_difference(period_smoother, reference_smoother, t, a, b, grid);
  out.statistic = d.cwiseAbs().maxCoeff();
  if (replicates <= 0) return out;

  std::vector<double> stats(static_cast<std::size_t>(replicates), kNaN);
  const auto family = spec.family;
  parallel_for(stats.size(), [&](std::size_t r) {
    Rng rng_t(seed, Stream::bootstrap, r, static_cast<std::uint64_t>(t));
    Rng rng_ref(seed, Stream::bootstrap, r, static_cast<std::uint64_t>(data.reference_period()));
    auto star_t = resample(period, rng_t);
    auto star_ref = resample(reference, rng_ref);
    try {
      KernelSmoother ps(star_t.treatments, star_t.outcomes, family,
                        resolve_bandwidth(spec, star_t.treatments));
      KernelSmoother rs(star_ref.treatments, star_ref.outcomes, family,
                        resolve_bandwidth(spec, star_ref.treatments));
      const Vector ds = trend_difference(ps, rs, t, a, b, grid);
      stats[r] = (ds - d).cwiseAbs().maxCoeff();
    } catch (const Error&) {
      // dropped replicate
    }
  });
  int valid = 0, exceed = 0;
  for (double s : stats) {
    if (std::isnan(s)) continue;
    ++valid;
    if (s >= out.statistic) ++exceed;
  }
  out.replicates = valid;
  if (valid > 0) out.p_value = static_cast<double>(1 + exceed) / static_cast<double>(valid + 1);
  return out;
}

}  // namespace cdid
