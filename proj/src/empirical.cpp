#include "cdid/empirical.hpp"

#include "cdid/parallel.hpp"
#include "cdid/rng.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>

namespace cdid {

namespace {

constexpr double kFlatTolerance = 1e-12;

void check_trim(double lo, double hi) {
  if (!(lo > 0.0 && lo < hi && hi < 1.0)) {
    throw Error(ErrorKind::invalid_input, "trim probabilities must satisfy 0 < lo < hi < 1");
  }
}

// Sorted, deduplicated values of both samples inside [a, b].
std::vector<double> pooled_points(const EmpiricalCdf& f1, const EmpiricalCdf& f2, double a, double b) {
  std::vector<double> out;
  for (const auto* f : {&f1, &f2}) {
    const auto& v = f->sorted_values();
    auto lo = std::lower_bound(v.begin(), v.end(), a);
    auto hi = std::upper_bound(v.begin(), v.end(), b);
    out.insert(out.end(), lo, hi);
  }
  out.push_back(a);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

CrossingPoint estimate_crossing(const CrossSection& first, const CrossSection& reference,
                                double trim_lower, double trim_upper) {
  check_trim(trim_lower, trim_upper);
  EmpiricalCdf f1(first.treatments);
  EmpiricalCdf f2(reference.treatments);
  const double a = f1.quantile(trim_lower);
  const double b = f1.quantile(trim_upper);
  if (!(a < b)) {
    throw Error(ErrorKind::empty_set, "trimmed crossing search interval is empty");
  }
  auto candidates = pooled_points(f1, f2, a, b);
  std::vector<double> objective(candidates.size());
  double best = kInf;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    objective[i] = std::abs(f2(candidates[i]) - f1(candidates[i]));
    best = std::min(best, objective[i]);
  }
  CrossingPoint out;
  out.trim_lower = trim_lower;
  out.trim_upper = trim_upper;
  out.search_interval = {a, b};
  double last = kNaN;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (objective[i] <= best + kFlatTolerance) {
      if (std::isnan(out.location)) {
        out.location = candidates[i];
        out.objective = objective[i];
      }
      last = candidates[i];
    }
  }
  out.flat_set_width = last - out.location;
  return out;
}

RankMap::RankMap(const Vector& source_treatments, const Vector& target_treatments,
                 int source_period, int target_period)
    : source_(source_treatments),
      target_(target_treatments),
      source_period_(source_period),
      target_period_(target_period) {}

double RankMap::operator()(double x, bool* clamped) const {
  const double p = target_(x);
  if (clamped) *clamped = p <= 0.0;
  if (p <= 0.0) return source_.min();
  return source_.quantile(p);
}

RankMap rank_map(const Dataset& data, int source, int target) {
  return RankMap(data.period(source).treatments, data.period(target).treatments, source, target);
}

namespace {

double sup_difference(const EmpiricalCdf& f1, const EmpiricalCdf& f2, double a, double b) {
  double sup = -kInf;
  for (double x : pooled_points(f1, f2, a, b)) sup = std::max(sup, f1(x) - f2(x));
  return sup;
}

}  // namespace

DominanceResult dominance_test(const CrossSection& first, const CrossSection& second,
                               Interval interval, int replicates, std::uint64_t seed) {
  if (!(interval.lo < interval.hi)) {
    throw Error(ErrorKind::invalid_input, "dominance interval needs a < b");
  }
  if (replicates < 99) {
    throw Error(ErrorKind::invalid_input, "dominance test needs at least 99 replicates");
  }
  EmpiricalCdf f1(first.treatments);
  EmpiricalCdf f2(second.treatments);
  const double pooled_min = std::min(f1.min(), f2.min());
  const double pooled_max = std::max(f1.max(), f2.max());
  if (interval.hi < pooled_min || interval.lo > pooled_max) {
    throw Error(ErrorKind::invalid_input, "dominance interval lies outside the pooled support");
  }
  DominanceResult out;
  out.replicates = replicates;
  out.statistic = sup_difference(f1, f2, interval.lo, interval.hi);

  // Resampling both groups from the pooled sample imposes F1 == F2.
  std::vector<double> pooled(f1.sorted_values());
  pooled.insert(pooled.end(), f2.sorted_values().begin(), f2.sorted_values().end());
  const auto n1 = static_cast<std::size_t>(f1.size());
  const auto n2 = static_cast<std::size_t>(f2.size());
  std::vector<double> stats(static_cast<std::size_t>(replicates));
  parallel_for(stats.size(), [&](std::size_t r) {
    Rng rng(seed, Stream::dominance, r);
    std::vector<double> d1(n1), d2(n2);
    for (auto& v : d1) v = pooled[rng.index(pooled.size())];
    for (auto& v : d2) v = pooled[rng.index(pooled.size())];
    stats[r] = sup_difference(EmpiricalCdf(d1), EmpiricalCdf(d2), interval.lo, interval.hi);
  });
  const auto exceed = std::count_if(stats.begin(), stats.end(), [&](double s) {
    return s >= out.statistic - kFlatTolerance;
  });
  out.p_value = static_cast<double>(1 + exceed) / static_cast<double>(replicates + 1);
  return out;
}

double PiecewiseQFit::operator()(double x) const {
  auto pos = [](double v) { return v > 0.0 ? v : 0.0; };
  const double total = zeta[0] + zeta[1] + zeta[2];
  return x + zeta[0] * pos(x - knots[0]) + zeta[1] * pos(x - knots[1]) +
         zeta[2] * pos(x - knots[2]) - total * pos(x - knots[3]);
}

namespace {

// F2^-1 o F1 evaluated at the distinct values of the first sample, then
// linearly interpolated between them (the step map at sample points).
class QQInterpolant {
public:
  QQInterpolant(const EmpiricalCdf& f1, const EmpiricalCdf& f2) {
    const auto& v = f1.sorted_values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
      xs_.push_back(v[i]);
      ys_.push_back(f2.quantile(static_cast<double>(i + 1) / static_cast<double>(v.size())));
    }
  }

  double operator()(double x) const {
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const auto j = static_cast<std::size_t>(it - xs_.begin());
    const double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
    return ys_[j - 1] + t * (ys_[j] - ys_[j - 1]);
  }

private:
  std::vector<double> xs_, ys_;
};

}  // namespace

PiecewiseQFit fit_piecewise_q(const CrossSection& first, const CrossSection& second,
                              const std::array<double, 4>& knots, double grid_step) {
  for (int j = 0; j < 3; ++j) {
    if (!(knots[static_cast<std::size_t>(j)] < knots[static_cast<std::size_t>(j) + 1])) {
      throw Error(ErrorKind::invalid_input, "knots must be strictly ascending");
    }
  }
  const double span = knots[3] - knots[0];
  if (grid_step <= 0.0) grid_step = span / 400.0;
  if (!std::isfinite(grid_step)) throw Error(ErrorKind::invalid_input, "grid step must be finite");

  EmpiricalCdf f1(first.treatments);
  EmpiricalCdf f2(second.treatments);
  for (int j = 0; j < 3; ++j) {
    const double lo = knots[static_cast<std::size_t>(j)];
    const double hi = knots[static_cast<std::size_t>(j) + 1];
    const auto& v = f1.sorted_values();
    if (std::lower_bound(v.begin(), v.end(), lo) == std::upper_bound(v.begin(), v.end(), hi)) {
      throw Error(ErrorKind::singular, "no sample mass between knots " + std::to_string(lo) +
                                           " and " + std::to_string(hi));
    }
  }

  const auto cells = static_cast<Index>(std::ceil(span / grid_step - 1e-9));
  const double step = span / static_cast<double>(cells);
  QQInterpolant target(f1, f2);
  Eigen::MatrixXd design(cells, 3);
  Vector residual_target(cells);
  for (Index i = 0; i < cells; ++i) {
    const double x = knots[0] + (static_cast<double>(i) + 0.5) * step;
    for (Index j = 0; j < 3; ++j) design(i, j) = std::max(0.0, x - knots[static_cast<std::size_t>(j)]);
    residual_target[i] = target(x) - x;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) {
    throw Error(ErrorKind::singular, "piecewise design is rank deficient; refine the grid step");
  }
  const Vector zeta = qr.solve(residual_target);

  PiecewiseQFit fit;
  fit.knots = knots;
  fit.zeta = {zeta[0], zeta[1], zeta[2]};
  fit.fit_error = (design * zeta - residual_target).squaredNorm() * step;
  return fit;
}

}  // namespace cdid
