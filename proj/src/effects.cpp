#include "cdid/effects.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cdid {

const char* to_string(EffectKind kind) {
  switch (kind) {
    case EffectKind::att: return "ATT";
    case EffectKind::qtt: return "QTT";
    case EffectKind::ame_app: return "AME_app";
    case EffectKind::ame_avg: return "AME_avg";
    case EffectKind::ame_rc: return "AME_rc";
    case EffectKind::bound_lower: return "bound_lower";
    case EffectKind::bound_upper: return "bound_upper";
  }
  return "unknown";
}

EffectEngine::EffectEngine(const Dataset& data, int t, TrendMap trend, const KernelSpec& spec)
    : t_(t),
      trend_(std::move(trend)),
      rank_(rank_map(data, t, data.reference_period())),
      period_(data.period(t), spec),
      reference_(data.reference(), spec),
      reference_x_(data.reference().treatments) {
  if (t >= data.reference_period()) {
    throw Error(ErrorKind::invalid_input, "comparison period must precede the reference period");
  }
}

double EffectEngine::att_value(double x, double q) const {
  const double adjusted = period_.mean_of(q, [&](double y) { return trend_.to_reference(y); });
  return adjusted - reference_.mean(x);
}

EffectEstimate EffectEngine::att(double x) const {
  EffectEstimate e;
  e.kind = EffectKind::att;
  e.eval_x = x;
  e.period_t = t_;
  bool clamped = false;
  e.counterfactual_x = rank_(x, &clamped);
  if (clamped) e.flags.emplace_back("x below the reference treatment support; q(x) clamped");
  e.value = att_value(x, e.counterfactual_x);
  return e;
}

std::pair<double, double> EffectEngine::qtt_components(double p, double x) const {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::invalid_input, "quantile level must lie in (0, 1)");
  const double q = rank_(x);
  const auto adjusted = period_.distribution_of(q, [&](double y) { return trend_.to_reference(y); });
  return {adjusted.quantile(p), reference_.distribution(x).quantile(p)};
}

EffectEstimate EffectEngine::qtt(double p, double x) const {
  EffectEstimate e;
  e.kind = EffectKind::qtt;
  e.eval_x = x;
  e.period_t = t_;
  e.quantile_p = p;
  bool clamped = false;
  e.counterfactual_x = rank_(x, &clamped);
  if (clamped) e.flags.emplace_back("x below the reference treatment support; q(x) clamped");
  const auto [adjusted, reference] = qtt_components(p, x);
  e.value = adjusted - reference;
  return e;
}

EffectEstimate EffectEngine::ame_app(double x, std::optional<double> tol_q) const {
  const double tol = tol_q.value_or(default_tolerance());
  EffectEstimate e = att(x);
  const double d = e.counterfactual_x - x;
  if (!(std::abs(d) > tol)) {
    std::ostringstream msg;
    msg << "|q(x) - x| = " << std::abs(d) << " at x = " << x << " is below the tolerance " << tol
        << "; use bounds or averaging";
    throw Error(ErrorKind::degenerate, msg.str());
  }
  e.kind = EffectKind::ame_app;
  e.value = e.value / d;
  return e;
}

EffectEstimate EffectEngine::rc_ame(double x, std::optional<double> tol_q) const {
  EffectEstimate e = ame_app(x, tol_q);
  e.kind = EffectKind::ame_rc;
  return e;
}

EffectEstimate EffectEngine::average(double c, EffectKind kind) const {
  if (!(c >= 0.0)) throw Error(ErrorKind::invalid_input, "averaging threshold c must be >= 0");
  double sum = 0.0;
  Index used = 0;
  std::vector<double> ratios;
  for (Index i = 0; i < reference_x_.size(); ++i) {
    const double z = reference_x_[i];
    const double q = rank_(z);
    if (!(std::abs(q - z) > c)) continue;
    ratios.push_back(att_value(z, q) / (q - z));
    ++used;
  }
  if (used == 0) {
    std::ostringstream msg;
    msg << "no period-T point has |q(x) - x| > " << c;
    throw Error(ErrorKind::empty_set, msg.str());
  }
  for (double r : ratios) sum += r;
  EffectEstimate e;
  e.kind = kind;
  e.period_t = t_;
  e.value = sum / static_cast<double>(used);
  e.retained_fraction = static_cast<double>(used) / static_cast<double>(reference_x_.size());
  return e;
}

EffectEstimate EffectEngine::ame_avg(double c) const { return average(c, EffectKind::ame_avg); }

EffectEstimate EffectEngine::rc_ame_overall(double c) const {
  return average(c, EffectKind::ame_rc);
}

Neighbors neighbors(double x, double xprime, std::span<const double> images, double tol) {
  Neighbors nb;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const double q = images[i];
    if (!(std::abs(q - x) > tol)) continue;
    if (q < xprime && q > nb.lower) {
      nb.lower = q;
      nb.lower_index = static_cast<int>(i);
    }
    if (q > xprime && q < nb.upper) {
      nb.upper = q;
      nb.upper_index = static_cast<int>(i);
    }
  }
  return nb;
}

BoundsResult secant_bounds(const SecantProblem& problem) {
  BoundsResult out;
  out.eval_x = problem.x;
  out.counterfactual_x = problem.xprime;
  const double x = problem.x;
  if (problem.marginal) {
    for (std::size_t i = 0; i < problem.images.size(); ++i) {
      if (std::abs(problem.images[i] - x) <= problem.tol) {
        out.point_identified = true;
        if (i < problem.periods.size()) out.periods_used.push_back(problem.periods[i]);
      }
    }
    if (out.point_identified) {
      out.lower = out.upper = problem.limit_ame();
      return out;
    }
  }
  out.neighbors = neighbors(x, problem.xprime, problem.images, problem.tol);
  const auto& nb = out.neighbors;
  if (nb.lower_index < 0 || nb.upper_index < 0) return out;
  for (int idx : {nb.lower_index, nb.upper_index}) {
    if (static_cast<std::size_t>(idx) < problem.periods.size()) {
      out.periods_used.push_back(problem.periods[static_cast<std::size_t>(idx)]);
    }
  }
  const double left = problem.att(static_cast<std::size_t>(nb.lower_index)) / (nb.lower - x);
  const double right = problem.att(static_cast<std::size_t>(nb.upper_index)) / (nb.upper - x);
  const double lo = std::min(left, right);
  const double hi = std::max(left, right);
  if (problem.marginal) {
    out.lower = lo;
    out.upper = hi;
  } else {
    const double f = problem.xprime - x;
    out.lower = std::min(f * lo, f * hi);
    out.upper = std::max(f * lo, f * hi);
  }
  return out;
}

namespace {

SecantProblem estimated_problem(std::span<const EffectEngine> engines, double x, double xprime) {
  if (engines.empty()) throw Error(ErrorKind::invalid_input, "bounds need at least one comparison period");
  SecantProblem problem;
  problem.x = x;
  problem.xprime = xprime;
  problem.tol = engines.front().default_tolerance();
  for (const auto& e : engines) {
    problem.images.push_back(e.image(x));
    problem.periods.push_back(e.period());
  }
  problem.att = [engines, x, images = problem.images](std::size_t i) {
    return engines[i].att_value(x, images[i]);
  };
  problem.limit_ame = [engines, x, images = problem.images]() {
    std::size_t best = 0;
    for (std::size_t i = 1; i < images.size(); ++i) {
      if (std::abs(images[i] - x) < std::abs(images[best] - x)) best = i;
    }
    return crossing_ame(engines[best], x);
  };
  return problem;
}

}  // namespace

BoundsResult att_bounds(std::span<const EffectEngine> engines, double x, double xprime) {
  return secant_bounds(estimated_problem(engines, x, xprime));
}

BoundsResult ame_bounds(std::span<const EffectEngine> engines, double x) {
  auto problem = estimated_problem(engines, x, x);
  problem.marginal = true;
  return secant_bounds(problem);
}

double crossing_ame(const EffectEngine& engine, double x) {
  const double h = engine.reference_bandwidth();
  std::vector<double> nearby;
  for (double z : engine.reference_treatments()) {
    if (std::abs(z - x) < 3.0 * h) nearby.push_back(z);
  }
  std::sort(nearby.begin(), nearby.end());
  constexpr std::size_t kMaxPoints = 50;
  const std::size_t stride = std::max<std::size_t>(1, nearby.size() / kMaxPoints);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < nearby.size(); i += stride) {
    const double z = nearby[i];
    const double q = engine.image(z);
    const double d = q - z;
    if (d == 0.0) continue;
    num += engine.att_value(z, q) * d;
    den += d * d;
  }
  if (!(den > 0.0)) {
    throw Error(ErrorKind::degenerate, "no rank-map variation near the crossing");
  }
  return num / den;
}

LinearityStatistic rc_linearity_statistic(std::span<const EffectEngine> engines, double x) {
  LinearityStatistic out;
  for (const auto& e : engines) {
    const double q = e.image(x);
    if (!(std::abs(q - x) > e.default_tolerance())) continue;
    out.ratios.push_back(e.att_value(x, q) / (q - x));
    out.periods.push_back(e.period());
  }
  if (out.ratios.size() < 2) {
    throw Error(ErrorKind::invalid_input,
                "linearity test needs two periods with q_t(x) != x; need at least 3 periods");
  }
  const auto [lo, hi] = std::minmax_element(out.ratios.begin(), out.ratios.end());
  out.statistic = *hi - *lo;
  return out;
}

}  // namespace cdid
