// Acceptance criteria. Usage: cdid_acceptance [id ...]; no ids runs all nine.
#include "cdid/bootstrap.hpp"
#include "cdid/effects.hpp"
#include "cdid/empirical.hpp"
#include "cdid/rng.hpp"
#include "cdid/simulation.hpp"
#include "cdid/trend.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace cdid;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

DgpSpec paper_linear() { return linear_system({1, 0}, 2.0, {0, 1}, {2, 1}, 0.5); }

// ---------------------------------------------------------------------------

Outcome degenerate_identity() {
  Outcome out;
  const auto dgp = paper_linear();
  auto s = simulate(dgp, 2000, 101).period(2);
  auto r = s;
  s.period = 1;
  const Dataset d({s, r});
  const auto fit = fit_pipeline(d, PipelineConfig{});
  const auto& e = fit.engines[0];
  double att = 0.0, qtt = 0.0, g = 0.0;
  for (Index i = 0; i < r.size(); ++i) {
    const double x = r.treatments[i];
    att = std::max(att, std::abs(e.att(x).value));
    for (double p : {0.25, 0.5, 0.75}) qtt = std::max(qtt, std::abs(e.qtt(p, x).value));
    const double y = r.outcomes[i];
    g = std::max(g, std::abs(e.trend().g(y) - y));
  }
  out.check(att <= 1e-12, fmt("max |ATT(x, q(x))| over 2000 sample points = %.3g", att));
  out.check(g <= 1e-12, fmt("max |g(y) - y| over 2000 sample outcomes = %.3g", g));
  out.check(qtt <= 1e-12, fmt("max |QTT(p, x)| at p in {.25,.5,.75} = %.3g", qtt));
  return out;
}

// ---------------------------------------------------------------------------

Outcome linear_recovery() {
  Outcome out;
  const auto dgp = paper_linear();
  const double x_star = population_crossing(dgp, 1);
  const double quartiles[3] = {1.0 - 0.6744897501960817, 1.0, 1.0 + 0.6744897501960817};
  const int reps = 50, B = 299;

  {
    const auto d = simulate(dgp, 10000, 1);
    const auto fit = fit_pipeline(d, PipelineConfig{});
    const double xh = fit.crossings[0].location;
    out.check(std::abs(xh - x_star) < 0.1,
              fmt("|x* - %.4g| = %.4f (estimate %.4f, population crossing)",
                  x_star, std::abs(xh - x_star), xh));
    // central 90% of the reference anchor law, where g is identified
    const auto range = fit.engines[0].trend().central_range(0.05);
    const double lo = range.lo, hi = range.hi;
    double sup = 0.0;
    for (int k = 0; k <= 400; ++k) {
      const double v = lo + (hi - lo) * k / 400.0;
      sup = std::max(sup, std::abs(fit.engines[0].trend().g(v) - (v + 1.0)));
    }
    out.check(sup < 0.1, fmt("sup |g(y) - (y + 1)| on [%.3f, %.3f] = %.4f", lo, hi, sup));
  }

  int att_ok = 0, flat_ok = 0, flat_total = 0;
  for (int rep = 1; rep <= reps; ++rep) {
    const auto d = simulate(dgp, 10000, static_cast<std::uint64_t>(rep));
    const Statistic stat = [&](const Dataset& s) {
      const auto fit = fit_pipeline(s, PipelineConfig{});
      const auto& e = fit.engines[0];
      Vector v(6);
      for (int k = 0; k < 3; ++k) {
        v[k] = e.att(quartiles[k]).value;
        v[3 + k] = e.qtt(0.75, quartiles[k]).value - e.qtt(0.25, quartiles[k]).value;
      }
      return v;
    };
    const auto b = bootstrap_many(d, stat, B, 0.9, static_cast<std::uint64_t>(rep));
    bool all = true;
    for (int k = 0; k < 3; ++k) {
      const double truth = 2.0 * (population_rank_map(dgp, 1, quartiles[k]) - quartiles[k]);
      all = all && std::abs(b[static_cast<std::size_t>(k)].point - truth) <
                       3.0 * b[static_cast<std::size_t>(k)].se;
      const auto& c = b[static_cast<std::size_t>(3 + k)];
      flat_ok += std::abs(c.point) < 2.0 * c.se ? 1 : 0;
      ++flat_total;
    }
    att_ok += all ? 1 : 0;
  }
  const double att_rate = static_cast<double>(att_ok) / reps;
  const double flat_rate = static_cast<double>(flat_ok) / flat_total;
  out.check(att_rate >= 0.9,
            fmt("ATT within 3 bootstrap SEs at all three quartiles in %d/%d reps (%.0f%%), B = %d",
                att_ok, reps, 100 * att_rate, B));
  out.check(flat_rate >= 0.9,
            fmt("|QTT(.75) - QTT(.25)| < 2 bootstrap SEs in %d/%d (rep, quartile) cases (%.0f%%)",
                flat_ok, flat_total, 100 * flat_rate));
  return out;
}

// ---------------------------------------------------------------------------

Outcome crossing_rate() {
  Outcome out;
  const auto dgp = paper_linear();
  const double x_star = population_crossing(dgp, 1);
  auto rmse = [&](Index n, std::uint64_t base) {
    double ss = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto d = simulate(dgp, n, base + s);
      const double e = estimate_crossing(d.period(1), d.reference()).location - x_star;
      ss += e * e;
    }
    return std::sqrt(ss / 200.0);
  };
  const double small = rmse(2500, 1000);
  const double large = rmse(40000, 5000);
  const double ratio = small / large;
  out.check(ratio >= 2.5 && ratio <= 6.0,
            fmt("RMSE n=2500 %.4f, n=40000 %.4f, ratio %.3f (target [2.5, 6])", small, large, ratio));
  return out;
}

// ---------------------------------------------------------------------------

constexpr Index kOracleDraws = 1000000;

bool finite_at(const DgpSpec& dgp, double x) {
  bool below = false, above = false;
  for (int t = 1; t < dgp.period_count(); ++t) {
    const double q = population_rank_map(dgp, t, x);
    below = below || q < x;
    above = above || q > x;
  }
  return below && above;
}

// Smallest hyper seed whose T=6 draw has a bounded finite-bounds region: every comparison
// period crosses the reference within 4 sd and the bounds are infinite in both tails.
std::uint64_t frozen_hyper_seed() {
  for (std::uint64_t h = 1;; ++h) {
    const auto dgp = bounds_example(6, h);
    bool ok = !finite_at(dgp, 2.5 - 6.0) && !finite_at(dgp, 2.5 + 6.0);
    for (int t = 1; ok && t < dgp.period_count(); ++t) {
      const auto cs = population_crossings(dgp, t);
      ok = std::any_of(cs.begin(), cs.end(), [](double c) { return std::abs(c - 2.5) < 4.0; });
    }
    if (ok) return h;
  }
}

const std::uint64_t kFrozenHyperSeed = frozen_hyper_seed();

BoundsResult population_bounds(const DgpSpec& dgp, double x, std::uint64_t seed) {
  SecantProblem p;
  p.x = x;
  p.xprime = x;
  p.marginal = true;
  p.tol = 1e-9;
  for (int t = 1; t < dgp.period_count(); ++t) {
    p.images.push_back(population_rank_map(dgp, t, x));
    p.periods.push_back(t);
  }
  const auto images = p.images;
  p.att = [&dgp, x, images, seed](std::size_t i) {
    return oracle_att_pair(dgp, x, images[i], kOracleDraws, seed).value;
  };
  p.limit_ame = [&dgp, x, seed]() { return oracle_ame(dgp, x, kOracleDraws, seed).value; };
  return secant_bounds(p);
}

// Reference-law mass of {x : both neighbors exist}, on a fine grid.
double finite_mass(const DgpSpec& dgp) {
  const int cells = 4000;
  const double lo = 2.5 - 4.0, hi = 2.5 + 4.0;
  double mass = 0.0;
  for (int k = 0; k < cells; ++k) {
    const double a = lo + (hi - lo) * k / cells, b = lo + (hi - lo) * (k + 1) / cells;
    const double x = 0.5 * (a + b);
    if (finite_at(dgp, x)) mass += normal_cdf(b - 2.5) - normal_cdf(a - 2.5);
  }
  return mass;
}

Outcome population_bounds_check() {
  Outcome out;
  const int grid = 81;
  std::vector<double> xs;
  for (int k = 0; k < grid; ++k) xs.push_back(2.5 - 2.0 + 4.0 * k / (grid - 1));
  std::vector<std::vector<BoundsResult>> by_T(7);
  for (int T = 3; T <= 6; ++T) {
    const auto dgp = bounds_example(T, kFrozenHyperSeed);
    int finite = 0, contained = 0;
    for (double x : xs) {
      const auto b = population_bounds(dgp, x, 11);
      by_T[static_cast<std::size_t>(T)].push_back(b);
      if (!std::isfinite(b.lower)) continue;
      ++finite;
      const double truth = oracle_ame(dgp, x, kOracleDraws, 11).value;
      contained += (b.lower <= truth && truth <= b.upper) ? 1 : 0;
    }
    const double rate = finite ? static_cast<double>(contained) / finite : 0.0;
    out.check(finite > 0 && rate >= 0.95,
              fmt("T=%d: oracle AME inside the bounds at %d/%d finite grid points (%.1f%%)", T,
                  contained, finite, 100 * rate));

    double widest = 0.0;
    int crossings = 0;
    for (int t = 1; t < T; ++t) {
      for (double c : population_crossings(dgp, t)) {
        if (c < xs.front() || c > xs.back()) continue;
        const auto b = population_bounds(dgp, c, 11);
        widest = std::max(widest, b.upper - b.lower);
        ++crossings;
      }
    }
    out.check(crossings > 0 && widest < 0.02,
              fmt("T=%d: upper - lower <= %.3g at %d crossing points", T, widest, crossings));
  }

  int common = 0, nested = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const auto& b3 = by_T[3][k];
    const auto& b5 = by_T[5][k];
    if (!std::isfinite(b3.lower)) continue;
    ++common;
    nested += (b5.lower >= b3.lower && b5.upper <= b3.upper) ? 1 : 0;
  }
  out.check(common > 0 && nested == common,
            fmt("T=5 bounds nested in T=3 bounds at %d/%d grid points with finite T=3 bounds",
                nested, common));

  const double mass = finite_mass(bounds_example(6, kFrozenHyperSeed));
  out.check(mass >= 0.70 && mass <= 0.95,
            fmt("hyper seed %llu, T=6: finite bounds cover %.1f%% of the period-T law",
                static_cast<unsigned long long>(kFrozenHyperSeed), 100 * mass));
  return out;
}

// ---------------------------------------------------------------------------

DgpSpec rc_design() { return rc_linear({3, 0.75, 0}, {3, 0.5, 1}, {0.5, -0.3, 0}); }

// Grid point in the central 80% of X_T whose images are furthest from x and each other.
double separated_point(const DgpSpec& dgp) {
  double best_x = 0.0, best = -1.0;
  const auto& ref = dgp.reference();
  for (int k = 0; k <= 200; ++k) {
    const double x = ref.loc + ref.scale * normal_quantile(0.1 + 0.8 * k / 200.0);
    double gap = kInf;
    std::vector<double> qs{x};
    for (int t = 1; t < dgp.period_count(); ++t) qs.push_back(population_rank_map(dgp, t, x));
    for (std::size_t i = 0; i < qs.size(); ++i) {
      for (std::size_t j = i + 1; j < qs.size(); ++j) gap = std::min(gap, std::abs(qs[i] - qs[j]));
    }
    if (gap > best) {
      best = gap;
      best_x = x;
    }
  }
  return best_x;
}

// Smallest hyper seed whose T=3 draw has non-degenerate comparison treatments
// (scale in [0.25, 4]) and both crossings inside the central 90% of X_T, where
// the shift can be estimated.
std::uint64_t linearity_alternative_seed() {
  for (std::uint64_t h = 1;; ++h) {
    const auto dgp = bounds_example(3, h);
    bool ok = true;
    for (int t = 1; ok && t < dgp.period_count(); ++t) {
      const double s = dgp.period(t).scale;
      const auto cs = population_crossings(dgp, t);
      ok = s >= 0.25 && s <= 4.0 && std::any_of(cs.begin(), cs.end(), [](double c) {
             return std::abs(c - 2.5) < 1.6448536269514722;
           });
    }
    if (ok) return h;
  }
}

Outcome rc_extrapolation() {
  Outcome out;
  const auto dgp = rc_design();
  PipelineConfig cfg;
  cfg.trend = TrendMode::shift;
  const auto d = simulate(dgp, 20000, 1);
  const auto fit = fit_pipeline(d, cfg);
  for (const auto& e : fit.engines) {
    double worst = 0.0;
    for (double z : {-0.6744897501960817, 0.0, 0.6744897501960817}) {
      const double truth = 0.5 + population_cdf(dgp, dgp.period_count(), z);
      worst = std::max(worst, std::abs(e.rc_ame(z).value - truth));
    }
    out.check(worst < 0.1, fmt("t=%d: max |rc_ame(x) - (0.5 + F(x))| at the quartiles = %.4f",
                               e.period(), worst));
    const auto overall = e.rc_ame_overall(e.default_tolerance());
    out.check(std::abs(overall.value - 1.0) < 0.05,
              fmt("t=%d: overall AME %.4f (retained %.3f)", e.period(), overall.value,
                  overall.retained_fraction));
  }

  const int seeds = 200, B = 99;
  auto rejection = [&](const DgpSpec& g, double x, const PipelineConfig& c) {
    int rejected = 0, ran = 0;
    for (int s = 1; s <= seeds; ++s) {
      try {
        const auto r = rc_linearity_test(simulate(g, 20000, static_cast<std::uint64_t>(s)), c, x, B,
                                         static_cast<std::uint64_t>(s));
        ++ran;
        rejected += r.p_value <= 0.10 ? 1 : 0;
      } catch (const Error&) {
        // counted as not run
      }
    }
    return std::make_pair(rejected, ran);
  };
  const auto [r0, n0] = rejection(dgp, 0.0, cfg);
  const double size = n0 ? static_cast<double>(r0) / n0 : 1.0;
  out.check(n0 == seeds && size <= 0.15,
            fmt("linearity test under the RC design: rejected %d/%d at 10%% (%.1f%%)", r0, n0,
                100 * size));
  const auto concave = bounds_example(3, linearity_alternative_seed());
  const double xp = separated_point(concave);
  const auto [r1, n1] = rejection(concave, xp, cfg);
  const double power = n1 ? static_cast<double>(r1) / n1 : 0.0;
  out.check(n1 == seeds && power >= 0.8,
            fmt("linearity test under the concave design (hyper seed %llu) at x = %.3f "
                "(q = %.3f, %.3f): rejected %d/%d (%.1f%%)",
                static_cast<unsigned long long>(linearity_alternative_seed()), xp, population_rank_map(concave, 1, xp), population_rank_map(concave, 2, xp), r1,
                n1, 100 * power));
  return out;
}

// ---------------------------------------------------------------------------

Outcome piecewise_fit() {
  Outcome out;
  PiecewiseQFit truth;
  truth.zeta = {0.10, -0.05, -0.05};
  const Index n = 20000;
  Rng rng(6, Stream::user, 1);
  Vector x1(n);
  for (Index i = 0; i < n; ++i) x1[i] = 19.0 + 5.0 * rng.normal();
  // X_1 pushed through the map
  const Vector x2 = x1.unaryExpr([&](double x) { return truth(x); });
  CrossSection a, b;
  a.period = 1;
  a.treatments = x1;
  a.outcomes = Vector::Zero(n);
  b.period = 2;
  b.treatments = x2;
  b.outcomes = Vector::Zero(n);
  const auto fit = fit_piecewise_q(a, b);
  double worst = 0.0;
  for (std::size_t j = 0; j < 3; ++j) worst = std::max(worst, std::abs(fit.zeta[j] - truth.zeta[j]));
  out.check(worst < 0.02, fmt("zeta (%.4f, %.4f, %.4f) vs (0.10, -0.05, -0.05): max error %.4f",
                              fit.zeta[0], fit.zeta[1], fit.zeta[2], worst));
  const auto dup = fit_piecewise_q(a, a);
  double zero = 0.0;
  for (double z : dup.zeta) zero = std::max(zero, std::abs(z));
  out.check(zero < 1e-8, fmt("duplicated sample: max |zeta| = %.3g", zero));
  return out;
}

// ---------------------------------------------------------------------------

Dataset map_data(const Dataset& d, const std::function<double(double)>& fy,
                 const std::function<double(double)>& fx) {
  std::vector<CrossSection> s = d.sections();
  for (auto& c : s) {
    c.outcomes = c.outcomes.unaryExpr(fy);
    c.treatments = c.treatments.unaryExpr(fx);
  }
  return Dataset(s);
}

Outcome equivariance() {
  Outcome out;
  const auto d = simulate(paper_linear(), 2000, 7);
  const auto id = [](double v) { return v; };
  const auto psi = [](double v) { return std::exp(v); };
  const auto base = fit_pipeline(d, PipelineConfig{});
  const auto mapped = fit_pipeline(map_data(d, psi, id), PipelineConfig{});
  const auto& g = base.engines[0].trend();
  const auto& gm = mapped.engines[0].trend();
  const auto range = g.identified_range();
  int checked = 0, exact = 0;
  for (double y : d.reference().outcomes) {
    if (!range.contains(y)) continue;
    ++checked;
    exact += gm.g(psi(y)) == psi(g.g(y)) ? 1 : 0;
  }
  out.check(checked > 0 && exact == checked,
            fmt("g_psi(psi(y)) == psi(g(y)) at %d/%d sample outcomes inside the identified range",
                exact, checked));

  int qchecked = 0, qexact = 0;
  const auto& law = g.reference_law().values();
  const double lo = *std::min_element(law.begin(), law.end());
  const double hi = *std::max_element(law.begin(), law.end());
  for (Index i = 0; i < d.reference().size(); i += 10) {
    const double x = d.reference().treatments[i];
    for (double p : {0.25, 0.5, 0.75}) {
      const auto [adj, ref] = base.engines[0].qtt_components(p, x);
      const auto [adj_m, ref_m] = mapped.engines[0].qtt_components(p, x);
      ++qchecked;
      qexact += ref_m == psi(ref) ? 1 : 0;
      if (adj > lo && adj < hi) {
        ++qchecked;
        qexact += adj_m == psi(adj) ? 1 : 0;
      }
    }
  }
  out.check(qexact == qchecked,
            fmt("QTT quantile components transform by psi at %d/%d checks", qexact, qchecked));

  const double a = 2.0, b = 0.5;
  const auto aff = [&](double v) { return a * v + b; };
  const auto c0 = estimate_crossing(d.period(1), d.reference());
  const auto dt = map_data(d, id, aff);
  const auto c1 = estimate_crossing(dt.period(1), dt.reference());
  out.check(c1.location == aff(c0.location) && c1.objective == c0.objective,
            fmt("crossing %.6f -> %.6f (expected %.6f), |Psi_n| %.3g -> %.3g", c0.location,
                c1.location, aff(c0.location), c0.objective, c1.objective));
  const auto q0 = rank_map(d, 1, 2);
  const auto q1 = rank_map(dt, 1, 2);
  int rexact = 0;
  for (double x : d.reference().treatments) rexact += q1(aff(x)) == aff(q0(x)) ? 1 : 0;
  out.check(rexact == d.reference().size(),
            fmt("rank map transforms at %d/%ld sample points", rexact,
                static_cast<long>(d.reference().size())));
  return out;
}

// ---------------------------------------------------------------------------

Outcome bootstrap_calibration() {
  Outcome out;
  const auto dgp = paper_linear();
  const double x = 1.0;
  const double truth = 2.0 * (population_rank_map(dgp, 1, x) - x);
  Estimand e;
  e.kind = EstimandKind::att;
  e.x = x;
  int covered = 0;
  const int datasets = 200;
  for (int s = 1; s <= datasets; ++s) {
    const auto d = simulate(dgp, 5000, static_cast<std::uint64_t>(10000 + s));
    const auto b = bootstrap(d, PipelineConfig{}, e, 299, 0.9, static_cast<std::uint64_t>(s));
    covered += (b.ci_lo <= truth && truth <= b.ci_hi) ? 1 : 0;
  }
  const double rate = static_cast<double>(covered) / datasets;
  out.check(rate >= 0.82 && rate <= 0.97,
            fmt("90%% percentile CI covered ATT(1) = %.3f in %d/%d datasets (%.1f%%)", truth, covered,
                datasets, 100 * rate));
  return out;
}

// ---------------------------------------------------------------------------

DgpSpec two_crossing_design() {
  DgpSpec dgp;
  dgp.kind = DgpKind::linear_system;
  dgp.beta = 0.25;
  dgp.rho = 0.3;
  dgp.periods = {PeriodParams{0.0, 1.0, 0.5, 0.5, 1.0, 0.0}, PeriodParams{}};
  dgp.validate();
  return dgp;
}

double overid_statistic(const DgpSpec& dgp, Index n, std::uint64_t seed) {
  const auto d = simulate(dgp, n, seed);
  // crossings at ranks Phi(-1) and Phi(1): one search window on each side of the median
  const auto a = estimate_crossing(d.period(1), d.reference(), 0.05, 0.5);
  const auto b = estimate_crossing(d.period(1), d.reference(), 0.5, 0.95);
  return overid_diagnostic(d, 1, a, b, KernelSpec{}).statistic;
}

Outcome overid() {
  Outcome out;
  const auto ok = two_crossing_design();
  auto bad = ok;
  bad.periods[0].shift_above = 1.0;
  const int seeds = 40;
  auto medians = [&](const DgpSpec& g, Index n) {
    std::vector<double> s;
    for (int k = 1; k <= seeds; ++k) s.push_back(overid_statistic(g, n, static_cast<std::uint64_t>(k)));
    return median(s);
  };
  const double ok_small = medians(ok, 2500), ok_large = medians(ok, 10000);
  const double bad_small = medians(bad, 2500), bad_large = medians(bad, 10000);
  out.check(ok_large <= 0.5 * ok_small,
            fmt("conforming: median statistic %.4f (n=2500) -> %.4f (n=10000), ratio %.3f", ok_small,
                ok_large, ok_large / ok_small));
  out.check(bad_large > 0.5 * bad_small && bad_large > 2.0 * ok_large,
            fmt("violation: median statistic %.4f (n=2500) -> %.4f (n=10000)", bad_small, bad_large));
  return out;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "degenerate identity", degenerate_identity},
    {2, "linear-system recovery", linear_recovery},
    {3, "crossing-point rate", crossing_rate},
    {4, "curvature bounds", population_bounds_check},
    {5, "random-coefficient extrapolation", rc_extrapolation},
    {6, "piecewise q fit", piecewise_fit},
    {7, "equivariance", equivariance},
    {8, "bootstrap calibration", bootstrap_calibration},
    {9, "overidentification diagnostic", overid},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (const auto& c : kCriteria) ids.push_back(c.id);
  }
  bool all = true;
  for (int id : ids) {
    const Criterion* c = nullptr;
    for (const auto& k : kCriteria) {
      if (k.id == id) c = &k;
    }
    if (!c) {
      std::fprintf(stderr, "unknown criterion %d (1-9)\n", id);
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c->run();
    } catch (const std::exception& e) {
      o.check(false, std::string("threw: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& line : o.lines) std::printf("  %s\n", line.c_str());
    std::printf("criterion %d (%s): %s [%.1f s]\n", c->id, c->name, o.pass ? "PASS" : "FAIL", secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
