#include "cdid/bootstrap.hpp"

#include "cdid/parallel.hpp"
#include "cdid/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cdid {

const char* to_string(TrendMode mode) {
  switch (mode) {
    case TrendMode::point: return "point";
    case TrendMode::interval: return "interval";
    case TrendMode::shift: return "shift";
  }
  return "unknown";
}

TrendMode parse_trend_mode(const std::string& name) {
  if (name == "point") return TrendMode::point;
  if (name == "interval") return TrendMode::interval;
  if (name == "shift") return TrendMode::shift;
  throw Error(ErrorKind::invalid_input, "unknown trend mode '" + name + "'");
}

const char* to_string(EstimandKind kind) {
  switch (kind) {
    case EstimandKind::att: return "att";
    case EstimandKind::qtt: return "qtt";
    case EstimandKind::ame: return "ame";
    case EstimandKind::ame_avg: return "ame_avg";
    case EstimandKind::rc: return "rc";
    case EstimandKind::rc_overall: return "rc_overall";
    case EstimandKind::crossing: return "crossing";
  }
  return "unknown";
}

EstimandKind parse_estimand(const std::string& name) {
  for (auto k : {EstimandKind::att, EstimandKind::qtt, EstimandKind::ame, EstimandKind::ame_avg,
                 EstimandKind::rc, EstimandKind::rc_overall, EstimandKind::crossing}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorKind::invalid_input, "unknown estimand '" + name + "'");
}

const EffectEngine& PipelineFit::engine(int t) const {
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (periods[i] == t) return engines[i];
  }
  throw Error(ErrorKind::invalid_input, "period " + std::to_string(t) + " was not fitted");
}

PipelineFit fit_pipeline(const Dataset& data, const PipelineConfig& config,
                         const std::vector<int>& periods) {
  PipelineFit out;
  out.periods = periods;
  if (out.periods.empty()) {
    for (int t = 1; t < data.reference_period(); ++t) out.periods.push_back(t);
  }
  if (!config.frozen_crossings.empty() &&
      config.frozen_crossings.size() != static_cast<std::size_t>(data.reference_period() - 1)) {
    throw Error(ErrorKind::invalid_input, "one frozen crossing per comparison period required");
  }
  for (int t : out.periods) {
    if (t < 1 || t >= data.reference_period()) {
      throw Error(ErrorKind::invalid_input, "comparison period " + std::to_string(t) +
                                                " not in 1.." + std::to_string(data.reference_period() - 1));
    }
    if (config.trend == TrendMode::interval) {
      out.engines.emplace_back(data, t, estimate_trend_interval(data, t, config.control, config.grid),
                               config.kernel);
      continue;
    }
    CrossingPoint crossing;
    if (config.frozen_crossings.empty()) {
      crossing = estimate_crossing(data.period(t), data.reference(), config.trim_lower, config.trim_upper);
    } else {
      crossing.location = config.frozen_crossings[static_cast<std::size_t>(t - 1)];
      crossing.trim_lower = config.trim_lower;
      crossing.trim_upper = config.trim_upper;
    }
    auto trend = estimate_trend_point(data, t, crossing, config.kernel, config.grid);
    if (config.trend == TrendMode::shift) trend = TrendMap::shift(t, rc_shift(trend));
    out.crossings.push_back(crossing);
    out.engines.emplace_back(data, t, std::move(trend), config.kernel);
  }
  return out;
}

double evaluate(const Dataset& data, const PipelineConfig& config, const Estimand& e) {
  if (e.kind == EstimandKind::crossing) {
    if (e.period < 1 || e.period >= data.reference_period()) {
      throw Error(ErrorKind::invalid_input, "comparison period out of range");
    }
    return estimate_crossing(data.period(e.period), data.reference(), config.trim_lower,
                             config.trim_upper)
        .location;
  }
  const auto fit = fit_pipeline(data, config, {e.period});
  const auto& engine = fit.engines.front();
  switch (e.kind) {
    case EstimandKind::att: return engine.att(e.x).value;
    case EstimandKind::qtt: return engine.qtt(e.p, e.x).value;
    case EstimandKind::ame: return engine.ame_app(e.x, e.tol_q).value;
    case EstimandKind::ame_avg: return engine.ame_avg(e.c).value;
    case EstimandKind::rc: return engine.rc_ame(e.x, e.tol_q).value;
    case EstimandKind::rc_overall: return engine.rc_ame_overall(e.c).value;
    case EstimandKind::crossing: break;
  }
  return kNaN;
}

Dataset resample(const Dataset& data, std::uint64_t r, std::uint64_t seed) {
  std::vector<CrossSection> sections;
  sections.reserve(data.sections().size());
  for (const auto& s : data.sections()) {
    Rng rng(seed, Stream::bootstrap, r, static_cast<std::uint64_t>(s.period));
    sections.push_back(resample(s, rng));
  }
  return Dataset(std::move(sections));
}

ReplicateSet run_replicates(const Dataset& data, const Statistic& statistic, int B,
                            std::uint64_t seed) {
  ReplicateSet out;
  const auto n = static_cast<std::size_t>(B);
  out.values.resize(n);
  std::vector<std::string> reasons(n);
  parallel_for(n, [&](std::size_t r) {
    try {
      out.values[r] = statistic(resample(data, r, seed));
      if (!out.values[r].allFinite()) reasons[r] = "non-finite";
    } catch (const Error& err) {
      reasons[r] = to_string(err.kind());
    }
  });
  out.ok.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    out.ok[r] = reasons[r].empty();
    if (!out.ok[r]) ++out.failure_reasons[reasons[r]];
  }
  return out;
}

Interval percentile_interval(const std::vector<double>& values, double level) {
  if (values.empty()) throw Error(ErrorKind::invalid_input, "percentile interval of no values");
  EmpiricalCdf cdf(values);
  const double alpha = 0.5 * (1.0 - level);
  // Generalized inverse needs p > 0; alpha is positive for level < 1.
  return {cdf.quantile(alpha), cdf.quantile(1.0 - alpha)};
}

namespace {

void check_bootstrap_args(int B, double level) {
  if (B < 199) throw Error(ErrorKind::invalid_input, "bootstrap needs B >= 199");
  if (!(level > 0.5 && level < 1.0)) {
    throw Error(ErrorKind::invalid_input, "confidence level must lie in (0.5, 1)");
  }
}

}  // namespace

std::vector<BootstrapResult> bootstrap_many(const Dataset& data, const Statistic& statistic, int B,
                                            double level, std::uint64_t seed) {
  check_bootstrap_args(B, level);
  const Vector point = statistic(data);
  auto reps = run_replicates(data, statistic, B, seed);
  int failures = 0;
  for (bool ok : reps.ok) failures += ok ? 0 : 1;
  if (failures == B) {
    std::ostringstream msg;
    msg << "all " << B << " bootstrap replicates failed";
    for (const auto& [reason, count] : reps.failure_reasons) msg << "; " << reason << ": " << count;
    throw Error(ErrorKind::degenerate, msg.str());
  }
  std::vector<BootstrapResult> out(static_cast<std::size_t>(point.size()));
  for (Index j = 0; j < point.size(); ++j) {
    auto& res = out[static_cast<std::size_t>(j)];
    res.point = point[j];
    res.level = level;
    res.B = B;
    res.seed = seed;
    res.failures = failures;
    res.failure_reasons = reps.failure_reasons;
    res.unreliable = failures > 0.2 * B;
    for (std::size_t r = 0; r < reps.values.size(); ++r) {
      if (reps.ok[r]) res.replicates.push_back(reps.values[r][j]);
    }
    const auto ci = percentile_interval(res.replicates, level);
    res.ci_lo = ci.lo;
    res.ci_hi = ci.hi;
    const double m = static_cast<double>(res.replicates.size());
    double mean = 0.0;
    for (double v : res.replicates) mean += v;
    mean /= m;
    double ss = 0.0;
    for (double v : res.replicates) ss += (v - mean) * (v - mean);
    res.se = m > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
  }
  return out;
}

BootstrapResult bootstrap(const Dataset& data, const PipelineConfig& config, const Estimand& estimand,
                          int B, double level, std::uint64_t seed) {
  Statistic stat = [&](const Dataset& d) {
    Vector v(1);
    v[0] = evaluate(d, config, estimand);
    return v;
  };
  return bootstrap_many(data, stat, B, level, seed).front();
}

LinearityTest rc_linearity_test(const Dataset& data, const PipelineConfig& config, double x, int B,
                                std::uint64_t seed) {
  if (B < 99) throw Error(ErrorKind::invalid_input, "linearity test needs B >= 99");
  if (data.reference_period() < 3) {
    throw Error(ErrorKind::invalid_input, "linearity test needs at least 3 periods");
  }
  const auto fit = fit_pipeline(data, config);
  const auto stat = rc_linearity_statistic(fit.engines, x);
  LinearityTest out;
  out.statistic = stat.statistic;
  out.ratios = stat.ratios;
  out.periods = stat.periods;

  const auto periods = stat.periods;
  Statistic ratios = [&](const Dataset& d) {
    const auto f = fit_pipeline(d, config, periods);
    Vector v(static_cast<Index>(periods.size()));
    for (std::size_t i = 0; i < periods.size(); ++i) {
      const auto& e = f.engines[i];
      const double q = e.image(x);
      if (!(std::abs(q - x) > e.default_tolerance())) {
        throw Error(ErrorKind::degenerate, "replicate q_t(x) within tolerance of x");
      }
      v[static_cast<Index>(i)] = e.att_value(x, q) / (q - x);
    }
    return v;
  };
  auto reps = run_replicates(data, ratios, B, seed);
  int exceed = 0;
  for (std::size_t r = 0; r < reps.values.size(); ++r) {
    if (!reps.ok[r]) {
      ++out.failures;
      continue;
    }
    ++out.replicates;
    double s = 0.0;
    for (std::size_t a = 0; a < periods.size(); ++a) {
      for (std::size_t b = a + 1; b < periods.size(); ++b) {
        const double contrast = reps.values[r][static_cast<Index>(a)] - reps.values[r][static_cast<Index>(b)];
        s = std::max(s, std::abs(contrast - (out.ratios[a] - out.ratios[b])));
      }
    }
    if (s >= out.statistic) ++exceed;
  }
  if (out.replicates == 0) throw Error(ErrorKind::degenerate, "all linearity-test replicates failed");
  out.p_value = static_cast<double>(1 + exceed) / static_cast<double>(out.replicates + 1);
  return out;
}

}  // namespace cdid
