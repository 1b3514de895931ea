#include "cdid/simulation.hpp"

#include "cdid/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cdid {

const char* to_string(DgpKind kind) {
  switch (kind) {
    case DgpKind::linear_system: return "linear_system";
    case DgpKind::quantile_rc: return "quantile_rc";
    case DgpKind::bounds_example: return "bounds_example";
    case DgpKind::rc_linear: return "rc_linear";
  }
  return "unknown";
}

DgpKind parse_dgp_kind(const std::string& name) {
  if (name == "linear_system" || name == "linear") return DgpKind::linear_system;
  if (name == "quantile_rc") return DgpKind::quantile_rc;
  if (name == "bounds_example" || name == "bounds") return DgpKind::bounds_example;
  if (name == "rc_linear") return DgpKind::rc_linear;
  throw Error(ErrorKind::invalid_input, "unknown DGP kind '" + name + "'");
}

const PeriodParams& DgpSpec::period(int t) const {
  if (t < 1 || t > period_count()) {
    throw Error(ErrorKind::invalid_input, "DGP period " + std::to_string(t) + " not in 1.." +
                                              std::to_string(period_count()));
  }
  return periods[static_cast<std::size_t>(t - 1)];
}

void DgpSpec::validate() const {
  if (periods.size() < 2) throw Error(ErrorKind::invalid_input, "DGP needs at least 2 periods");
  for (std::size_t i = 0; i < periods.size(); ++i) {
    const auto& p = periods[i];
    const std::string where = "DGP period " + std::to_string(i + 1) + ": ";
    if (!(p.scale > 0.0) || !std::isfinite(p.scale)) {
      throw Error(ErrorKind::invalid_input, where + "treatment scale must be positive");
    }
    if (!(std::abs(p.bend) <= 0.6)) {
      throw Error(ErrorKind::invalid_input, where + "|bend| must be <= 0.6");
    }
    if (!(p.outcome_scale > 0.0)) {
      throw Error(ErrorKind::invalid_input, where + "outcome scale must be positive");
    }
    if (!std::isfinite(p.loc) || !std::isfinite(p.level) || !std::isfinite(p.shift_above)) {
      throw Error(ErrorKind::invalid_input, where + "parameters must be finite");
    }
  }
  if (reference().bend != 0.0) {
    throw Error(ErrorKind::invalid_input, "the reference period must have bend 0");
  }
  if (!(rho > -1.0 && rho < 1.0)) throw Error(ErrorKind::invalid_input, "rho must lie in (-1, 1)");
  if (kind == DgpKind::linear_system) {
    // A crossing needs delta_t != delta_T unless the bend supplies one.
    for (int t = 1; t < period_count(); ++t) {
      const auto& p = period(t);
      if (p.scale == reference().scale && p.bend == 0.0) {
        throw Error(ErrorKind::invalid_input,
                    "linear system needs delta_t != delta_T for t = " + std::to_string(t));
      }
    }
  }
}

namespace {

void check_lengths(std::size_t T, std::initializer_list<std::size_t> sizes) {
  for (auto s : sizes) {
    if (s != T) throw Error(ErrorKind::invalid_input, "DGP parameter vectors differ in length");
  }
}

}  // namespace

DgpSpec linear_system(const std::vector<double>& alpha, double beta, const std::vector<double>& gamma,
                      const std::vector<double>& delta, double rho) {
  check_lengths(alpha.size(), {gamma.size(), delta.size()});
  DgpSpec dgp;
  dgp.kind = DgpKind::linear_system;
  dgp.beta = beta;
  dgp.rho = rho;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    PeriodParams p;
    p.level = alpha[i];
    p.loc = gamma[i];
    p.scale = delta[i];
    dgp.periods.push_back(p);
  }
  dgp.validate();
  return dgp;
}

DgpSpec bounds_example(int T, std::uint64_t hyper_seed) {
  if (T < 2) throw Error(ErrorKind::invalid_input, "bounds example needs T >= 2");
  DgpSpec dgp;
  dgp.kind = DgpKind::bounds_example;
  dgp.hyper_seed = hyper_seed;
  for (int t = 1; t < T; ++t) {
    Rng rng(hyper_seed, Stream::hyper, static_cast<std::uint64_t>(t));
    PeriodParams p;
    p.loc = 2.5 + rng.normal();
    const double z = rng.normal();
    p.scale = z * z;
    p.level = rng.normal();
    dgp.periods.push_back(p);
  }
  PeriodParams ref;
  ref.loc = 2.5;
  ref.scale = 1.0;
  ref.level = 0.0;
  dgp.periods.push_back(ref);
  dgp.validate();
  return dgp;
}

DgpSpec rc_linear(const std::vector<double>& loc, const std::vector<double>& scale,
                  const std::vector<double>& delta) {
  check_lengths(loc.size(), {scale.size(), delta.size()});
  DgpSpec dgp;
  dgp.kind = DgpKind::rc_linear;
  for (std::size_t i = 0; i < loc.size(); ++i) {
    PeriodParams p;
    p.loc = loc[i];
    p.scale = scale[i];
    p.level = delta[i];
    dgp.periods.push_back(p);
  }
  dgp.validate();
  return dgp;
}

double normal_cdf(double z) {
  if (z == kInf) return 1.0;
  if (z == -kInf) return 0.0;
  return boost::math::cdf(boost::math::normal_distribution<double>(), z);
}

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

namespace {

double bent(double eta, double bend) {
  if (bend == 0.0) return eta;
  return eta + bend * (eta * eta - 1.0) * std::exp(-0.25 * eta * eta);
}

// Outcome of period-t potential outcome at treatment x for latent (eta, z).
double outcome(const DgpSpec& dgp, const PeriodParams& p, double x, double eta, double z) {
  switch (dgp.kind) {
    case DgpKind::linear_system:
    case DgpKind::quantile_rc: {
      double u = dgp.rho * eta + std::sqrt(1.0 - dgp.rho * dgp.rho) * z;
      if (eta > dgp.shift_threshold) u += p.shift_above;
      if (dgp.kind == DgpKind::linear_system) return p.level + dgp.beta * x + u;
      return p.level + p.outcome_scale * (u + x * (dgp.beta + dgp.beta_rank * normal_cdf(u)));
    }
    case DgpKind::bounds_example: {
      double u = normal_cdf(eta) + z;
      if (eta > dgp.shift_threshold) u += p.shift_above;
      return 1.0 - std::exp(-0.5 * (p.level + x + u));
    }
    case DgpKind::rc_linear: {
      const double v = normal_cdf(eta);
      return p.level + v + 0.5 * z + x * (0.5 + v) + (eta > dgp.shift_threshold ? p.shift_above : 0.0);
    }
  }
  return kNaN;
}

}  // namespace

Dataset simulate(const DgpSpec& dgp, Index n, std::uint64_t seed) {
  dgp.validate();
  if (n < 1) throw Error(ErrorKind::invalid_input, "sample size must be >= 1");
  std::vector<CrossSection> sections;
  for (int t = 1; t <= dgp.period_count(); ++t) {
    const auto& p = dgp.period(t);
    Rng rng(seed, Stream::simulate, static_cast<std::uint64_t>(t));
    CrossSection s;
    s.period = t;
    s.outcomes.resize(n);
    s.treatments.resize(n);
    for (Index i = 0; i < n; ++i) {
      const double eta = rng.normal();
      const double z = rng.normal();
      const double x = p.loc + p.scale * bent(eta, p.bend);
      s.treatments[i] = x;
      s.outcomes[i] = outcome(dgp, p, x, eta, z);
    }
    sections.push_back(std::move(s));
  }
  return Dataset(std::move(sections));
}

double treatment_at(const DgpSpec& dgp, int t, double eta) {
  const auto& p = dgp.period(t);
  return p.loc + p.scale * bent(eta, p.bend);
}

double treatment_latent(const DgpSpec& dgp, int t, double x) {
  const auto& p = dgp.period(t);
  const double target = (x - p.loc) / p.scale;
  if (p.bend == 0.0) return target;
  // bent(eta) - eta is bounded by 1.1 |bend|, so the root lies within 1 of target.
  double lo = target - 1.0, hi = target + 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(target)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (bent(mid, p.bend) < target) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double population_cdf(const DgpSpec& dgp, int t, double x) {
  return normal_cdf(treatment_latent(dgp, t, x));
}

double population_rank_map(const DgpSpec& dgp, int t, double x) {
  return treatment_at(dgp, t, treatment_latent(dgp, dgp.period_count(), x));
}

std::vector<double> population_crossings(const DgpSpec& dgp, int t) {
  const int T = dgp.period_count();
  if (t < 1 || t >= T) throw Error(ErrorKind::invalid_input, "crossing period must lie in 1..T-1");
  auto gap = [&](double eta) { return treatment_at(dgp, t, eta) - treatment_at(dgp, T, eta); };
  constexpr double kLo = -8.0, kHi = 8.0, kStep = 0.01;
  std::vector<double> roots;
  double prev_eta = kLo;
  double prev = gap(kLo);
  bool all_zero = prev == 0.0;
  const int steps = static_cast<int>(std::lround((kHi - kLo) / kStep));
  for (int i = 1; i <= steps; ++i) {
    const double eta = kLo + kStep * i;
    const double cur = gap(eta);
    all_zero = all_zero && cur == 0.0;
    if (cur == 0.0 && prev != 0.0) {
      roots.push_back(eta);
    } else if (prev != 0.0 && (prev < 0.0) != (cur < 0.0)) {
      double lo = prev_eta, hi = eta;
      const bool rising = prev < 0.0;
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if ((gap(mid) < 0.0) == rising) lo = mid; else hi = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_eta = eta;
    prev = cur;
  }
  if (all_zero) {
    throw Error(ErrorKind::no_crossing, "treatment laws coincide; the crossing is not unique");
  }
  std::vector<double> xs;
  for (double eta : roots) xs.push_back(treatment_at(dgp, T, eta));
  return xs;
}

double population_crossing(const DgpSpec& dgp, int t) {
  const int T = dgp.period_count();
  if (t < 1 || t >= T) throw Error(ErrorKind::invalid_input, "crossing period must lie in 1..T-1");
  const auto& p = dgp.period(t);
  const auto& r = dgp.reference();
  if (p.bend == 0.0) {
    if (p.scale == r.scale) {
      throw Error(ErrorKind::no_crossing, "equal treatment scales: the CDFs do not cross");
    }
    // loc_t + scale_t eta = loc_T + scale_T eta
    const double eta = (r.loc - p.loc) / (p.scale - r.scale);
    return r.loc + r.scale * eta;
  }
  auto xs = population_crossings(dgp, t);
  if (xs.empty()) throw Error(ErrorKind::no_crossing, "treatment CDFs do not cross");
  return xs.front();
}

double population_trend(const DgpSpec& dgp, int t, double y) {
  const auto& p = dgp.period(t);
  const auto& r = dgp.reference();
  switch (dgp.kind) {
    case DgpKind::linear_system:
    case DgpKind::rc_linear:
      return y + p.level - r.level;
    case DgpKind::quantile_rc:
      return p.level + p.outcome_scale * (y - r.level) / r.outcome_scale;
    case DgpKind::bounds_example:
      return 1.0 - std::exp(-0.5 * (p.level - r.level)) * (1.0 - y);
  }
  return kNaN;
}

double potential_outcome(const DgpSpec& dgp, double x, double eta, double z) {
  return outcome(dgp, dgp.reference(), x, eta, z);
}

namespace {

double conditioning_latent(const DgpSpec& dgp, double x) {
  const double eta = treatment_latent(dgp, dgp.period_count(), x);
  const double v = normal_cdf(eta);
  if (!(v > 0.0 && v < 1.0) || !std::isfinite(x)) {
    std::ostringstream msg;
    msg << "x = " << x << " lies outside the population treatment support";
    throw Error(ErrorKind::invalid_input, msg.str());
  }
  return eta;
}

void check_draws(Index draws) {
  if (draws < 10000) throw Error(ErrorKind::invalid_input, "oracles need at least 10^4 draws");
}

MonteCarlo mean_and_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double d : v) mean += d;
  mean /= n;
  double ss = 0.0;
  for (double d : v) ss += (d - mean) * (d - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

double reference_derivative(const DgpSpec& dgp, double x, double eta, double z) {
  const auto& r = dgp.reference();
  switch (dgp.kind) {
    case DgpKind::linear_system:
      return dgp.beta;
    case DgpKind::quantile_rc: {
      double u = dgp.rho * eta + std::sqrt(1.0 - dgp.rho * dgp.rho) * z;
      if (eta > dgp.shift_threshold) u += r.shift_above;
      return r.outcome_scale * (dgp.beta + dgp.beta_rank * normal_cdf(u));
    }
    case DgpKind::bounds_example: {
      double u = normal_cdf(eta) + z;
      if (eta > dgp.shift_threshold) u += r.shift_above;
      return 0.5 * std::exp(-0.5 * (r.level + x + u));
    }
    case DgpKind::rc_linear:
      return 0.5 + normal_cdf(eta);
  }
  return kNaN;
}

}  // namespace

MonteCarlo oracle_att_pair(const DgpSpec& dgp, double x, double xprime, Index draws,
                           std::uint64_t seed) {
  check_draws(draws);
  const double eta = conditioning_latent(dgp, x);
  Rng rng(seed, Stream::oracle);
  std::vector<double> d(static_cast<std::size_t>(draws));
  for (auto& v : d) {
    const double z = rng.normal();
    v = potential_outcome(dgp, xprime, eta, z) - potential_outcome(dgp, x, eta, z);
  }
  return mean_and_se(d);
}

MonteCarlo oracle_att(const DgpSpec& dgp, int t, double x, Index draws, std::uint64_t seed) {
  return oracle_att_pair(dgp, x, population_rank_map(dgp, t, x), draws, seed);
}

MonteCarlo oracle_ame(const DgpSpec& dgp, double x, Index draws, std::uint64_t seed) {
  check_draws(draws);
  const double eta = conditioning_latent(dgp, x);
  Rng rng(seed, Stream::oracle);
  std::vector<double> d(static_cast<std::size_t>(draws));
  for (auto& v : d) v = reference_derivative(dgp, x, eta, rng.normal());
  return mean_and_se(d);
}

MonteCarlo oracle_qtt(const DgpSpec& dgp, int t, double p, double x, Index draws,
                      std::uint64_t seed) {
  check_draws(draws);
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::invalid_input, "quantile level must lie in (0, 1)");
  const double eta = conditioning_latent(dgp, x);
  const double xprime = population_rank_map(dgp, t, x);
  Rng rng(seed, Stream::oracle);
  const auto n = static_cast<std::size_t>(draws);
  std::vector<double> at_x(n), at_q(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = rng.normal();
    at_q[i] = potential_outcome(dgp, xprime, eta, z);
    at_x[i] = potential_outcome(dgp, x, eta, z);
  }
  // Generalized-inverse quantile of a sample.
  auto quantile_of = [p](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
    return v[std::max<std::size_t>(k, 1) - 1];
  };
  MonteCarlo out;
  out.value = quantile_of(at_q) - quantile_of(at_x);
  constexpr std::size_t kBatches = 20;
  const std::size_t size = n / kBatches;
  std::vector<double> batch(kBatches);
  for (std::size_t b = 0; b < kBatches; ++b) {
    std::vector<double> q(at_q.begin() + static_cast<std::ptrdiff_t>(b * size),
                          at_q.begin() + static_cast<std::ptrdiff_t>((b + 1) * size));
    std::vector<double> xx(at_x.begin() + static_cast<std::ptrdiff_t>(b * size),
                           at_x.begin() + static_cast<std::ptrdiff_t>((b + 1) * size));
    batch[b] = quantile_of(std::move(q)) - quantile_of(std::move(xx));
  }
  out.se = mean_and_se(batch).se;
  return out;
}

}  // namespace cdid
