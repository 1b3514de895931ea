#pragma once

#include "cdid/core.hpp"
#include "cdid/data_model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cdid {

enum class DgpKind { linear_system, quantile_rc, bounds_example, rc_linear };
const char* to_string(DgpKind kind);
DgpKind parse_dgp_kind(const std::string& name);

/// Per-period parameters. Treatments follow
///   X_t = loc_t + scale_t * (eta + bend_t (eta^2 - 1) exp(-eta^2 / 4)),  eta ~ N(0, 1),
/// with rank V_t = Phi(eta). A nonzero bend adds crossings at eta = +-1.
struct PeriodParams {
  double loc = 0.0;
  double scale = 1.0;
  double bend = 0.0;
  double level = 0.0;          // alpha_t, delta_t: additive time effect on outcomes
  double outcome_scale = 1.0;  // quantile_rc: slope of f_t
  double shift_above = 0.0;    // shifts U when eta > shift_threshold (breaks stationarity)
};

/// Outcome equations (U = rho eta + sqrt(1 - rho^2) Z, Z ~ N(0, 1) independent):
///   linear_system   Y = level_t + beta X + U
///   quantile_rc     Y = level_t + outcome_scale_t (U + X (beta + beta_rank Phi(U)))
///   bounds_example  Y = 1 - exp(-0.5 (level_t + X + U)),  U | V ~ N(V, 1)
///   rc_linear       Y = level_t + U0 + X U1,  U1 = 0.5 + V,  U0 = V + 0.5 Z
/// The last period is the reference period.
struct DgpSpec {
  DgpKind kind = DgpKind::linear_system;
  std::vector<PeriodParams> periods;
  double beta = 0.0;
  double beta_rank = 0.0;
  double rho = 0.0;
  double shift_threshold = 0.5;
  std::uint64_t hyper_seed = 0;  // bounds_example hyper-draws, informational

  int period_count() const { return static_cast<int>(periods.size()); }
  const PeriodParams& period(int t) const;
  const PeriodParams& reference() const { return periods.back(); }

  /// Throws invalid_input on: fewer than 2 periods, nonpositive scales,
  /// |bend| > 0.6 (treatment map must stay increasing), a bent reference
  /// period, rho outside (-1, 1), nonpositive outcome scales.
  void validate() const;
};

/// Linear system with X_t = gamma_t + delta_t eta and corr(U, eta) = rho.
DgpSpec linear_system(const std::vector<double>& alpha, double beta, const std::vector<double>& gamma,
                      const std::vector<double>& delta, double rho);

/// Curvature example with mu_T = 2.5, sigma_T = 1, delta_T = 0 and, for t < T,
/// mu_t ~ N(2.5, 1), sigma_t ~ chi2(1), delta_t ~ N(0, 1). Period t's draws
/// come from their own stream, so the first periods agree across T.
DgpSpec bounds_example(int T, std::uint64_t hyper_seed);

DgpSpec rc_linear(const std::vector<double>& loc, const std::vector<double>& scale,
                  const std::vector<double>& delta);

/// Draws n observations per period; period t uses stream (seed, simulate, t).
Dataset simulate(const DgpSpec& dgp, Index n, std::uint64_t seed);

double normal_cdf(double z);
double normal_quantile(double p);

/// Treatment value of period t at latent eta.
double treatment_at(const DgpSpec& dgp, int t, double eta);
/// Latent eta with treatment_at(t, eta) == x.
double treatment_latent(const DgpSpec& dgp, int t, double x);
/// F_{X_t}(x).
double population_cdf(const DgpSpec& dgp, int t, double x);
/// q_t(x) = F_{X_t}^-1(F_{X_T}(x)).
double population_rank_map(const DgpSpec& dgp, int t, double x);

/// Closed form for unbent location-scale treatments, otherwise the first
/// root of a scan-and-bisect search. Throws no_crossing.
double population_crossing(const DgpSpec& dgp, int t);
/// All crossings of F_{X_t} and F_{X_T} (bisection on eta to 1e-10), ascending.
std::vector<double> population_crossings(const DgpSpec& dgp, int t);

/// Population time trend g_t (reference scale to period-t scale).
double population_trend(const DgpSpec& dgp, int t, double y);

/// Reference-period potential outcome Y_T(x) of a unit with latent (eta, z).
double potential_outcome(const DgpSpec& dgp, double x, double eta, double z);

struct MonteCarlo {
  double value = kNaN;
  double se = kNaN;
};

/// Brute-force oracles conditioning on V_T = F_{X_T}(x). draws >= 10^4.
/// A fixed seed reuses the same draws across x' (common random numbers).
MonteCarlo oracle_att_pair(const DgpSpec& dgp, double x, double xprime, Index draws, std::uint64_t seed);
MonteCarlo oracle_att(const DgpSpec& dgp, int t, double x, Index draws, std::uint64_t seed);
MonteCarlo oracle_ame(const DgpSpec& dgp, double x, Index draws, std::uint64_t seed);
/// Quantile difference; SE from 20 batch means.
MonteCarlo oracle_qtt(const DgpSpec& dgp, int t, double p, double x, Index draws, std::uint64_t seed);

}  // namespace cdid
