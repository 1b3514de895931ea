#pragma once

#include "cdid/core.hpp"
#include "cdid/data_model.hpp"
#include "cdid/effects.hpp"
#include "cdid/empirical.hpp"
#include "cdid/kernel.hpp"
#include "cdid/trend.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cdid {

enum class TrendMode { point, interval, shift };
const char* to_string(TrendMode mode);
TrendMode parse_trend_mode(const std::string& name);

/// Everything needed to go from a dataset to effect engines.
struct PipelineConfig {
  KernelSpec kernel;
  double trim_lower = kDefaultTrimLower;
  double trim_upper = kDefaultTrimUpper;
  TrendMode trend = TrendMode::point;
  IntervalSet control;                 // interval mode
  int grid = kDefaultTrendGrid;
  /// Crossing locations per comparison period, held fixed instead of
  /// re-estimated (sensitivity analysis). Empty: estimate.
  std::vector<double> frozen_crossings;
};

struct PipelineFit {
  std::vector<int> periods;             // comparison periods fitted
  std::vector<CrossingPoint> crossings; // point and shift modes
  std::vector<EffectEngine> engines;

  const EffectEngine& engine(int t) const;
};

/// Crossing, trend and engine for each comparison period (all when empty).
PipelineFit fit_pipeline(const Dataset& data, const PipelineConfig& config,
                         const std::vector<int>& periods = {});

enum class EstimandKind { att, qtt, ame, ame_avg, rc, rc_overall, crossing };
const char* to_string(EstimandKind kind);
EstimandKind parse_estimand(const std::string& name);

/// A scalar target of the pipeline.
struct Estimand {
  EstimandKind kind = EstimandKind::att;
  int period = 1;
  double x = kNaN;
  double p = 0.5;
  double c = 0.0;
  std::optional<double> tol_q;
};

double evaluate(const Dataset& data, const PipelineConfig& config, const Estimand& estimand);

struct BootstrapResult {
  double point = kNaN;
  std::vector<double> replicates;   // successful replicates, in replicate order
  double level = 0.9;
  double ci_lo = kNaN;
  double ci_hi = kNaN;
  double se = kNaN;
  int B = 0;
  int failures = 0;
  std::map<std::string, int> failure_reasons;
  std::uint64_t seed = 0;
  bool unreliable = false;          // more than 20% of replicates failed
};

/// Resampled copy of the data for replicate r: each period drawn with
/// replacement from stream (seed, bootstrap, r, t).
Dataset resample(const Dataset& data, std::uint64_t r, std::uint64_t seed);

using Statistic = std::function<Vector(const Dataset&)>;

/// Per-replicate values of a vector statistic; failed replicates hold NaN and
/// their reasons are tallied. Replicates run in parallel.
struct ReplicateSet {
  std::vector<Vector> values;
  std::vector<bool> ok;
  std::map<std::string, int> failure_reasons;
};
ReplicateSet run_replicates(const Dataset& data, const Statistic& statistic, int B,
                            std::uint64_t seed);

/// Percentile bootstrap for each component of a vector statistic. A replicate
/// failing anywhere is dropped for every component. B >= 199, level in (0.5, 1).
std::vector<BootstrapResult> bootstrap_many(const Dataset& data, const Statistic& statistic, int B,
                                            double level, std::uint64_t seed);

BootstrapResult bootstrap(const Dataset& data, const PipelineConfig& config, const Estimand& estimand,
                          int B, double level, std::uint64_t seed);

/// Percentile interval of a sample at `level` (generalized-inverse quantiles).
Interval percentile_interval(const std::vector<double>& values, double level);

struct LinearityTest {
  double statistic = kNaN;
  double p_value = kNaN;
  std::vector<double> ratios;
  std::vector<int> periods;
  int replicates = 0;
  int failures = 0;
};

/// Linearity check of the random-coefficient model at x with a centered
/// bootstrap: p = (1 + #{S* >= S}) / (valid + 1), S* the max pairwise
/// deviation of replicate ratio contrasts from the sample ones. B >= 99.
LinearityTest rc_linearity_test(const Dataset& data, const PipelineConfig& config, double x, int B,
                                std::uint64_t seed);

}  // namespace cdid
