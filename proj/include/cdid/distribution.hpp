#pragma once

#include "cdid/core.hpp"

#include <span>
#include <vector>

namespace cdid {

/// Right-continuous empirical CDF of a sample.
class EmpiricalCdf {
public:
  explicit EmpiricalCdf(std::span<const double> values);
  explicit EmpiricalCdf(const Vector& values)
      : EmpiricalCdf(std::span<const double>(values.data(), static_cast<std::size_t>(values.size()))) {}

  Index size() const { return static_cast<Index>(sorted_.size()); }
  const std::vector<double>& sorted_values() const { return sorted_; }

  /// Fraction of observations <= x.
  double operator()(double x) const;

  /// Number of observations <= x.
  Index count_le(double x) const;

  /// Generalized inverse inf{x : F(x) >= p}, p in (0, 1].
  double quantile(double p) const;

  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }

private:
  std::vector<double> sorted_;
};

/// Generalized inverse of an empirical CDF.
inline double quantile(const EmpiricalCdf& cdf, double p) { return cdf.quantile(p); }

/// Discrete distribution on sorted support points with positive weights,
/// e.g. the kernel-weighted outcome law at a treatment value.
class WeightedDistribution {
public:
  WeightedDistribution() = default;

  /// Zero-weight points are dropped. Throws empty_window if nothing remains.
  WeightedDistribution(std::vector<double> values, std::vector<double> weights);

  bool empty() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  /// Normalized cumulative weights; the last entry is exactly 1.
  const std::vector<double>& cumulative() const { return cumulative_; }
  double total_weight() const { return total_; }

  double cdf(double y) const;
  /// inf{y in support : cdf(y) >= p}, p in (0, 1].
  double quantile(double p) const;
  double mean() const;

  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

private:
  std::vector<double> values_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

}  // namespace cdid
