#pragma once

#include "cdid/core.hpp"
#include "cdid/data_model.hpp"
#include "cdid/distribution.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cdid {

enum class KernelFamily { biweight, epanechnikov, triangular };

KernelFamily parse_kernel_family(const std::string& name);
const char* to_string(KernelFamily family);

/// Kernel profile on [-1, 1]; zero outside. Every family integrates to one.
template <typename Scalar>
Scalar kernel_value(KernelFamily family, Scalar u) {
  const Scalar a = std::abs(u);
  if (a >= Scalar(1)) return Scalar(0);
  switch (family) {
    case KernelFamily::biweight: {
      const Scalar s = Scalar(1) - u * u;
      return Scalar(15) / Scalar(16) * s * s;
    }
    case KernelFamily::epanechnikov:
      return Scalar(3) / Scalar(4) * (Scalar(1) - u * u);
    case KernelFamily::triangular:
      return Scalar(1) - a;
  }
  return Scalar(0);
}

struct KernelSpec {
  KernelFamily family = KernelFamily::biweight;
  /// Fixed bandwidth in treatment units; nullopt selects the default rule.
  std::optional<double> bandwidth;
};

/// Rule-of-thumb bandwidth 1.06 * sd * n^(-1/4).
double default_bandwidth(const Vector& values);

/// Bandwidth a KernelSpec resolves to for a given treatment sample.
double resolve_bandwidth(const KernelSpec& spec, const Vector& treatments);

/// A sample sorted by treatment, answering local (Nadaraya-Watson) queries.
/// Windows are the open interval (x - h, x + h) where the kernel is positive.
class KernelSmoother {
public:
  KernelSmoother(const Vector& treatments, const Vector& values, KernelFamily family,
                 double bandwidth);
  KernelSmoother(const CrossSection& sample, const KernelSpec& spec)
      : KernelSmoother(sample.treatments, sample.outcomes, spec.family,
                       resolve_bandwidth(spec, sample.treatments)) {}

  double bandwidth() const { return h_; }
  KernelFamily family() const { return family_; }
  Index size() const { return static_cast<Index>(x_.size()); }

  /// Kernel-weighted law of the values at treatment x. Throws empty_window.
  WeightedDistribution distribution(double x) const;

  /// Same law with each value passed through `transform`.
  template <typename F>
  WeightedDistribution distribution_of(double x, F&& transform) const {
    auto [lo, hi] = window(x);
    std::vector<double> values, weights;
    values.reserve(hi - lo);
    weights.reserve(hi - lo);
    bool any = false;
    for (std::size_t i = lo; i < hi; ++i) {
      const double w = kernel_value(family_, (x - x_[i]) / h_);
      any = any || w > 0.0;
      values.push_back(transform(y_[i]));
      weights.push_back(w);
    }
    if (!any) throw_empty(x);
    return WeightedDistribution(std::move(values), std::move(weights));
  }

  /// Kernel-weighted mean of the values at x. Throws empty_window.
  double mean(double x) const;

  /// Same window and weights, applied to a transformed copy of the values.
  template <typename F>
  double mean_of(double x, F&& transform) const {
    auto [lo, hi] = window(x);
    double num = 0.0, den = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double w = kernel_value(family_, (x - x_[i]) / h_);
      num += w * transform(y_[i]);
      den += w;
    }
    if (!(den > 0.0)) throw_empty(x);
    return num / den;
  }

  /// Number of observations with positive kernel weight at x.
  std::size_t window_count(double x) const;

  const std::vector<double>& sorted_treatments() const { return x_; }
  const std::vector<double>& values_by_treatment() const { return y_; }

private:
  std::pair<std::size_t, std::size_t> window(double x) const;
  [[noreturn]] void throw_empty(double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  KernelFamily family_;
  double h_;
};

/// Nadaraya-Watson conditional CDF of outcomes at (y | x).
double cond_cdf(double y, double x, const CrossSection& sample, const KernelSpec& spec);

/// Generalized inverse of cond_cdf(. | x) at level p in (0, 1].
double cond_quantile(double p, double x, const CrossSection& sample, const KernelSpec& spec);

/// Nadaraya-Watson mean of `values` (paired with `treatments`) at x.
double cond_mean(double x, const Vector& values, const Vector& treatments, const KernelSpec& spec);

}  // namespace cdid
