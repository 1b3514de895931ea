#include "cdid/kernel.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cdid {

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "biweight" || name == "quartic") return KernelFamily::biweight;
  if (name == "epanechnikov") return KernelFamily::epanechnikov;
  if (name == "triangular") return KernelFamily::triangular;
  throw Error(ErrorKind::invalid_input, "unknown kernel '" + name + "'");
}

const char* to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::biweight: return "biweight";
    case KernelFamily::epanechnikov: return "epanechnikov";
    case KernelFamily::triangular: return "triangular";
  }
  return "unknown";
}

double default_bandwidth(const Vector& values) {
  const Index n = values.size();
  if (n < 2) throw Error(ErrorKind::invalid_input, "bandwidth rule needs at least 2 values");
  const double mean = values.mean();
  const double sd = std::sqrt((values.array() - mean).square().sum() / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw Error(ErrorKind::degenerate, "bandwidth rule on a constant sample");
  return 1.06 * sd * std::pow(static_cast<double>(n), -0.25);
}

double resolve_bandwidth(const KernelSpec& spec, const Vector& treatments) {
  if (spec.bandwidth) {
    if (!(*spec.bandwidth > 0.0) || !std::isfinite(*spec.bandwidth)) {
      throw Error(ErrorKind::invalid_input, "bandwidth must be positive");
    }
    return *spec.bandwidth;
  }
  return default_bandwidth(treatments);
}

KernelSmoother::KernelSmoother(const Vector& treatments, const Vector& values,
                               KernelFamily family, double bandwidth)
    : family_(family), h_(bandwidth) {
  if (treatments.size() != values.size()) {
    throw Error(ErrorKind::invalid_input, "treatments/values length mismatch");
  }
  if (!(h_ > 0.0) || !std::isfinite(h_)) {
    throw Error(ErrorKind::invalid_input, "bandwidth must be positive");
  }
  const auto n = static_cast<std::size_t>(treatments.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return treatments[static_cast<Index>(a)] < treatments[static_cast<Index>(b)];
  });
  x_.resize(n);
  y_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    x_[i] = treatments[static_cast<Index>(order[i])];
    y_[i] = values[static_cast<Index>(order[i])];
  }
}

std::pair<std::size_t, std::size_t> KernelSmoother::window(double x) const {
  // Strict inequalities: the kernel vanishes at |u| = 1.
  auto lo = std::upper_bound(x_.begin(), x_.end(), x - h_);
  auto hi = std::lower_bound(lo, x_.end(), x + h_);
  return {static_cast<std::size_t>(lo - x_.begin()), static_cast<std::size_t>(hi - x_.begin())};
}

void KernelSmoother::throw_empty(double x) const {
  std::ostringstream msg;
  msg << "empty kernel window at x = " << x << " (bandwidth " << h_ << ")";
  throw Error(ErrorKind::empty_window, msg.str());
}

std::size_t KernelSmoother::window_count(double x) const {
  auto [lo, hi] = window(x);
  std::size_t count = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    if (kernel_value(family_, (x - x_[i]) / h_) > 0.0) ++count;
  }
  return count;
}

WeightedDistribution KernelSmoother::distribution(double x) const {
  return distribution_of(x, [](double v) { return v; });
}

double KernelSmoother::mean(double x) const {
  return mean_of(x, [](double v) { return v; });
}

double cond_cdf(double y, double x, const CrossSection& sample, const KernelSpec& spec) {
  return KernelSmoother(sample, spec).distribution(x).cdf(y);
}

double cond_quantile(double p, double x, const CrossSection& sample, const KernelSpec& spec) {
  return KernelSmoother(sample, spec).distribution(x).quantile(p);
}

double cond_mean(double x, const Vector& values, const Vector& treatments, const KernelSpec& spec) {
  const double h = resolve_bandwidth(spec, treatments);
  return KernelSmoother(treatments, values, spec.family, h).mean(x);
}

}  // namespace cdid
