#include "cdid/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cdid {

EmpiricalCdf::EmpiricalCdf(std::span<const double> values) : sorted_(values.begin(), values.end()) {
  if (sorted_.empty()) throw Error(ErrorKind::invalid_input, "ecdf of an empty sample");
  for (double v : sorted_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "ecdf of non-finite values");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

Index EmpiricalCdf::count_le(double x) const {
  return static_cast<Index>(std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
}

double EmpiricalCdf::operator()(double x) const {
  return static_cast<double>(count_le(x)) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double p) const {
  if (!(p > 0.0) || p > 1.0) {
    throw Error(ErrorKind::invalid_input, "quantile level must lie in (0, 1], got " + std::to_string(p));
  }
  const auto n = sorted_.size();
  const double nd = static_cast<double>(n);
  // Smallest k with (k + 1) / n >= p, using the same arithmetic as operator().
  auto k = static_cast<std::size_t>(std::max(0.0, std::ceil(p * nd) - 1.0));
  k = std::min(k, n - 1);
  while (k > 0 && static_cast<double>(k) / nd >= p) --k;
  while (k + 1 < n && static_cast<double>(k + 1) / nd < p) ++k;
  return sorted_[k];
}

WeightedDistribution::WeightedDistribution(std::vector<double> values, std::vector<double> weights) {
  if (values.size() != weights.size()) {
    throw Error(ErrorKind::invalid_input, "values/weights length mismatch");
  }
  std::vector<std::size_t> order;
  order.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] > 0.0) order.push_back(i);
  }
  if (order.empty()) throw Error(ErrorKind::empty_window, "no observation with positive weight");
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  values_.reserve(order.size());
  cumulative_.reserve(order.size());
  double running = 0.0;
  for (auto i : order) {
    running += weights[i];
    values_.push_back(values[i]);
    cumulative_.push_back(running);
  }
  total_ = running;
  for (auto& c : cumulative_) c /= total_;
}

double WeightedDistribution::cdf(double y) const {
  auto it = std::upper_bound(values_.begin(), values_.end(), y);
  if (it == values_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - values_.begin()) - 1];
}

double WeightedDistribution::quantile(double p) const {
  if (!(p > 0.0) || p > 1.0) {
    throw Error(ErrorKind::invalid_input, "quantile level must lie in (0, 1], got " + std::to_string(p));
  }
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), p);
  if (it == cumulative_.end()) return values_.back();
  return values_[static_cast<std::size_t>(it - cumulative_.begin())];
}

double WeightedDistribution::mean() const {
  double acc = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    acc += values_[i] * (cumulative_[i] - prev);
    prev = cumulative_[i];
  }
  return acc;
}

}  // namespace cdid
