#include "helpers.hpp"

#include "cdid/kernel.hpp"

#include <algorithm>
#include <cmath>

using namespace cdid;
using namespace cdid::test;

namespace {

Vector standardized(Index n, std::uint64_t seed, double sd) {
  Vector v = normals(n, seed);
  const double mean = v.mean();
  const double s = std::sqrt((v.array() - mean).square().sum() / static_cast<double>(n - 1));
  return ((v.array() - mean) * (sd / s)).matrix();
}

// Hand-written biweight profile, independent of the library.
double biweight(double u) { return std::abs(u) < 1 ? 15.0 / 16.0 * (1 - u * u) * (1 - u * u) : 0.0; }

// Five-point hand dataset evaluated at x = 0.8 with h = 1.
const Vector kHandX = vec({0.0, 0.5, 1.0, 1.5, 3.0});
const Vector kHandY = vec({3.0, 1.0, 4.0, 2.0, 5.0});
constexpr double kHandAt = 0.8;

KernelSpec unit_biweight() {
  KernelSpec spec;
  spec.bandwidth = 1.0;
  return spec;
}

}  // namespace

TEST_CASE("default bandwidth rule") {
  CHECK(default_bandwidth(standardized(10000, 1, 1.0)) == doctest::Approx(0.106).epsilon(1e-12));
  CHECK(default_bandwidth(standardized(625, 2, 2.0)) == doctest::Approx(0.424).epsilon(1e-12));
  CHECK(error_kind_of([] { default_bandwidth(Vector::Constant(10, 3.0)); }) == ErrorKind::degenerate);
  CHECK(error_kind_of([] { default_bandwidth(vec({1.0})); }) == ErrorKind::invalid_input);
}

TEST_CASE("kernel families integrate to one, are symmetric, nonnegative and compact") {
  for (auto fam : {KernelFamily::biweight, KernelFamily::epanechnikov, KernelFamily::triangular}) {
    // composite Simpson on [-1, 1]
    const int m = 20000;
    const double step = 2.0 / m;
    double mass = 0.0, first = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double u = -1.0 + i * step;
      const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      mass += w * kernel_value(fam, u);
      first += w * u * kernel_value(fam, u);
    }
    CHECK(mass * step / 3.0 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(first * step / 3.0) < 1e-12);
    for (double u : {-1.5, -1.0, 1.0, 2.0}) CHECK(kernel_value(fam, u) == 0.0);
    for (double u = -0.99; u < 1.0; u += 0.01) {
      CHECK(kernel_value(fam, u) > 0.0);
      CHECK(kernel_value(fam, u) == kernel_value(fam, -u));
    }
  }
  CHECK(parse_kernel_family("epanechnikov") == KernelFamily::epanechnikov);
  CHECK(error_kind_of([] { parse_kernel_family("gaussian"); }) == ErrorKind::invalid_input);
}

TEST_CASE("conditional cdf, quantile and mean on the hand dataset") {
  const auto s = section(1, kHandY, kHandX);
  const auto spec = unit_biweight();
  double total = 0.0, below = 0.0, weighted = 0.0;
  std::vector<std::pair<double, double>> steps;
  for (Index i = 0; i < kHandX.size(); ++i) {
    const double w = biweight(kHandAt - kHandX[i]);
    total += w;
    if (kHandY[i] <= 2.5) below += w;
    weighted += w * kHandY[i];
    if (w > 0) steps.emplace_back(kHandY[i], w);
  }
  CHECK(cond_cdf(2.5, kHandAt, s, spec) == doctest::Approx(below / total).epsilon(1e-14));
  CHECK(cond_mean(kHandAt, kHandY, kHandX, spec) == doctest::Approx(weighted / total).epsilon(1e-14));
  std::sort(steps.begin(), steps.end());
  double cum = 0.0, q60 = kNaN;
  for (auto [y, w] : steps) {
    cum += w;
    if (cum / total >= 0.6) {
      q60 = y;
      break;
    }
  }
  CHECK(cond_quantile(0.6, kHandAt, s, spec) == q60);
  // the point at x = 3 lies outside the window
  CHECK(cond_cdf(4.0, kHandAt, s, spec) == 1.0);
  CHECK(cond_quantile(1.0, kHandAt, s, spec) == 4.0);
}

TEST_CASE("constant and single-observation windows") {
  const auto spec = unit_biweight();
  const auto constant = section(1, vec({7, 7, 7, 9}), vec({0.1, 0.2, 0.3, 5.0}));
  CHECK(cond_cdf(7.0, 0.2, constant, spec) == 1.0);
  CHECK(cond_cdf(6.999, 0.2, constant, spec) == 0.0);
  CHECK(cond_mean(0.2, constant.outcomes, constant.treatments, spec) == doctest::Approx(7.0).epsilon(1e-15));
  const auto single = section(1, vec({2, 9}), vec({0.0, 5.0}));
  CHECK(cond_cdf(1.9, 0.3, single, spec) == 0.0);
  CHECK(cond_cdf(2.0, 0.3, single, spec) == 1.0);
}

TEST_CASE("equal-weight quantiles") {
  // Symmetric placement around x gives equal biweight weights to -0.5 and 0.5.
  const auto s = section(1, vec({1, 3, 2}), vec({-0.5, 0.5, -0.5}));
  KernelSpec spec = unit_biweight();
  CHECK(cond_quantile(0.5, 0.0, s, spec) == 2.0);
  CHECK(cond_quantile(1.0, 0.0, s, spec) == 3.0);
  CHECK(error_kind_of([&] { cond_quantile(0.0, 0.0, s, spec); }) == ErrorKind::invalid_input);
}

TEST_CASE("empty windows are errors, never widened") {
  const auto spec = unit_biweight();
  const auto s = section(1, vec({1, 2}), vec({0.0, 0.5}));
  CHECK(error_kind_of([&] { cond_cdf(0.0, 3.0, s, spec); }) == ErrorKind::empty_window);
  CHECK(error_kind_of([&] { cond_quantile(0.5, 3.0, s, spec); }) == ErrorKind::empty_window);
  CHECK(error_kind_of([&] { cond_mean(3.0, s.outcomes, s.treatments, spec); }) == ErrorKind::empty_window);
  // |u| = 1 exactly has zero weight
  CHECK(error_kind_of([&] { cond_cdf(0.0, 1.5, s, spec); }) == ErrorKind::empty_window);
}

TEST_CASE("symmetric design with linear values recovers the line") {
  Vector x(21), y(21);
  for (Index i = 0; i < 21; ++i) {
    x[i] = 1.0 + 0.05 * static_cast<double>(i - 10);
    y[i] = 3.0 - 2.0 * x[i];
  }
  KernelSpec spec;
  spec.bandwidth = 0.4;
  CHECK(cond_mean(1.0, y, x, spec) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("conditional laws are valid and equivariant (property)") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = random_section(1, 400, seed);
    KernelSpec spec;
    spec.family = static_cast<KernelFamily>(seed % 3);
    const double x = s.treatments[0];
    // cdf monotone on a grid, 0 below, 1 above
    const double lo = s.outcomes.minCoeff() - 1, hi = s.outcomes.maxCoeff() + 1;
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double c = cond_cdf(lo + (hi - lo) * i / 200.0, x, s, spec);
      CHECK(c >= prev);
      CHECK(c <= 1.0);
      prev = c;
    }
    CHECK(cond_cdf(lo, x, s, spec) == 0.0);
    CHECK(cond_cdf(hi, x, s, spec) == 1.0);
    // equivariance of quantiles under psi = exp
    auto t = s;
    t.outcomes = s.outcomes.unaryExpr([](double v) { return std::exp(v); });
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
      CHECK(cond_quantile(p, x, t, spec) == std::exp(cond_quantile(p, x, s, spec)));
    }
    // mean inside in-window range
    const double h = resolve_bandwidth(spec, s.treatments);
    double wmin = kInf, wmax = -kInf;
    for (Index i = 0; i < s.size(); ++i) {
      if (std::abs(s.treatments[i] - x) < h) {
        wmin = std::min(wmin, s.outcomes[i]);
        wmax = std::max(wmax, s.outcomes[i]);
      }
    }
    const double m = cond_mean(x, s.outcomes, s.treatments, spec);
    CHECK(m >= wmin);
    CHECK(m <= wmax);
  }
}

TEST_CASE("Nadaraya-Watson mean is consistent for a known regression") {
  const Index n = 20000;
  const Vector x = normals(n, 3, 1);
  const Vector y = (2.0 * x + normals(n, 3, 2, 0.0, 0.1)).eval();
  std::vector<double> sx(x.data(), x.data() + n);
  std::nth_element(sx.begin(), sx.begin() + n / 2, sx.end());
  const double med = sx[static_cast<std::size_t>(n / 2)];
  CHECK(std::abs(cond_mean(med, y, x, KernelSpec{}) - 2.0 * med) < 0.05);
}
