#pragma once

// Test-only reference values for the Marchenko-Pastur case, computed by
// quadrature from the closed form. Nothing here calls the solver.

#include <cmath>
#include <complex>
#include <numbers>

namespace noisegap::testing {

struct MpEdges {
  double lo;
  double hi;
};

inline MpEdges mp_edges(double y, double sigma2 = 1.0) {
  const double r = std::sqrt(y);
  return {sigma2 * (1 - r) * (1 - r), sigma2 * (1 + r) * (1 + r)};
}

// Substituting lambda = mid - half cos(theta) turns the square-root edges
// into a smooth periodic integrand, so the midpoint rule converges fast.
template <class Fn>
auto mp_integrate(double y, double sigma2, Fn&& fn, int nodes = 20000) {
  const auto [lo, hi] = mp_edges(y, sigma2);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  using Value = decltype(fn(1.0));
  Value total{};
  const double dtheta = std::numbers::pi / nodes;
  for (int k = 0; k < nodes; ++k) {
    const double theta = (k + 0.5) * dtheta;
    const double lambda = mid - half * std::cos(theta);
    // density * dlambda = (half sin)^2 / (2 pi sigma2 lambda y) dtheta
    const double weight =
        (half * std::sin(theta)) * (half * std::sin(theta)) /
        (2.0 * std::numbers::pi * sigma2 * lambda * y);
    total += fn(lambda) * (weight * dtheta);
  }
  return total;
}

inline double mp_cdf(double x, double y, double sigma2 = 1.0) {
  return mp_integrate(y, sigma2, [x](double l) { return l <= x ? 1.0 : 0.0; }, 200000);
}

inline std::complex<double> mp_stieltjes(std::complex<double> z, double y, double sigma2 = 1.0) {
  return mp_integrate(y, sigma2,
                      [z](double l) { return std::complex<double>(1.0) / (l - z); });
}

}  // namespace noisegap::testing
