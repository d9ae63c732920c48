#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "noisegap/simulate.hpp"
#include "noisegap/solver.hpp"

namespace noisegap {

/// Marchenko-Pastur law of n^{-1} sigma^2 X X* with aspect ratio y <= 1.
struct MpParams {
  double y = 1.0;
  double sigma2 = 1.0;

  void validate() const;
};

/// Closed-form Marchenko-Pastur density; zero outside (and on) the edges.
/// Evaluated directly from the formula, independent of the solver.
double mp_density(double x, const MpParams& mp);

/// Support edges sigma^2 (1 -+ sqrt(y))^2.
std::pair<double, double> mp_support(const MpParams& mp);

/// Solves the full system with t fixed at sigma2 and returns |g - sigma2 s|,
/// which vanishes identically for constant noise variance.
double dozier_consistency(cplx z, double y, double sigma2, std::span<const WeightedValue> u_atoms,
                          const SolverOptions& opts = {});

struct Histogram {
  std::vector<double> edges;  // bins + 1 ascending edges
  std::vector<double> mass;   // per-bin mass, sums to 1

  std::size_t bins() const noexcept { return mass.size(); }
};

/// Pooled eigenvalue histogram over trials 0..trials-1, uniform bins over
/// [min eigenvalue - 0.05, max eigenvalue + 0.05].
Histogram averaged_esd_oracle(const EnsembleSpec& spec, int trials, int bins);

/// CSV `bin_lo,bin_hi,mass`.
std::string histogram_to_csv(const Histogram& histogram);

}  // namespace noisegap
