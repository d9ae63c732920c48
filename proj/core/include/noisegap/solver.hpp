#pragma once

#include <complex>
#include <optional>
#include <utility>

#include "noisegap/spectrum.hpp"

namespace noisegap {

using cplx = std::complex<double>;

/// Solution (s, g) of the primal system at z: s is the Stieltjes transform of
/// the limiting distribution F, g the limit of p^{-1} tr T (B - zI)^{-1}.
struct StieltjesPair {
  cplx s;
  cplx g;
};

/// Solution of the companion system, i.e. the transforms attached to the
/// n x n companion matrix: s is the companion transform, g the companion
/// T-weighted transform.
struct CompanionPair {
  cplx s;
  cplx g;
};

struct SolverOptions {
  double damping_init = 0.5;
  double tol = 1e-12;  // relative residual target
  int max_iter = 50'000;
  double v_start = 1.0;
  double v_factor = 0.5;

  void validate() const;
};

/// Equation residuals (first, second) of a system at a candidate point.
struct Residual {
  cplx first;
  cplx second;

  double max_abs() const noexcept { return std::max(std::abs(first), std::abs(second)); }
};

/// Residual of the primal system: (s - sum w/d, g - sum w t/d) with
/// d = u/(1 + y g) - (1 + y s t) z + t (1 - y).
Residual system_residual(const StieltjesPair& pair, cplx z, double y, const JointSpectrum& h);

/// Residual of the companion system written as (z - rhs1, z - rhs2).
Residual companion_residual(const CompanionPair& pair, cplx z, double y,
                            const JointSpectrum& h);

/// Residual magnitude relative to max(1, |s|, |g|); the solvers stop when it
/// drops below SolverOptions::tol.
double relative_residual(const StieltjesPair& pair, cplx z, double y, const JointSpectrum& h);

/// Unique solution of the primal system in C+ x C+ for Im z > 0.
///
/// Hybrid scheme: a Newton step on the 2x2 complex system is tried first and
/// kept when it stays in the upper half-plane and lowers the residual;
/// otherwise a damped Picard step is taken, halving the damping (floor 1/64)
/// when the iterate leaves C+ or the residual grows. If the primal iteration
/// stalls, the companion system is solved instead and converted back.
StieltjesPair solve_primal(cplx z, double y, const JointSpectrum& h,
                           const SolverOptions& opts = {},
                           std::optional<StieltjesPair> start = std::nullopt);

CompanionPair solve_companion(cplx z, double y, const JointSpectrum& h,
                              const SolverOptions& opts = {},
                              std::optional<CompanionPair> start = std::nullopt);

CompanionPair primal_to_companion(const StieltjesPair& pair, cplx z, double y);
StieltjesPair companion_to_primal(const CompanionPair& pair, cplx z, double y);

/// Solves at z = x + i v for v shrinking geometrically from opts.v_start to
/// v_target, warm-starting every stage from the previous one. A stage that
/// fails is retried through intermediate values of v before giving up.
StieltjesPair continuation_solve(double x, double v_target, double y, const JointSpectrum& h,
                                 const SolverOptions& opts = {});

/// Trace of the deterministic-equivalent resolvent,
/// sum w / (u/(1 + y g) - z s_c t - z) with s_c the companion transform.
/// Equals s at a solution of the primal system.
cplx deterministic_equivalent_trace(const StieltjesPair& pair, cplx z, double y,
                                    const JointSpectrum& h);

}  // namespace noisegap
