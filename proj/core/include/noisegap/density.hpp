#pragma once

#include <string>
#include <vector>

#include "noisegap/solver.hpp"
#include "noisegap/spectrum.hpp"

namespace noisegap {

/// Limiting density sampled on a uniform grid at height v_used above the
/// real axis. zero_mass is the atom at the origin (1 - 1/y when y > 1).
struct DensityProfile {
  std::vector<double> xs;
  std::vector<double> fs;
  double v_used = 0.0;
  double zero_mass = 0.0;
};

struct CdfPoint {
  double x;
  double F;
};

/// Low-density run (c, d) of a profile with its shrunk inner interval [a, b].
/// Exterior runs touch the grid boundary and bracket the support from outside.
struct Gap {
  double c;
  double a;
  double b;
  double d;
  bool exterior;
};

struct SupportGaps {
  std::vector<Gap> gaps;  // ascending, pairwise disjoint

  std::vector<Gap> interior() const;
  std::vector<Gap> exterior() const;
};

/// Witnesses that [a, b] lies in a spectral gap. The companion pair evaluated
/// just above the real axis stays away from every pole 1 + u g + t s = 0 and
/// has an increasing, essentially real transform there.
struct GapCertificate {
  double a = 0.0;
  double b = 0.0;
  double delta_min = 0.0;  // min over probes and atoms of |1 + u g_c + t s_c|
  double slope_min = 0.0;  // min central difference of Re s_c
  bool monotone = false;   // Re s_c strictly increasing across probes
  double max_im = 0.0;     // max Im s_c across probes
  double im_bound = 0.0;   // allowed max_im, sqrt(v_eval)
  std::vector<double> probes;
  std::vector<double> re_companion;

  bool valid() const noexcept {
    return delta_min > 0.0 && slope_min > 0.0 && monotone && max_im <= im_bound;
  }
};

/// Point mass at the origin of the limiting law: max(0, 1 - 1/y).
double zero_mass_for(double y);

/// pi^{-1} Im s(x + i v_eval), reached by continuation. With `richardson` the
/// value is extrapolated from heights v_eval and v_eval/2.
double density_at(double x, double y, const JointSpectrum& h, const SolverOptions& opts,
                  double v_eval, bool richardson = false);

/// Density on a uniform grid, swept left to right with warm starts.
DensityProfile density_grid(double lo, double hi, int points, double y, const JointSpectrum& h,
                            const SolverOptions& opts, double v_eval, bool richardson = false);

/// Cumulative trapezoid integral offset by zero_mass.
std::vector<CdfPoint> cdf(const DensityProfile& profile);

/// Runs of grid nodes with f < f_threshold spanning at least min_width.
SupportGaps detect_gaps(const DensityProfile& profile, double f_threshold, double min_width,
                        double margin_frac);

GapCertificate certify_gap(double a, double b, double y, const JointSpectrum& h,
                           const SolverOptions& opts, double v_eval, int probe_points);

/// CSV with header `x,f,v`.
std::string profile_to_csv(const DensityProfile& profile);
/// CSV with header `x,F`.
std::string cdf_to_csv(const std::vector<CdfPoint>& points);
/// JSON list of {"c","a","b","d","exterior"}.
std::string gaps_to_json(const SupportGaps& gaps);

}  // namespace noisegap
