#include "noisegap/density.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <nlohmann/json.hpp>
#include <sstream>

#include "noisegap/error.hpp"

namespace noisegap {

namespace {

// Warm starts between neighbouring nodes get a small budget; a node that does
// not converge from its neighbour falls back to a full continuation.
constexpr int kWarmStartBudget = 400;

void check_v(double v_eval) {
  if (!(v_eval > 0.0) || !std::isfinite(v_eval))
    throw Error(ErrorKind::InvalidParameter, "v_eval must be positive", v_eval);
}

StieltjesPair solve_node(double x, double v, double y, const JointSpectrum& h,
                         const SolverOptions& opts, const StieltjesPair* previous) {
  if (previous) {
    SolverOptions warm = opts;
    warm.max_iter = std::min(opts.max_iter, kWarmStartBudget);
    try {
      return solve_primal(cplx(x, v), y, h, warm, *previous);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidParameter) throw;
    }
  }
  try {
    return continuation_solve(x, v, y, h, opts);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("solver failed at grid node: ") + e.what(), x);
  }
}

}  // namespace

std::vector<Gap> SupportGaps::interior() const {
  std::vector<Gap> out;
  std::copy_if(gaps.begin(), gaps.end(), std::back_inserter(out),
               [](const Gap& g) { return !g.exterior; });
  return out;
}

std::vector<Gap> SupportGaps::exterior() const {
  std::vector<Gap> out;
  std::copy_if(gaps.begin(), gaps.end(), std::back_inserter(out),
               [](const Gap& g) { return g.exterior; });
  return out;
}

double zero_mass_for(double y) { return y > 1.0 ? 1.0 - 1.0 / y : 0.0; }

double density_at(double x, double y, const JointSpectrum& h, const SolverOptions& opts,
                  double v_eval, bool richardson) {
  if (!(x > 0.0)) throw Error(ErrorKind::InvalidParameter, "density requires x > 0", x);
  check_v(v_eval);
  const auto pair = continuation_solve(x, v_eval, y, h, opts);
  const double coarse = pair.s.imag() / std::numbers::pi;
  if (!richardson) return coarse;
  const auto fine_pair = solve_primal(cplx(x, 0.5 * v_eval), y, h, opts, pair);
  const double fine = fine_pair.s.imag() / std::numbers::pi;
  return std::max(0.0, 2.0 * fine - coarse);
}

DensityProfile density_grid(double lo, double hi, int points, double y, const JointSpectrum& h,
                            const SolverOptions& opts, double v_eval, bool richardson) {
  if (!(lo > 0.0) || !(hi > lo))
    throw Error(ErrorKind::InvalidInterval, "grid requires 0 < lo < hi", lo);
  if (points < 2) throw Error(ErrorKind::InvalidParameter, "grid needs at least two points");
  check_v(v_eval);
  opts.validate();

  DensityProfile profile;
  profile.v_used = v_eval;
  profile.zero_mass = zero_mass_for(y);
  profile.xs.resize(points);
  profile.fs.resize(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);

  std::optional<StieltjesPair> previous, previous_fine;
  for (int i = 0; i < points; ++i) {
    const double x = i + 1 == points ? hi : lo + step * i;
    profile.xs[i] = x;
    const auto pair = solve_node(x, v_eval, y, h, opts, previous ? &*previous : nullptr);
    previous = pair;
    double f = pair.s.imag() / std::numbers::pi;
    if (richardson) {
      const auto fine = solve_node(x, 0.5 * v_eval, y, h, opts,
                                   previous_fine ? &*previous_fine : &pair);
      previous_fine = fine;
      f = 2.0 * fine.s.imag() / std::numbers::pi - f;
    }
    profile.fs[i] = std::max(0.0, f);
  }
  return profile;
}

std::vector<CdfPoint> cdf(const DensityProfile& profile) {
  std::vector<CdfPoint> out;
  out.reserve(profile.xs.size());
  double total = profile.zero_mass;
  for (std::size_t i = 0; i < profile.xs.size(); ++i) {
    if (i > 0)
      total += 0.5 * (profile.xs[i] - profile.xs[i - 1]) * (profile.fs[i] + profile.fs[i - 1]);
    out.push_back({profile.xs[i], total});
  }
  return out;
}

SupportGaps detect_gaps(const DensityProfile& profile, double f_threshold, double min_width,
                        double margin_frac) {
  if (profile.xs.size() < 3 || profile.fs.size() != profile.xs.size())
    throw Error(ErrorKind::DegenerateProfile, "gap detection needs at least three nodes");
  if (!(f_threshold > 0.0) || !(min_width > 0.0))
    throw Error(ErrorKind::InvalidParameter, "gap thresholds must be positive");
  if (!(margin_frac > 0.0 && margin_frac < 0.5))
    throw Error(ErrorKind::InvalidParameter, "margin_frac must lie in (0, 0.5)", margin_frac);

  const std::size_t last = profile.xs.size() - 1;
  // absorbs rounding in node spacing when min_width is a whole number of steps
  const double width_slack = 1e-9 * (profile.xs[last] - profile.xs[0]);

  SupportGaps result;
  std::size_t i = 0;
  while (i <= last) {
    if (profile.fs[i] >= f_threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 <= last && profile.fs[j + 1] < f_threshold) ++j;
    const double c = profile.xs[i];
    const double d = profile.xs[j];
    if (d - c + width_slack >= min_width) {
      const double margin = margin_frac * (d - c);
      result.gaps.push_back({c, c + margin, d - margin, d, i == 0 || j == last});
    }
    i = j + 1;
  }
  return result;
}

GapCertificate certify_gap(double a, double b, double y, const JointSpectrum& h,
                           const SolverOptions& opts, double v_eval, int probe_points) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorKind::InvalidInterval, "certificate interval needs a < b", a);
  if (probe_points < 3)
    throw Error(ErrorKind::InvalidParameter, "certificate needs at least three probes");
  check_v(v_eval);

  GapCertificate cert;
  cert.a = a;
  cert.b = b;
  cert.im_bound = std::sqrt(v_eval);
  cert.delta_min = std::numeric_limits<double>::infinity();
  cert.slope_min = std::numeric_limits<double>::infinity();

  std::optional<StieltjesPair> previous;
  const double step = (b - a) / static_cast<double>(probe_points - 1);
  for (int k = 0; k < probe_points; ++k) {
    const double x = k + 1 == probe_points ? b : a + step * k;
    const auto pair = solve_node(x, v_eval, y, h, opts, previous ? &*previous : nullptr);
    previous = pair;
    const auto companion = primal_to_companion(pair, cplx(x, v_eval), y);
    for (const auto& atom : h.atoms()) {
      const double delta = std::abs(1.0 + atom.u * companion.g + atom.t * companion.s);
      cert.delta_min = std::min(cert.delta_min, delta);
    }
    cert.max_im = std::max(cert.max_im, companion.s.imag());
    cert.probes.push_back(x);
    cert.re_companion.push_back(companion.s.real());
  }

  cert.monotone = true;
  for (int k = 1; k < probe_points; ++k)
    if (!(cert.re_companion[k] > cert.re_companion[k - 1])) cert.monotone = false;
  for (int k = 1; k + 1 < probe_points; ++k) {
    const double slope = (cert.re_companion[k + 1] - cert.re_companion[k - 1]) /
                         (cert.probes[k + 1] - cert.probes[k - 1]);
    cert.slope_min = std::min(cert.slope_min, slope);
  }
  return cert;
}

std::string profile_to_csv(const DensityProfile& profile) {
  std::ostringstream out;
  out << std::setprecision(17) << "x,f,v\n";
  for (std::size_t i = 0; i < profile.xs.size(); ++i)
    out << profile.xs[i] << ',' << profile.fs[i] << ',' << profile.v_used << '\n';
  return out.str();
}

std::string cdf_to_csv(const std::vector<CdfPoint>& points) {
  std::ostringstream out;
  out << std::setprecision(17) << "x,F\n";
  for (const auto& p : points) out << p.x << ',' << p.F << '\n';
  return out.str();
}

std::string gaps_to_json(const SupportGaps& gaps) {
  auto out = nlohmann::json::array();
  for (const auto& g : gaps.gaps)
    out.push_back({{"c", g.c}, {"a", g.a}, {"b", g.b}, {"d", g.d}, {"exterior", g.exterior}});
  return out.dump();
}

}  // namespace noisegap
