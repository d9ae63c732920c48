#include "noisegap/solver.hpp"

#include <algorithm>
#include <cmath>

#include "noisegap/error.hpp"

namespace noisegap {

namespace {

constexpr double kDampingFloor = 1.0 / 64.0;
constexpr int kRefinementDepth = 8;
constexpr int kPolishBudget = 200;

struct Point {
  cplx a;
  cplx b;
};

// Derivative of the fixed-point map, row = component of the image.
struct Jacobian {
  cplx aa, ab, ba, bb;
};

struct MapValue {
  Point image;
  Jacobian jac;
};

bool finite(cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

bool admissible(const Point& p) {
  return finite(p.a) && finite(p.b) && p.a.imag() > 0.0 && p.b.imag() > 0.0;
}

double scaled_gap(const Point& x, const Point& image) {
  const double scale = std::max({1.0, std::abs(x.a), std::abs(x.b)});
  return std::max(std::abs(x.a - image.a), std::abs(x.b - image.b)) / scale;
}

// (s, g) -> (sum w/d, sum w t/d), d = u/(1+yg) - (1+yst) z + t(1-y).
std::optional<MapValue> primal_map(const Point& x, cplx z, double y, const JointSpectrum& h) {
  const cplx s = x.a;
  const cplx g = x.b;
  const cplx shift = 1.0 + y * g;
  if (shift == 0.0) return std::nullopt;
  const cplx shift2 = shift * shift;

  MapValue out{{0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}};
  for (const auto& atom : h.atoms()) {
    const cplx d = atom.u / shift - (1.0 + y * s * atom.t) * z + atom.t * (1.0 - y);
    if (d == 0.0) return std::nullopt;
    const cplx inv = 1.0 / d;
    const cplx inv2 = inv * inv;
    // d(1/d)/ds = y t z / d^2, d(1/d)/dg = u y / ((1+yg)^2 d^2)
    const cplx by_s = inv2 * (y * atom.t * z);
    const cplx by_g = inv2 * (atom.u * y / shift2);
    out.image.a += atom.w * inv;
    out.image.b += atom.w * atom.t * inv;
    out.jac.aa += atom.w * by_s;
    out.jac.ab += atom.w * by_g;
    out.jac.ba += atom.w * atom.t * by_s;
    out.jac.bb += atom.w * atom.t * by_g;
  }
  if (!finite(out.image.a) || !finite(out.image.b)) return std::nullopt;
  return out;
}

// Companion system solved for its unknowns:
//   s_c = -((1-y) + y sum w/D) / z,   g_c = -1 / (z - y sum w t/D),
// with D = 1 + u g_c + t s_c.
std::optional<MapValue> companion_map(const Point& x, cplx z, double y, const JointSpectrum& h) {
  const cplx sc = x.a;
  const cplx gc = x.b;
  cplx s0 = 0.0, s1 = 0.0;
  cplx ds0_ds = 0.0, ds0_dg = 0.0, ds1_ds = 0.0, ds1_dg = 0.0;
  for (const auto& atom : h.atoms()) {
    const cplx d = 1.0 + atom.u * gc + atom.t * sc;
    if (d == 0.0) return std::nullopt;
    const cplx inv = 1.0 / d;
    const cplx inv2 = inv * inv;
    s0 += atom.w * inv;
    s1 += atom.w * atom.t * inv;
    ds0_ds -= atom.w * atom.t * inv2;
    ds0_dg -= atom.w * atom.u * inv2;
    ds1_ds -= atom.w * atom.t * atom.t * inv2;
    ds1_dg -= atom.w * atom.t * atom.u * inv2;
  }
  const cplx e = z - y * s1;
  if (e == 0.0) return std::nullopt;
  const cplx e2 = e * e;

  MapValue out;
  out.image.a = -((1.0 - y) + y * s0) / z;
  out.image.b = -1.0 / e;
  out.jac.aa = -(y / z) * ds0_ds;
  out.jac.ab = -(y / z) * ds0_dg;
  out.jac.ba = -y * ds1_ds / e2;
  out.jac.bb = -y * ds1_dg / e2;
  if (!finite(out.image.a) || !finite(out.image.b)) return std::nullopt;
  return out;
}

// Newton step for x = F(x): solve (I - J) delta = F(x) - x.
std::optional<Point> newton_step(const Point& x, const MapValue& value) {
  const cplx m11 = 1.0 - value.jac.aa;
  const cplx m12 = -value.jac.ab;
  const cplx m21 = -value.jac.ba;
  const cplx m22 = 1.0 - value.jac.bb;
  const cplx det = m11 * m22 - m12 * m21;
  if (det == 0.0 || !finite(det)) return std::nullopt;
  const cplx ra = value.image.a - x.a;
  const cplx rb = value.image.b - x.b;
  Point next{x.a + (m22 * ra - m12 * rb) / det, x.b + (m11 * rb - m21 * ra) / det};
  if (!finite(next.a) || !finite(next.b)) return std::nullopt;
  return next;
}

template <class Map>
Point iterate_fixed_point(Map&& map, Point x, const SolverOptions& opts, int max_iter,
                          double v) {
  if (!admissible(x))
    throw Error(ErrorKind::LeftUpperHalfPlane, "starting point is not in the upper half-plane", v);
  auto value = map(x);
  if (!value) throw Error(ErrorKind::PoleHit, "fixed-point map has a pole at the start point", v);
  double residual = scaled_gap(x, value->image);
  double damping = opts.damping_init;

  for (int iter = 0; iter < max_iter; ++iter) {
    if (residual <= opts.tol) return x;

    if (auto candidate = newton_step(x, *value); candidate && admissible(*candidate)) {
      if (auto next = map(*candidate)) {
        const double next_residual = scaled_gap(*candidate, next->image);
        if (next_residual < residual) {
          x = *candidate;
          value = next;
          residual = next_residual;
          continue;
        }
      }
    }

    // damped Picard fallback
    for (;;) {
      const Point trial{(1.0 - damping) * x.a + damping * value->image.a,
                        (1.0 - damping) * x.b + damping * value->image.b};
      const bool at_floor = damping <= kDampingFloor;
      std::optional<MapValue> next;
      if (admissible(trial)) next = map(trial);
      if (next) {
        const double next_residual = scaled_gap(trial, next->image);
        if (next_residual <= residual || at_floor) {
          x = trial;
          value = next;
          residual = next_residual;
          break;
        }
      } else if (at_floor) {
        throw Error(ErrorKind::LeftUpperHalfPlane,
                    "iterate left the upper half-plane at the damping floor", v);
      }
      damping = std::max(damping * 0.5, kDampingFloor);
    }
  }
  if (residual <= opts.tol) return x;
  throw Error(ErrorKind::NoConvergence, "fixed-point iteration exhausted max_iter", v);
}

void check_inputs(cplx z, double y) {
  if (!(z.imag() > 0.0) || !finite(z))
    throw Error(ErrorKind::InvalidParameter, "z must lie in the upper half-plane", z.imag());
  if (!(y > 0.0) || !std::isfinite(y))
    throw Error(ErrorKind::InvalidParameter, "aspect ratio y must be positive", y);
}

bool is_solver_failure(const Error& e) {
  return e.kind() == ErrorKind::NoConvergence || e.kind() == ErrorKind::LeftUpperHalfPlane ||
         e.kind() == ErrorKind::PoleHit;
}

StieltjesPair solve_primal_budget(cplx z, double y, const JointSpectrum& h,
                                  const SolverOptions& opts, const StieltjesPair& start,
                                  int max_iter) {
  auto map = [&](const Point& p) { return primal_map(p, z, y, h); };
  try {
    const Point x = iterate_fixed_point(map, {start.s, start.g}, opts, max_iter, z.imag());
    return {x.a, x.b};
  } catch (const Error& primal_error) {
    if (!is_solver_failure(primal_error)) throw;
    // Stall fallback through the companion system.
    try {
      auto cmap = [&](const Point& p) { return companion_map(p, z, y, h); };
      Point cstart{cplx(0.0, 1.0), cplx(0.0, 1.0)};
      if (admissible({start.s, start.g}) && (1.0 + y * start.g) != 0.0) {
        const auto c = primal_to_companion(start, z, y);
        if (admissible({c.s, c.g})) cstart = {c.s, c.g};
      }
      const Point c = iterate_fixed_point(cmap, cstart, opts, max_iter, z.imag());
      const auto converted = companion_to_primal({c.a, c.b}, z, y);
      const Point x = iterate_fixed_point(map, {converted.s, converted.g}, opts, kPolishBudget,
                                          z.imag());
      return {x.a, x.b};
    } catch (const Error&) {
      throw primal_error;
    }
  }
}

}  // namespace

void SolverOptions::validate() const {
  if (!(damping_init > 0.0 && damping_init <= 1.0))
    throw Error(ErrorKind::InvalidParameter, "damping_init must lie in (0, 1]", damping_init);
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "tol must be positive", tol);
  if (max_iter <= 0) throw Error(ErrorKind::InvalidParameter, "max_iter must be positive");
  if (!(v_start > 0.0)) throw Error(ErrorKind::InvalidParameter, "v_start must be positive", v_start);
  if (!(v_factor > 0.0 && v_factor < 1.0))
    throw Error(ErrorKind::InvalidParameter, "v_factor must lie in (0, 1)", v_factor);
}

Residual system_residual(const StieltjesPair& pair, cplx z, double y, const JointSpectrum& h) {
  const cplx shift = 1.0 + y * pair.g;
  if (shift == 0.0) throw Error(ErrorKind::PoleHit, "1 + y g vanishes");
  cplx sum_s = 0.0, sum_g = 0.0;
  for (const auto& atom : h.atoms()) {
    const cplx d = atom.u / shift - (1.0 + y * pair.s * atom.t) * z + atom.t * (1.0 - y);
    if (d == 0.0) throw Error(ErrorKind::PoleHit, "denominator vanishes at a spectral atom");
    sum_s += atom.w / d;
    sum_g += atom.w * atom.t / d;
  }
  return {pair.s - sum_s, pair.g - sum_g};
}

Residual companion_residual(const CompanionPair& pair, cplx z, double y,
                            const JointSpectrum& h) {
  if (pair.s == 0.0 || pair.g == 0.0)
    throw Error(ErrorKind::PoleHit, "companion transforms must be nonzero");
  cplx s0 = 0.0, s1 = 0.0;
  for (const auto& atom : h.atoms()) {
    const cplx d = 1.0 + atom.u * pair.g + atom.t * pair.s;
    if (d == 0.0) throw Error(ErrorKind::PoleHit, "1 + u g + t s vanishes at a spectral atom");
    s0 += atom.w / d;
    s1 += atom.w * atom.t / d;
  }
  const cplx rhs1 = -(1.0 - y) / pair.s - (y / pair.s) * s0;
  const cplx rhs2 = -1.0 / pair.g + y * s1;
  return {z - rhs1, z - rhs2};
}

double relative_residual(const StieltjesPair& pair, cplx z, double y, const JointSpectrum& h) {
  const auto r = system_residual(pair, z, y, h);
  return r.max_abs() / std::max({1.0, std::abs(pair.s), std::abs(pair.g)});
}

StieltjesPair solve_primal(cplx z, double y, const JointSpectrum& h, const SolverOptions& opts,
                           std::optional<StieltjesPair> start) {
  opts.validate();
  check_inputs(z, y);
  const StieltjesPair initial = start.value_or(StieltjesPair{cplx(0.0, 1.0), cplx(0.0, 1.0)});
  return solve_primal_budget(z, y, h, opts, initial, opts.max_iter);
}

CompanionPair solve_companion(cplx z, double y, const JointSpectrum& h, const SolverOptions& opts,
                              std::optional<CompanionPair> start) {
  opts.validate();
  check_inputs(z, y);
  const CompanionPair initial = start.value_or(CompanionPair{cplx(0.0, 1.0), cplx(0.0, 1.0)});
  auto map = [&](const Point& p) { return companion_map(p, z, y, h); };
  const Point x = iterate_fixed_point(map, {initial.s, initial.g}, opts, opts.max_iter, z.imag());
  return {x.a, x.b};
}

CompanionPair primal_to_companion(const StieltjesPair& pair, cplx z, double y) {
  if (z == 0.0) throw Error(ErrorKind::PoleHit, "z must be nonzero");
  const cplx shift = 1.0 + y * pair.g;
  if (shift == 0.0) throw Error(ErrorKind::PoleHit, "1 + y g vanishes");
  return {-(1.0 - y) / z + y * pair.s, -1.0 / (z * shift)};
}

StieltjesPair companion_to_primal(const CompanionPair& pair, cplx z, double y) {
  if (y == 0.0) throw Error(ErrorKind::PoleHit, "y must be nonzero");
  if (z == 0.0) throw Error(ErrorKind::PoleHit, "z must be nonzero");
  if (pair.g == 0.0) throw Error(ErrorKind::PoleHit, "companion g must be nonzero");
  return {(pair.s + (1.0 - y) / z) / y, (-1.0 / (z * pair.g) - 1.0) / y};
}

namespace {

StieltjesPair advance(double x, double v_from, double v_to, const StieltjesPair& from, double y,
                      const JointSpectrum& h, const SolverOptions& opts, int depth) {
  try {
    return solve_primal_budget(cplx(x, v_to), y, h, opts, from, opts.max_iter);
  } catch (const Error& e) {
    if (!is_solver_failure(e) || depth >= kRefinementDepth) throw;
  }
  const double v_mid = std::sqrt(v_from * v_to);
  const auto mid = advance(x, v_from, v_mid, from, y, h, opts, depth + 1);
  return advance(x, v_mid, v_to, mid, y, h, opts, depth + 1);
}

}  // namespace

StieltjesPair continuation_solve(double x, double v_target, double y, const JointSpectrum& h,
                                 const SolverOptions& opts) {
  opts.validate();
  if (!(v_target > 0.0))
    throw Error(ErrorKind::InvalidParameter, "v_target must be positive", v_target);
  if (!std::isfinite(x)) throw Error(ErrorKind::InvalidParameter, "x must be finite");
  if (opts.v_start <= v_target) return solve_primal(cplx(x, v_target), y, h, opts);

  double v = opts.v_start;
  auto pair = solve_primal(cplx(x, v), y, h, opts);
  while (v > v_target) {
    const double next = std::max(v * opts.v_factor, v_target);
    pair = advance(x, v, next, pair, y, h, opts, 0);
    v = next;
  }
  return pair;
}

cplx deterministic_equivalent_trace(const StieltjesPair& pair, cplx z, double y,
                                    const JointSpectrum& h) {
  const auto companion = primal_to_companion(pair, z, y);
  const cplx shift = 1.0 + y * pair.g;
  cplx trace = 0.0;
  for (const auto& atom : h.atoms()) {
    const cplx d = atom.u / shift - z * companion.s * atom.t - z;
    if (d == 0.0) throw Error(ErrorKind::PoleHit, "deterministic equivalent is singular");
    trace += atom.w / d;
  }
  return trace;
}

}  // namespace noisegap
