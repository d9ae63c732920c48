#include <doctest.h>

#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "../support/mp_quadrature.hpp"
#include "noisegap/error.hpp"
#include "noisegap/solver.hpp"

using namespace noisegap;
using namespace std::complex_literals;

namespace {

JointSpectrum point_mass(double t = 1.0) {
  const std::vector<SpectralAtom> atoms{{0, t, 1}};
  return joint_spectrum_from_atoms(atoms);
}

JointSpectrum two_bulk_noise() {
  const std::vector<SpectralAtom> atoms{{0, 1, 0.5}, {0, 4, 0.5}};
  return joint_spectrum_from_atoms(atoms);
}

JointSpectrum mixed() {
  const std::vector<SpectralAtom> atoms{{0, 1, 0.3}, {4, 1, 0.3}, {1, 2.5, 0.4}};
  return joint_spectrum_from_atoms(atoms);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected noisegap::Error");
  return ErrorKind::InvalidParameter;
}

const double mp_f1 = std::sqrt(1.25 * 0.75) / (2 * std::numbers::pi * 0.25);

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("residual at large z") {
    const cplx z = 1e6i;
    const StieltjesPair pair{-1.0 / z, -1.0 / z};
    CHECK(system_residual(pair, z, 0.25, point_mass()).max_abs() < 1e-5);
  }

  TEST_CASE("residual of a converged pair") {
    const cplx z = 1.0 + 0.001i;
    const auto pair = solve_primal(z, 0.25, point_mass());
    CHECK(system_residual(pair, z, 0.25, point_mass()).max_abs() < 1e-10);
    CHECK(pair.s.imag() == doctest::Approx(std::numbers::pi * 0.6164).epsilon(3e-3));
  }

  TEST_CASE("residual pole") {
    // d = -(1 + y s) z + (1 - y) vanishes at z = 1, s = -1 for y = 1/4
    const StieltjesPair pair{-1.0, 0.0};
    CHECK(kind_of([&] { system_residual(pair, 1.0, 0.25, point_mass()); }) == ErrorKind::PoleHit);
    const StieltjesPair bad_g{1i, -4.0};
    CHECK(kind_of([&] { system_residual(bad_g, 1i, 0.25, point_mass()); }) ==
          ErrorKind::PoleHit);
  }

  TEST_CASE("solve_primal matches the MP density") {
    const auto pair = solve_primal(1.0 + 1e-3i, 0.25, point_mass());
    CHECK(std::abs(pair.s.imag() - std::numbers::pi * mp_f1) < 2e-3);
    CHECK(pair.s.imag() > 0);
    CHECK(pair.g.imag() > 0);
  }

  TEST_CASE("large z asymptotics") {
    for (double y : {0.1, 0.25, 1.0, 2.0}) {
      const cplx z = 1e6i;
      const auto pair = solve_primal(z, y, point_mass());
      CHECK(std::abs(pair.s + 1.0 / z) < 1e-5 * std::abs(1.0 / z));
      const auto c = primal_to_companion(pair, z, y);
      CHECK(std::abs(c.g + 1.0 / z) < 1e-5 * std::abs(1.0 / z));
    }
  }

  TEST_CASE("constant noise forces g = sigma2 s") {
    for (double sigma2 : {1.0, 3.0}) {
      const auto pair = solve_primal(0.7 + 0.05i, 0.25, point_mass(sigma2));
      CHECK(std::abs(pair.g - sigma2 * pair.s) < 1e-10);
    }
  }

  TEST_CASE("companion agrees with primal at y = 1") {
    const cplx z = 1.5 + 0.1i;
    const auto p = solve_primal(z, 1.0, point_mass());
    const auto c = solve_companion(z, 1.0, point_mass());
    CHECK(std::abs(c.s - p.s) < 1e-9);
  }

  TEST_CASE("converted primal satisfies the companion system") {
    const auto h = mixed();
    for (cplx z : {1.0 + 0.1i, 3.0 + 0.01i, 0.2 + 1.0i}) {
      const auto c = primal_to_companion(solve_primal(z, 0.3, h), z, 0.3);
      CHECK(companion_residual(c, z, 0.3, h).max_abs() < 1e-9);
    }
  }

  TEST_CASE("relation examples") {
    const StieltjesPair p{0.3 + 0.7i, 0.1 + 0.2i};
    CHECK(primal_to_companion(p, 1i, 1.0).s == p.s);
    CHECK(std::abs(primal_to_companion({0.3i, 0.0}, 1i, 0.5).g - 1i) < 1e-15);
    CHECK(companion_to_primal({p.s, -1.0 / (2.0 + 1i)}, 2.0 + 1i, 0.4).g == 0.0);
    CHECK(std::abs(companion_to_primal({p.s, p.g}, 1i, 1.0).s - p.s) < 1e-15);
    CHECK(kind_of([&] { primal_to_companion({p.s, -1.0}, 1i, 1.0); }) == ErrorKind::PoleHit);
    CHECK(kind_of([&] { primal_to_companion(p, 0.0, 1.0); }) == ErrorKind::PoleHit);
    CHECK(kind_of([&] { companion_to_primal({p.s, 0.0}, 1i, 1.0); }) == ErrorKind::PoleHit);
  }

  TEST_CASE("property: round trips to 1e-14") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.05, 2.0);
    for (int k = 0; k < 200; ++k) {
      const StieltjesPair p{cplx(unit(rng) - 1, unit(rng)), cplx(unit(rng) - 1, unit(rng))};
      const cplx z(unit(rng) - 1, unit(rng));
      const double y = unit(rng);
      const auto back = companion_to_primal(primal_to_companion(p, z, y), z, y);
      REQUIRE(std::abs(back.s - p.s) < 1e-14 * std::max(1.0, std::abs(p.s)) * 10);
      REQUIRE(std::abs(back.g - p.g) < 1e-14 * std::max(1.0, std::abs(p.g)) * 10);
    }
  }

  TEST_CASE("continuation reaches the MP density at x = 1") {
    const auto pair = continuation_solve(1.0, 1e-5, 0.25, point_mass());
    CHECK(std::abs(pair.s.imag() - std::numbers::pi * mp_f1) < 1e-3);
    const auto ref = testing::mp_stieltjes(1.0 + 1e-2i, 0.25);
    const auto at_1e2 = continuation_solve(1.0, 1e-2, 0.25, point_mass());
    CHECK(std::abs(at_1e2.s - ref) < 1e-6);
  }

  TEST_CASE("continuation far right of the support") {
    const auto pair = continuation_solve(100.0, 1e-5, 0.25, point_mass());
    CHECK(std::abs(pair.s.imag()) < 1e-6);
    CHECK(pair.s.real() > -0.0105);
    CHECK(pair.s.real() < -0.0099);
    const auto ref = testing::mp_stieltjes(100.0 + 1e-5i, 0.25);
    CHECK(std::abs(pair.s - ref) < 1e-9);
  }

  TEST_CASE("continuation with v_start at the target is a single solve") {
    SolverOptions opts;
    opts.v_start = 0.1;
    const auto a = continuation_solve(1.0, 0.1, 0.25, point_mass(), opts);
    const auto b = solve_primal(1.0 + 0.1i, 0.25, point_mass(), opts);
    CHECK(a.s == b.s);
    CHECK(a.g == b.g);
  }

  TEST_CASE("errors") {
    SolverOptions opts;
    opts.max_iter = 1;
    CHECK(kind_of([&] { solve_primal(1.0 + 1e-4i, 0.25, two_bulk_noise(), opts); }) ==
          ErrorKind::NoConvergence);
    CHECK(kind_of([&] { solve_primal(1.0 - 1e-4i, 0.25, point_mass()); }) ==
          ErrorKind::InvalidParameter);
    SolverOptions bad;
    bad.v_factor = 1.0;
    CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::InvalidParameter);
    CHECK(kind_of([] { continuation_solve(1.0, 0.0, 0.25, point_mass()); }) ==
          ErrorKind::InvalidParameter);
  }

  TEST_CASE("property: uniqueness, half-plane and positivity of Re(1 + y g)") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> re(0.0, 6.0), im(0.01, 1.0), st(0.05, 3.0);
    const auto h = mixed();
    const double y = 0.3;
    const SolverOptions opts;
    for (int k = 0; k < 100; ++k) {
      const cplx z(re(rng), im(rng));
      const auto ref = solve_primal(z, y, h, opts);
      REQUIRE(ref.s.imag() > 0);
      REQUIRE(ref.g.imag() > 0);
      REQUIRE((1.0 + y * ref.g).real() > 0);
      REQUIRE(relative_residual(ref, z, y, h) < opts.tol);
      for (int j = 0; j < 5; ++j) {
        const StieltjesPair start{cplx(st(rng) - 1.5, st(rng)), cplx(st(rng) - 1.5, st(rng))};
        const auto other = solve_primal(z, y, h, opts, start);
        const double scale = std::max({1.0, std::abs(ref.s), std::abs(ref.g)});
        REQUIRE(std::abs(other.s - ref.s) < 10 * opts.tol * scale * 10);
        REQUIRE(std::abs(other.g - ref.g) < 10 * opts.tol * scale * 10);
      }
    }
  }

  TEST_CASE("property: independently solved systems satisfy the relations") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> re(0.0, 6.0), im(0.01, 1.0);
    const auto h = two_bulk_noise();
    for (int k = 0; k < 50; ++k) {
      const cplx z(re(rng), im(rng));
      const auto p = solve_primal(z, 0.1, h);
      const auto c = solve_companion(z, 0.1, h);
      REQUIRE(c.s.imag() > 0);
      const auto expect = primal_to_companion(p, z, 0.1);
      REQUIRE(std::abs(c.s - expect.s) < 1e-9);
      REQUIRE(std::abs(c.g - expect.g) < 1e-9);
    }
  }

  TEST_CASE("property: deterministic-equivalent trace equals s") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> re(0.0, 6.0), im(0.01, 1.0);
    const auto h = mixed();
    for (int k = 0; k < 50; ++k) {
      const cplx z(re(rng), im(rng));
      const auto p = solve_primal(z, 0.3, h);
      const double scale = std::max(1.0, std::abs(p.s));
      REQUIRE(std::abs(deterministic_equivalent_trace(p, z, 0.3, h) - p.s) < 1e-11 * scale);
    }
  }

  TEST_CASE("y above one") {
    const cplx z = 0.5 + 0.01i;
    const auto p = solve_primal(z, 2.0, point_mass());
    CHECK(p.s.imag() > 0);
    CHECK(relative_residual(p, z, 2.0, point_mass()) < 1e-12);
  }
}
