#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "noisegap/error.hpp"
#include "noisegap/simulate.hpp"
#include "noisegap/solver.hpp"

using namespace noisegap;
using namespace std::complex_literals;

namespace {

EnsembleSpec mp_spec(int p, int n, std::uint64_t seed) {
  EnsembleSpec spec;
  spec.p = p;
  spec.n = n;
  spec.master_seed = seed;
  return spec;
}

EigenSample sample_of(std::vector<double> eigs) {
  EigenSample s;
  s.eigs = std::move(eigs);
  return s;
}

std::vector<double> singular_values(const Eigen::MatrixXcd& data) {
  std::vector<double> out;
  for (double l : eigenvalues_of(data).eigs) out.push_back(std::sqrt(l));
  return out;
}

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("scalar model") {
    const auto spec = mp_spec(1, 1, 42);
    const auto x = draw_noise(spec, 0)(0, 0).real();
    const auto sample = sample_eigenvalues(spec, 0);
    REQUIRE(sample.eigs.size() == 1);
    CHECK(sample.eigs[0] == doctest::Approx(x * x).epsilon(1e-14));
  }

  TEST_CASE("MP eigenvalues stay in the slack box") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto sample = sample_eigenvalues(mp_spec(400, 1600, seed), 0);
      CHECK(sample.eigs.front() >= 0.10);
      CHECK(sample.eigs.back() <= 2.40);
    }
  }

  TEST_CASE("noise scaling by t") {
    auto one = mp_spec(50, 120, 8);
    auto four = one;
    four.t_profile = {{4.0, 1.0}};
    const auto a = sample_eigenvalues(one, 3);
    const auto b = sample_eigenvalues(four, 3);
    for (std::size_t i = 0; i < a.eigs.size(); ++i)
      CHECK(b.eigs[i] == doctest::Approx(4 * a.eigs[i]).epsilon(1e-10));
  }

  TEST_CASE("empirical stieltjes") {
    CHECK(std::abs(empirical_stieltjes(sample_of({1, 1}), 1i) - (0.5 + 0.5i)) < 1e-15);
    CHECK(std::abs(empirical_stieltjes(sample_of({0}), 1i) - 1i) < 1e-15);
    const std::vector<SpectralAtom> atoms{{0, 1, 1}};
    const auto limit = solve_primal(1.0 + 0.05i, 0.25, joint_spectrum_from_atoms(atoms));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto sample = sample_eigenvalues(mp_spec(800, 3200, seed), 0);
      CHECK(std::abs(empirical_stieltjes(sample, 1.0 + 0.05i) - limit.s) < 0.05);
    }
  }

  TEST_CASE("count in interval") {
    CHECK(count_in_interval(sample_of({0.1, 0.5, 3.0}), 1, 2) == 0);
    CHECK(count_in_interval(sample_of({1.5}), 1, 2) == 1);
    CHECK(count_in_interval(sample_of({1, 2}), 1, 2) == 2);
  }

  TEST_CASE("ks distance") {
    const std::vector<CdfPoint> ramp{{0, 0}, {1, 1}};
    const std::vector<CdfPoint> step{{0, 0}, {1, 0}, {1, 1}, {2, 1}};
    CHECK(ks_distance(sample_of({1}), step) == doctest::Approx(0.0));
    CHECK(ks_distance(sample_of({1}), ramp) == doctest::Approx(1.0));
    const int p = 100;
    std::vector<double> quantiles;
    for (int j = 1; j <= p; ++j) quantiles.push_back((j - 0.5) / p);
    CHECK(ks_distance(sample_of(quantiles), ramp) <= 1.0 / (2 * p) + 1e-12);
    const std::vector<CdfPoint> empty;
    CHECK_THROWS_AS(ks_distance(sample_of({1}), empty), Error);
  }

  TEST_CASE("interlacing") {
    const std::vector<double> full{2, 1}, minor{2};
    CHECK(interlaces(full, minor, 1e-9));
    const std::vector<double> bad_minor{3};
    CHECK_FALSE(interlaces(full, bad_minor, 1e-9));
    for (std::uint64_t t = 0; t < 10; ++t) CHECK(interlacing_check(mp_spec(20, 30, 1), t));
  }

  TEST_CASE("property: determinism") {
    auto spec = mp_spec(30, 60, 77);
    spec.entry_dist = EntryDist::GaussComplex;
    const auto a = sample_eigenvalues(spec, 5);
    const auto b = sample_eigenvalues(spec, 5);
    CHECK(a.eigs == b.eigs);
    const auto c = sample_eigenvalues(spec, 6);
    CHECK(a.eigs != c.eigs);
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  }

  TEST_CASE("property: nonnegativity and rank accounting") {
    auto spec = mp_spec(80, 50, 4);
    for (std::uint64_t t = 0; t < 5; ++t) {
      const auto sample = sample_eigenvalues(spec, t);
      REQUIRE(sample.eigs.size() == 80);
      int tiny = 0;
      for (double l : sample.eigs) {
        REQUIRE(l >= 0.0);
        tiny += l < 1e-10;
      }
      CHECK(tiny >= 30);
    }
    spec.u_profile = {{0.0, 0.5}, {3.0, 0.5}};
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.u_profile = {{3.0, 0.5}, {0.0, 0.5}};
    CHECK_NOTHROW(spec.validate());
  }

  TEST_CASE("property: singular values move by at most the perturbation norm") {
    auto spec = mp_spec(30, 45, 12);
    spec.u_profile = {{2.0, 0.5}, {0.0, 0.5}};
    spec.t_profile = {{1.0, 0.5}, {3.0, 0.5}};
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal;
    const double eps = 1e-6;
    const double max_root_t = std::sqrt(3.0);
    for (std::uint64_t t = 0; t < 10; ++t) {
      const auto noise = draw_noise(spec, t);
      Eigen::VectorXd a(spec.p), b(spec.n);
      for (auto& v : a) v = normal(rng);
      for (auto& v : b) v = normal(rng);
      const Eigen::MatrixXd e = eps * (a / a.norm()) * (b / b.norm()).transpose();
      const auto base = singular_values(data_matrix(spec, noise, t));
      const auto moved = singular_values(data_matrix(spec, noise + e.cast<cplx>(), t));
      const double bound = eps * max_root_t / std::sqrt(static_cast<double>(spec.n));
      for (std::size_t i = 0; i < base.size(); ++i)
        REQUIRE(std::abs(base[i] - moved[i]) <= bound * (1 + 1e-6) + 1e-13);
    }
  }

  TEST_CASE("property: entry moments") {
    for (auto dist : {EntryDist::GaussReal, EntryDist::GaussComplex, EntryDist::Rademacher}) {
      auto spec = mp_spec(1000, 1000, 2024);
      spec.entry_dist = dist;
      const auto x = draw_noise(spec, 0);
      const double count = static_cast<double>(x.size());
      const cplx mean = x.sum() / count;
      const double var = x.cwiseAbs2().sum() / count;
      const cplx second = x.array().square().sum() / count;
      CHECK(std::abs(mean) < 5e-3);
      CHECK(std::abs(var - 1.0) < 5e-3);
      if (dist == EntryDist::GaussComplex) CHECK(std::abs(second) < 5e-3);
      if (dist != EntryDist::GaussComplex) CHECK(x.imag().cwiseAbs().maxCoeff() == 0.0);

      const auto corner = double_array_corner(dist, 2024, 1000, 1000);
      CHECK(std::abs(corner.sum() / count) < 5e-3);
      CHECK(std::abs(corner.cwiseAbs2().sum() / count - 1.0) < 5e-3);
      if (dist == EntryDist::GaussComplex)
        CHECK(std::abs(corner.array().square().sum() / count) < 5e-3);
    }
  }

  TEST_CASE("double array corners are nested") {
    const auto big = double_array_corner(EntryDist::GaussReal, 9, 40, 70);
    const auto small = double_array_corner(EntryDist::GaussReal, 9, 20, 35);
    CHECK(big.topLeftCorner(20, 35) == small);
    CHECK(double_array_corner(EntryDist::GaussReal, 10, 20, 35) != small);
  }

  TEST_CASE("largest remainder") {
    const std::vector<double> halves{0.5, 0.5};
    CHECK(largest_remainder_counts(halves, 3) == std::vector<int>{2, 1});
    const std::vector<double> thirds{1.0 / 3, 1.0 / 3, 1.0 / 3};
    CHECK(largest_remainder_counts(thirds, 10) == std::vector<int>{4, 3, 3});
    const std::vector<double> uneven{0.7, 0.2, 0.1};
    CHECK(largest_remainder_counts(uneven, 7) == std::vector<int>{5, 1, 1});
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unit(0.01, 1.0);
    for (int k = 0; k < 200; ++k) {
      std::vector<double> w(1 + k % 6);
      for (auto& v : w) v = unit(rng);
      const auto counts = largest_remainder_counts(w, k);
      int total = 0;
      for (int c : counts) total += c;
      REQUIRE(total == k);
    }
  }

  TEST_CASE("induced spectrum follows the profiles") {
    EnsembleSpec spec = mp_spec(300, 3000, 0);
    spec.t_profile = {{1.0, 0.5}, {4.0, 0.5}};
    const auto h = spec.induced_spectrum();
    REQUIRE(h.size() == 2);
    CHECK(h.atoms()[0] == SpectralAtom{0, 1, 0.5});
    CHECK(h.atoms()[1] == SpectralAtom{0, 4, 0.5});
    const std::vector<SpectralAtom> atoms{{0, 1, 0.5}, {4, 1, 0.5}};
    const auto from = ensemble_from_spectrum(joint_spectrum_from_atoms(atoms), 300, 3000,
                                             EntryDist::Rademacher, 3);
    CHECK(from.induced_spectrum() == joint_spectrum_from_atoms(atoms));
  }

  TEST_CASE("rotated basis keeps the spectrum") {
    auto spec = mp_spec(40, 90, 31);
    spec.u_profile = {{0.0, 0.5}, {4.0, 0.5}};
    spec.t_profile = {{1.0, 0.5}, {2.0, 0.5}};
    auto rotated = spec;
    rotated.rotate_basis = true;
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(40, 90);
    const auto signal = data_matrix(rotated, zero, 0);
    const auto signal_eigs = eigenvalues_of(signal).eigs;
    CHECK((signal.array().abs() > 1e-12).count() > 20);
    CHECK(signal_eigs.back() == doctest::Approx(4.0));
    CHECK(signal_eigs.front() == doctest::Approx(0.0));
    const auto plain = sample_eigenvalues(spec, 0);
    const auto turned = sample_eigenvalues(rotated, 0);
    CHECK(plain.eigs != turned.eigs);
    // both realizations follow the same joint law, so their bulk means agree
    double m1 = 0, m2 = 0;
    for (double l : plain.eigs) m1 += l;
    for (double l : turned.eigs) m2 += l;
    CHECK(std::abs(m1 - m2) / m1 < 0.1);
  }

  TEST_CASE("entry distribution names") {
    CHECK(entry_dist_from_string("gauss_complex") == EntryDist::GaussComplex);
    CHECK(std::string(to_string(EntryDist::Rademacher)) == "rademacher");
    CHECK_THROWS_AS(entry_dist_from_string("cauchy"), Error);
  }

  TEST_CASE("samples csv") {
    const std::vector<EigenSample> samples{sample_of({0.5, 1.5}), sample_of({2.0})};
    CHECK(samples_to_csv(samples) == "trial,index,lambda\n0,0,0.5\n0,1,1.5\n1,0,2\n");
  }
}
