#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "noisegap/density.hpp"
#include "noisegap/spectrum.hpp"

namespace noisegap {

enum class EntryDist { GaussReal, GaussComplex, Rademacher };

const char* to_string(EntryDist dist) noexcept;
EntryDist entry_dist_from_string(std::string_view name);

/// (value, weight) pair of a one-dimensional profile.
using WeightedValue = std::pair<double, double>;

/// Recipe for one random realization of B_n = n^{-1}(R + T^{1/2}X)(R + T^{1/2}X)*.
///
/// Both profiles are expanded to exactly p slots by largest-remainder rounding
/// and paired index by index. R is diag(sqrt(n u_i)) padded with zero columns,
/// T = diag(t_i), so RR*/n and T commute by construction. With rotate_basis a
/// shared random orthogonal change of basis makes both non-diagonal without
/// changing the joint spectrum.
struct EnsembleSpec {
  int p = 1;
  int n = 1;
  EntryDist entry_dist = EntryDist::GaussReal;
  std::vector<WeightedValue> u_profile{{0.0, 1.0}};
  std::vector<WeightedValue> t_profile{{1.0, 1.0}};
  std::uint64_t master_seed = 0;
  bool rotate_basis = false;

  void validate() const;

  /// Index-paired (u_i, t_i), length p.
  std::vector<std::pair<double, double>> slots() const;

  /// Joint spectrum H_n induced by the slots.
  JointSpectrum induced_spectrum() const;
};

/// Spec whose slots reproduce the atoms of h (up to largest-remainder rounding).
EnsembleSpec ensemble_from_spectrum(const JointSpectrum& h, int p, int n, EntryDist dist,
                                    std::uint64_t master_seed);

/// Largest-remainder apportionment of `total` slots to the given weights.
/// Ties go to the earlier entry.
std::vector<int> largest_remainder_counts(std::span<const double> weights, int total);

/// Stable 64-bit mix of (master_seed, trial_index), splitmix64 based.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial_index) noexcept;

struct EigenSample {
  std::vector<double> eigs;  // ascending, length p
  int clamped = 0;           // values below zero that were clamped
};

/// Noise matrix X of a trial; real distributions leave the imaginary part zero.
Eigen::MatrixXcd draw_noise(const EnsembleSpec& spec, std::uint64_t trial_index);

/// Upper-left rows x cols corner of an infinite double array of standardized
/// entries. Entry (i, j) depends only on (seed, i, j), so corners of different
/// sizes drawn from one seed are nested.
Eigen::MatrixXcd double_array_corner(EntryDist dist, std::uint64_t seed, int rows, int cols);

/// n^{-1/2}(R + T^{1/2} X) for a given noise matrix.
Eigen::MatrixXcd data_matrix(const EnsembleSpec& spec, const Eigen::MatrixXcd& noise,
                             std::uint64_t trial_index);

/// Eigenvalues of B_n as squared singular values of n^{-1/2}(R + T^{1/2}X).
EigenSample sample_eigenvalues(const EnsembleSpec& spec, std::uint64_t trial_index);

/// Squared singular values of an arbitrary data matrix, padded with zeros to
/// its row count and sorted ascending.
EigenSample eigenvalues_of(const Eigen::MatrixXcd& data);

std::complex<double> empirical_stieltjes(const EigenSample& sample, std::complex<double> z);

/// Number of eigenvalues in the closed interval [a, b].
std::size_t count_in_interval(const EigenSample& sample, double a, double b);

/// Kolmogorov distance between the sample ESD and a piecewise-linear CDF.
double ks_distance(const EigenSample& sample, std::span<const CdfPoint> cdf);

/// Cauchy interlacing between the eigenvalues (descending) of a Hermitian
/// matrix and of its leading principal submatrix of one order less.
bool interlaces(std::span<const double> full_desc, std::span<const double> minor_desc,
                double slack);

/// Interlacing of the companion matrix n^{-1}(R + T^{1/2}X)*(R + T^{1/2}X)
/// against itself with its last row and column removed.
bool interlacing_check(const EnsembleSpec& spec, std::uint64_t trial_index,
                       double slack = 1e-9);

/// CSV `trial,index,lambda` for a batch of samples.
std::string samples_to_csv(std::span<const EigenSample> samples);

}  // namespace noisegap
