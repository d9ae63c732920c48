#include "noisegap/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "noisegap/error.hpp"

namespace noisegap {

namespace {

constexpr std::uint64_t kRotationStream = 0xD1B54A32D192ED03ULL;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_profile(const std::vector<WeightedValue>& profile, const char* name) {
  if (profile.empty())
    throw Error(ErrorKind::InvalidParameter, std::string(name) + " profile is empty");
  double total = 0.0;
  for (const auto& [value, weight] : profile) {
    if (!std::isfinite(value) || !(weight > 0.0))
      throw Error(ErrorKind::InvalidParameter,
                  std::string(name) + " profile needs finite values and positive weights");
    total += weight;
  }
  if (std::abs(total - 1.0) >= 1e-9)
    throw Error(ErrorKind::WeightSumInvalid, std::string(name) + " profile weights must sum to 1",
                total);
}

std::vector<double> expand(const std::vector<WeightedValue>& profile, int p) {
  std::vector<double> weights;
  for (const auto& entry : profile) weights.push_back(entry.second);
  const auto counts = largest_remainder_counts(weights, p);
  std::vector<double> values;
  values.reserve(p);
  for (std::size_t k = 0; k < profile.size(); ++k)
    values.insert(values.end(), counts[k], profile[k].first);
  return values;
}

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
Matrix<Scalar> fill_noise(const EnsembleSpec& spec, std::uint64_t trial_index) {
  std::mt19937_64 rng(derive_seed(spec.master_seed, trial_index));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const double half = std::sqrt(0.5);

  Matrix<Scalar> x(spec.p, spec.n);
  for (int i = 0; i < spec.p; ++i) {
    for (int j = 0; j < spec.n; ++j) {
      switch (spec.entry_dist) {
        case EntryDist::GaussReal:
          x(i, j) = Scalar(normal(rng));
          break;
        case EntryDist::Rademacher:
          x(i, j) = Scalar(coin(rng) ? 1.0 : -1.0);
          break;
        case EntryDist::GaussComplex: {
          const double re = normal(rng) * half;
          const double im = normal(rng) * half;
          if constexpr (std::is_same_v<Scalar, double>) {
            x(i, j) = re;  // unreachable: complex draws use the complex path
          } else {
            x(i, j) = Scalar(re, im);
          }
          break;
        }
      }
    }
  }
  return x;
}

Eigen::MatrixXd random_orthogonal(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  // sign fix makes Q Haar distributed
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < size; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

template <class Scalar>
Matrix<Scalar> build_data(const EnsembleSpec& spec, const Matrix<Scalar>& noise,
                          std::uint64_t trial_index) {
  const auto slots = spec.slots();
  const double root_n = std::sqrt(static_cast<double>(spec.n));
  Eigen::VectorXd sqrt_t(spec.p);
  Matrix<Scalar> signal = Matrix<Scalar>::Zero(spec.p, spec.n);
  for (int i = 0; i < spec.p; ++i) {
    sqrt_t(i) = std::sqrt(slots[i].second);
    if (i < spec.n) signal(i, i) = Scalar(std::sqrt(spec.n * slots[i].first));
  }

  Matrix<Scalar> data;
  if (!spec.rotate_basis) {
    data = signal + sqrt_t.asDiagonal() * noise;
  } else {
    const Eigen::MatrixXd q =
        random_orthogonal(spec.p, derive_seed(spec.master_seed ^ kRotationStream, trial_index));
    const Eigen::MatrixXd root_cov = q * sqrt_t.asDiagonal() * q.transpose();
    data = q.cast<Scalar>() * signal + root_cov.cast<Scalar>() * noise;
  }
  return data / root_n;
}

template <class Scalar>
EigenSample squared_singular_values(const Matrix<Scalar>& data) {
  Eigen::BDCSVD<Matrix<Scalar>> svd(data);
  if (svd.info() != Eigen::Success)
    throw Error(ErrorKind::DecompositionFailure, "singular value decomposition failed");
  const auto& sigma = svd.singularValues();
  EigenSample sample;
  sample.eigs.assign(static_cast<std::size_t>(data.rows()), 0.0);
  for (Eigen::Index k = 0; k < sigma.size(); ++k) sample.eigs[k] = sigma(k) * sigma(k);
  for (auto& e : sample.eigs) {
    if (e < 0.0) {
      e = 0.0;
      ++sample.clamped;
    }
  }
  std::sort(sample.eigs.begin(), sample.eigs.end());
  return sample;
}

}  // namespace

const char* to_string(EntryDist dist) noexcept {
  switch (dist) {
    case EntryDist::GaussReal: return "gauss_real";
    case EntryDist::GaussComplex: return "gauss_complex";
    case EntryDist::Rademacher: return "rademacher";
  }
  return "unknown";
}

EntryDist entry_dist_from_string(std::string_view name) {
  if (name == "gauss_real") return EntryDist::GaussReal;
  if (name == "gauss_complex") return EntryDist::GaussComplex;
  if (name == "rademacher") return EntryDist::Rademacher;
  throw Error(ErrorKind::InvalidConfig, "unknown entry distribution '" + std::string(name) + "'");
}

void EnsembleSpec::validate() const {
  if (p <= 0 || n <= 0) throw Error(ErrorKind::InvalidParameter, "p and n must be positive");
  check_profile(u_profile, "u");
  check_profile(t_profile, "t");
  for (const auto& [u, w] : u_profile)
    if (u < 0.0) throw Error(ErrorKind::NegativeInformation, "u must be nonnegative", u);
  for (const auto& [t, w] : t_profile)
    if (t <= 0.0) throw Error(ErrorKind::NonpositiveNoise, "t must be positive", t);
  if (p > n) {
    const auto u = expand(u_profile, p);
    for (int i = n; i < p; ++i)
      if (u[i] != 0.0)
        throw Error(ErrorKind::InvalidParameter,
                    "information slots beyond index n must be zero when p > n", u[i]);
  }
}

std::vector<std::pair<double, double>> EnsembleSpec::slots() const {
  validate();
  const auto u = expand(u_profile, p);
  const auto t = expand(t_profile, p);
  std::vector<std::pair<double, double>> out(p);
  for (int i = 0; i < p; ++i) out[i] = {u[i], t[i]};
  return out;
}

JointSpectrum EnsembleSpec::induced_spectrum() const {
  const auto pairs = slots();
  std::vector<double> u, t;
  for (const auto& [ui, ti] : pairs) {
    u.push_back(ui);
    t.push_back(ti);
  }
  return esd_pairs_from_model(u, t);
}

EnsembleSpec ensemble_from_spectrum(const JointSpectrum& h, int p, int n, EntryDist dist,
                                    std::uint64_t master_seed) {
  EnsembleSpec spec;
  spec.p = p;
  spec.n = n;
  spec.entry_dist = dist;
  spec.master_seed = master_seed;
  spec.u_profile.clear();
  spec.t_profile.clear();
  for (const auto& atom : h.atoms()) {
    spec.u_profile.emplace_back(atom.u, atom.w);
    spec.t_profile.emplace_back(atom.t, atom.w);
  }
  spec.validate();
  return spec;
}

std::vector<int> largest_remainder_counts(std::span<const double> weights, int total) {
  if (weights.empty() || total < 0)
    throw Error(ErrorKind::InvalidParameter, "apportionment needs weights and a nonnegative total");
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<int> counts(weights.size());
  std::vector<double> remainder(weights.size());
  int assigned = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double quota = total * weights[k] / sum;
    counts[k] = static_cast<int>(std::floor(quota));
    remainder[k] = quota - counts[k];
    assigned += counts[k];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return remainder[l] > remainder[r]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[order[k % order.size()]];
  return counts;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial_index) noexcept {
  return splitmix64(master_seed ^ splitmix64(trial_index));
}

Eigen::MatrixXcd draw_noise(const EnsembleSpec& spec, std::uint64_t trial_index) {
  spec.validate();
  return fill_noise<std::complex<double>>(spec, trial_index);
}

Eigen::MatrixXcd double_array_corner(EntryDist dist, std::uint64_t seed, int rows, int cols) {
  if (rows < 1 || cols < 1)
    throw Error(ErrorKind::InvalidParameter, "double array corner needs positive dimensions");
  constexpr double kUnit = 0x1.0p-53;
  auto uniform = [](std::uint64_t bits) { return ((bits >> 11) + 0.5) * kUnit; };
  Eigen::MatrixXcd corner(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const std::uint64_t row_key = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i)));
    for (int j = 0; j < cols; ++j) {
      const std::uint64_t key = splitmix64(row_key + static_cast<std::uint64_t>(j));
      if (dist == EntryDist::Rademacher) {
        corner(i, j) = (key >> 63) ? 1.0 : -1.0;
        continue;
      }
      // Box-Muller on two uniforms gives two independent standard normals
      const double radius = std::sqrt(-2.0 * std::log(uniform(key)));
      const double angle = 2.0 * std::numbers::pi * uniform(splitmix64(key));
      if (dist == EntryDist::GaussReal)
        corner(i, j) = radius * std::cos(angle);
      else
        corner(i, j) = std::complex<double>(radius * std::cos(angle), radius * std::sin(angle)) *
                       std::sqrt(0.5);
    }
  }
  return corner;
}

Eigen::MatrixXcd data_matrix(const EnsembleSpec& spec, const Eigen::MatrixXcd& noise,
                             std::uint64_t trial_index) {
  if (noise.rows() != spec.p || noise.cols() != spec.n)
    throw Error(ErrorKind::LengthMismatch, "noise matrix must be p x n");
  return build_data<std::complex<double>>(spec, noise, trial_index);
}

EigenSample sample_eigenvalues(const EnsembleSpec& spec, std::uint64_t trial_index) {
  spec.validate();
  if (spec.entry_dist == EntryDist::GaussComplex) {
    const auto noise = fill_noise<std::complex<double>>(spec, trial_index);
    return squared_singular_values<std::complex<double>>(build_data(spec, noise, trial_index));
  }
  const auto noise = fill_noise<double>(spec, trial_index);
  return squared_singular_values<double>(build_data(spec, noise, trial_index));
}

EigenSample eigenvalues_of(const Eigen::MatrixXcd& data) {
  return squared_singular_values<std::complex<double>>(data);
}

std::complex<double> empirical_stieltjes(const EigenSample& sample, std::complex<double> z) {
  std::complex<double> total = 0.0;
  for (double lambda : sample.eigs) total += 1.0 / (lambda - z);
  return total / static_cast<double>(sample.eigs.size());
}

std::size_t count_in_interval(const EigenSample& sample, double a, double b) {
  return static_cast<std::size_t>(std::count_if(sample.eigs.begin(), sample.eigs.end(),
                                                [&](double l) { return a <= l && l <= b; }));
}

double ks_distance(const EigenSample& sample, std::span<const CdfPoint> cdf) {
  if (cdf.empty()) throw Error(ErrorKind::EmptyCdf, "reference CDF has no points");
  if (sample.eigs.empty()) throw Error(ErrorKind::EmptyCdf, "sample has no eigenvalues");

  // Right (left) limit of the interpolated reference; they differ only where
  // the CDF repeats an abscissa to encode a jump.
  auto reference = [&](double x, bool left) {
    if (x < cdf.front().x || (left && x == cdf.front().x)) return cdf.front().F;
    if (x > cdf.back().x || (!left && x == cdf.back().x)) return cdf.back().F;
    const auto hi = left ? std::lower_bound(cdf.begin(), cdf.end(), x,
                                            [](const CdfPoint& p, double v) { return p.x < v; })
                         : std::upper_bound(cdf.begin(), cdf.end(), x,
                                            [](double v, const CdfPoint& p) { return v < p.x; });
    const auto lo = hi - 1;
    const double span = hi->x - lo->x;
    if (span <= 0.0) return left ? lo->F : hi->F;
    return lo->F + (hi->F - lo->F) * (x - lo->x) / span;
  };

  std::vector<double> eigs = sample.eigs;
  std::sort(eigs.begin(), eigs.end());
  const double p = static_cast<double>(eigs.size());
  double worst = 0.0;
  for (std::size_t j = 0; j < eigs.size(); ++j) {
    worst = std::max({worst, std::abs((j + 1) / p - reference(eigs[j], false)),
                      std::abs(j / p - reference(eigs[j], true))});
  }
  return worst;
}

bool interlaces(std::span<const double> full_desc, std::span<const double> minor_desc,
                double slack) {
  if (full_desc.size() != minor_desc.size() + 1) return false;
  for (std::size_t k = 0; k < minor_desc.size(); ++k) {
    if (minor_desc[k] > full_desc[k] + slack) return false;
    if (minor_desc[k] < full_desc[k + 1] - slack) return false;
  }
  return true;
}

bool interlacing_check(const EnsembleSpec& spec, std::uint64_t trial_index, double slack) {
  if (spec.n < 2) throw Error(ErrorKind::InvalidParameter, "interlacing needs n >= 2");
  const auto data = data_matrix(spec, draw_noise(spec, trial_index), trial_index);
  const Eigen::MatrixXcd companion = data.adjoint() * data;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> full(companion, Eigen::EigenvaluesOnly);
  const Eigen::Index m = companion.rows() - 1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> minor(companion.topLeftCorner(m, m),
                                                        Eigen::EigenvaluesOnly);
  if (full.info() != Eigen::Success || minor.info() != Eigen::Success)
    throw Error(ErrorKind::DecompositionFailure, "Hermitian eigensolver failed");

  std::vector<double> a(full.eigenvalues().data(), full.eigenvalues().data() + m + 1);
  std::vector<double> c(minor.eigenvalues().data(), minor.eigenvalues().data() + m);
  std::sort(a.rbegin(), a.rend());
  std::sort(c.rbegin(), c.rend());
  return interlaces(a, c, slack * std::max(1.0, std::abs(a.front())));
}

std::string samples_to_csv(std::span<const EigenSample> samples) {
  std::ostringstream out;
  out << std::setprecision(17) << "trial,index,lambda\n";
  for (std::size_t trial = 0; trial < samples.size(); ++trial)
    for (std::size_t i = 0; i < samples[trial].eigs.size(); ++i)
      out << trial << ',' << i << ',' << samples[trial].eigs[i] << '\n';
  return out.str();
}

}  // namespace noisegap
