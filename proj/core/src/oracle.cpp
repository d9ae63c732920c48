#include "noisegap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "noisegap/error.hpp"
#include "parallel.hpp"

namespace noisegap {

void MpParams::validate() const {
  if (!(y > 0.0 && y <= 1.0))
    throw Error(ErrorKind::InvalidParameter, "Marchenko-Pastur oracle needs y in (0, 1]", y);
  if (!(sigma2 > 0.0))
    throw Error(ErrorKind::InvalidParameter, "sigma2 must be positive", sigma2);
}

std::pair<double, double> mp_support(const MpParams& mp) {
  mp.validate();
  const double root = std::sqrt(mp.y);
  return {mp.sigma2 * (1.0 - root) * (1.0 - root), mp.sigma2 * (1.0 + root) * (1.0 + root)};
}

double mp_density(double x, const MpParams& mp) {
  const auto [lo, hi] = mp_support(mp);
  if (!(x > lo && x < hi) || x <= 0.0) return 0.0;
  return std::sqrt((hi - x) * (x - lo)) / (2.0 * std::numbers::pi * mp.sigma2 * x * mp.y);
}

double dozier_consistency(cplx z, double y, double sigma2, std::span<const WeightedValue> u_atoms,
                          const SolverOptions& opts) {
  if (!(sigma2 > 0.0)) throw Error(ErrorKind::NonpositiveNoise, "sigma2 must be positive", sigma2);
  std::vector<SpectralAtom> atoms;
  for (const auto& [u, w] : u_atoms) atoms.push_back({u, sigma2, w});
  const auto h = joint_spectrum_from_atoms(atoms);
  const auto pair = solve_primal(z, y, h, opts);
  return std::abs(pair.g - sigma2 * pair.s);
}

Histogram averaged_esd_oracle(const EnsembleSpec& spec, int trials, int bins) {
  if (trials < 1 || bins < 1)
    throw Error(ErrorKind::InvalidParameter, "histogram needs trials >= 1 and bins >= 1");
  spec.validate();

  std::vector<EigenSample> samples(static_cast<std::size_t>(trials));
  detail::for_each_trial(samples.size(),
                         [&](std::size_t i) { samples[i] = sample_eigenvalues(spec, i); });

  double lo = samples.front().eigs.front();
  double hi = samples.front().eigs.back();
  std::size_t total = 0;
  for (const auto& s : samples) {
    lo = std::min(lo, s.eigs.front());
    hi = std::max(hi, s.eigs.back());
    total += s.eigs.size();
  }
  lo -= 0.05;
  hi += 0.05;

  Histogram hist;
  hist.edges.resize(bins + 1);
  hist.mass.assign(bins, 0.0);
  const double width = (hi - lo) / bins;
  for (int k = 0; k <= bins; ++k) hist.edges[k] = k == bins ? hi : lo + width * k;
  const double unit = 1.0 / static_cast<double>(total);
  for (const auto& s : samples) {
    for (double lambda : s.eigs) {
      auto k = static_cast<int>((lambda - lo) / width);
      hist.mass[std::clamp(k, 0, bins - 1)] += unit;
    }
  }
  return hist;
}

std::string histogram_to_csv(const Histogram& histogram) {
  std::ostringstream out;
  out << std::setprecision(17) << "bin_lo,bin_hi,mass\n";
  for (std::size_t k = 0; k < histogram.bins(); ++k)
    out << histogram.edges[k] << ',' << histogram.edges[k + 1] << ',' << histogram.mass[k] << '\n';
  return out.str();
}

}  // namespace noisegap
