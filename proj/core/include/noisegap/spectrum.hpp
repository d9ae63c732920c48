#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace noisegap {

/// One support point of the joint law H(u, t): an information eigenvalue u
/// (of RR*/n) paired with a noise variance t (of T), carrying weight w.
struct SpectralAtom {
  double u = 0.0;
  double t = 1.0;
  double w = 1.0;

  friend bool operator==(const SpectralAtom&, const SpectralAtom&) = default;
};

/// Finitely-atomic joint spectral law of (RR*/n, T).
///
/// Atoms keep first-occurrence order, identical (u, t) pairs are merged, and
/// the weights are stored so that summing them left to right gives exactly 1.
/// Instances are immutable after construction.
class JointSpectrum {
 public:
  const std::vector<SpectralAtom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  /// Sum of w / t, finite because every t > 0.
  double lambda_inv() const noexcept { return lambda_inv_; }
  double max_u() const noexcept;
  double max_t() const noexcept;

  /// Weighted moment sum of u^k t^m.
  double moment(int k, int m) const noexcept;

  friend bool operator==(const JointSpectrum&, const JointSpectrum&) = default;

 private:
  friend JointSpectrum joint_spectrum_from_atoms(std::span<const SpectralAtom>);
  friend JointSpectrum esd_pairs_from_model(std::span<const double>,
                                            std::span<const double>);
  explicit JointSpectrum(std::vector<SpectralAtom> atoms);

  std::vector<SpectralAtom> atoms_;
  double lambda_inv_ = 0.0;
};

/// Validates, deduplicates and (for input sums within 1e-9 of one)
/// renormalizes a list of atoms.
JointSpectrum joint_spectrum_from_atoms(std::span<const SpectralAtom> atoms);

double lambda_inv_moment(const JointSpectrum& spectrum) noexcept;

/// Builds H_n from index-paired eigenvalues, weight 1/p per index.
JointSpectrum esd_pairs_from_model(std::span<const double> u,
                                   std::span<const double> t);

/// Aspect ratio y = p/n, optionally pinned to concrete dimensions.
struct ModelParams {
  double y = 1.0;
  std::optional<int> p;
  std::optional<int> n;

  static ModelParams from_ratio(double y);
  static ModelParams from_dimensions(int p, int n);
  void validate() const;
};

/// JSON array of {"u","t","w"} objects.
std::string spectrum_to_json(const JointSpectrum& spectrum);
JointSpectrum spectrum_from_json(std::string_view text);

}  // namespace noisegap
