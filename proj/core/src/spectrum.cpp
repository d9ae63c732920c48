#include "noisegap/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "noisegap/error.hpp"

namespace noisegap {

namespace {

constexpr double kRenormalizeTolerance = 1e-9;

void check_atom(const SpectralAtom& atom) {
  if (!std::isfinite(atom.u) || !std::isfinite(atom.t) || !std::isfinite(atom.w))
    throw Error(ErrorKind::InvalidParameter, "spectral atom has a non-finite field");
  if (atom.t <= 0.0)
    throw Error(ErrorKind::NonpositiveNoise, "noise eigenvalue t must be positive", atom.t);
  if (atom.u < 0.0)
    throw Error(ErrorKind::NegativeInformation, "information eigenvalue u must be nonnegative",
                atom.u);
  if (atom.w <= 0.0 || atom.w > 1.0)
    throw Error(ErrorKind::InvalidWeight, "atom weight must lie in (0, 1]", atom.w);
}

std::vector<SpectralAtom> merge_duplicates(std::span<const SpectralAtom> atoms) {
  std::vector<SpectralAtom> merged;
  merged.reserve(atoms.size());
  for (const auto& atom : atoms) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const SpectralAtom& m) {
      return m.u == atom.u && m.t == atom.t;
    });
    if (it == merged.end())
      merged.push_back(atom);
    else
      it->w += atom.w;
  }
  return merged;
}

double sequential_sum(const std::vector<SpectralAtom>& atoms) {
  double total = 0.0;
  for (const auto& a : atoms) total += a.w;
  return total;
}

// Scale to unit mass and put the rounding remainder on the last atom, which
// makes the left-to-right weight sum exactly 1.
void normalize(std::vector<SpectralAtom>& atoms) {
  const double total = sequential_sum(atoms);
  for (auto& a : atoms) a.w /= total;
  if (atoms.size() < 2) {
    atoms.front().w = 1.0;
    return;
  }
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) head += atoms[i].w;
  const double last = 1.0 - head;
  if (last > 0.0) atoms.back().w = last;
}

}  // namespace

JointSpectrum::JointSpectrum(std::vector<SpectralAtom> atoms) : atoms_(std::move(atoms)) {
  for (const auto& a : atoms_) lambda_inv_ += a.w / a.t;
}

double JointSpectrum::max_u() const noexcept {
  double m = 0.0;
  for (const auto& a : atoms_) m = std::max(m, a.u);
  return m;
}

double JointSpectrum::max_t() const noexcept {
  double m = 0.0;
  for (const auto& a : atoms_) m = std::max(m, a.t);
  return m;
}

double JointSpectrum::moment(int k, int m) const noexcept {
  double total = 0.0;
  for (const auto& a : atoms_) total += a.w * std::pow(a.u, k) * std::pow(a.t, m);
  return total;
}

JointSpectrum joint_spectrum_from_atoms(std::span<const SpectralAtom> atoms) {
  if (atoms.empty()) throw Error(ErrorKind::EmptySpectrum, "spectrum needs at least one atom");
  double total = 0.0;
  for (const auto& atom : atoms) {
    check_atom(atom);
    total += atom.w;
  }
  if (std::abs(total - 1.0) >= kRenormalizeTolerance)
    throw Error(ErrorKind::WeightSumInvalid, "atom weights must sum to 1", total);

  auto merged = merge_duplicates(atoms);
  normalize(merged);
  return JointSpectrum(std::move(merged));
}

double lambda_inv_moment(const JointSpectrum& spectrum) noexcept {
  return spectrum.lambda_inv();
}

JointSpectrum esd_pairs_from_model(std::span<const double> u, std::span<const double> t) {
  if (u.size() != t.size())
    throw Error(ErrorKind::LengthMismatch, "u and t lists must have equal length");
  if (u.empty()) throw Error(ErrorKind::EmptySpectrum, "model has no eigenvalues");

  const double p = static_cast<double>(u.size());
  std::vector<SpectralAtom> atoms;
  atoms.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    SpectralAtom atom{u[i], t[i], 1.0 / p};
    if (!std::isfinite(atom.u) || !std::isfinite(atom.t))
      throw Error(ErrorKind::InvalidParameter, "model eigenvalue is not finite");
    if (atom.t <= 0.0)
      throw Error(ErrorKind::NonpositiveNoise, "noise eigenvalue t must be positive", atom.t);
    if (atom.u < 0.0)
      throw Error(ErrorKind::NegativeInformation, "information eigenvalue u must be nonnegative",
                  atom.u);
    atoms.push_back(atom);
  }
  auto merged = merge_duplicates(atoms);
  normalize(merged);
  return JointSpectrum(std::move(merged));
}

ModelParams ModelParams::from_ratio(double y) {
  ModelParams params{y, std::nullopt, std::nullopt};
  params.validate();
  return params;
}

ModelParams ModelParams::from_dimensions(int p, int n) {
  if (p <= 0 || n <= 0)
    throw Error(ErrorKind::InvalidParameter, "dimensions p and n must be positive");
  ModelParams params{static_cast<double>(p) / static_cast<double>(n), p, n};
  params.validate();
  return params;
}

void ModelParams::validate() const {
  if (!(y > 0.0) || !std::isfinite(y))
    throw Error(ErrorKind::InvalidParameter, "aspect ratio y must be positive", y);
  if (p.has_value() != n.has_value())
    throw Error(ErrorKind::InvalidParameter, "p and n must be given together");
  if (p) {
    if (*p <= 0 || *n <= 0)
      throw Error(ErrorKind::InvalidParameter, "dimensions p and n must be positive");
    if (static_cast<double>(*p) / static_cast<double>(*n) != y)
      throw Error(ErrorKind::InvalidParameter, "p/n does not equal y", y);
  }
}

std::string spectrum_to_json(const JointSpectrum& spectrum) {
  auto out = nlohmann::json::array();
  for (const auto& a : spectrum.atoms()) out.push_back({{"u", a.u}, {"t", a.t}, {"w", a.w}});
  return out.dump();
}

JointSpectrum spectrum_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("malformed spectrum JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::InvalidConfig, "spectrum JSON must be an array");
  std::vector<SpectralAtom> atoms;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("u") || !item.contains("t") || !item.contains("w") ||
        !item["u"].is_number() || !item["t"].is_number() || !item["w"].is_number())
      throw Error(ErrorKind::InvalidConfig, "spectrum atom needs numeric u, t, w");
    atoms.push_back({item["u"].get<double>(), item["t"].get<double>(), item["w"].get<double>()});
  }
  return joint_spectrum_from_atoms(atoms);
}

}  // namespace noisegap
