#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noisegap/density.hpp"
#include "noisegap/simulate.hpp"
#include "noisegap/solver.hpp"
#include "noisegap/spectrum.hpp"

namespace noisegap {

inline constexpr int kReportSchema = 1;

struct GridSettings {
  double lo = 0.05;
  double hi = 10.0;
  int points = 512;

  double step() const noexcept { return (hi - lo) / (points - 1); }
};

struct GapSettings {
  double f_threshold = 1e-3;
  int min_width_steps = 10;
  double margin_frac = 0.05;
  int probe_points = 16;
  // share of trials that must show no eigenvalue inside a certified gap
  double min_clean_fraction = 0.98;
};

struct EnsembleSettings {
  int p = 0;
  int n = 0;
  EntryDist entry_dist = EntryDist::GaussReal;
  std::uint64_t seed = 0;
  bool rotate_basis = false;
};

struct RateSettings {
  std::vector<int> n_list{200, 400, 800, 1600};
  double delta = 0.1;
  std::optional<double> x;  // defaults to the midpoint of the first certified gap
};

/// Everything one run of the harness needs. Mirrors the JSON config:
///   {"y", "atoms": [{"u","t","w"}], "grid": {"lo","hi","points"},
///    "solver": {"tol","max_iter","damping","v_start","v_factor","v_eval"},
///    "ensemble": {"p","n","entry_dist","seed"},
///    "gap": {"f_threshold","min_width_steps","margin_frac"}, "trials"}
/// plus optional "rate": {"n_list","delta","x"}.
struct ExperimentConfig {
  double y = 1.0;
  std::vector<SpectralAtom> atoms;
  GridSettings grid;
  SolverOptions solver;
  double v_eval = 1e-5;
  bool richardson = false;
  std::optional<EnsembleSettings> ensemble;
  GapSettings gap;
  int trials = 0;
  RateSettings rate;

  void validate() const;
  JointSpectrum spectrum() const;
  /// Requires an ensemble section; checks p/n == y.
  EnsembleSpec ensemble_spec() const;
};

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct LsdReport {
  DensityProfile profile;
  std::vector<CdfPoint> cdf;
  double total_mass = 0.0;
  std::vector<double> ks;  // per trial, empty when trials == 0
  std::optional<double> median_ks;
  double runtime_s = 0.0;
};

struct GapScan {
  DensityProfile profile;
  SupportGaps gaps;
  std::vector<GapCertificate> certificates;  // one per interior gap, same order
};

struct GapRecord {
  Gap gap;
  GapCertificate certificate;
  int trials = 0;
  int violations = 0;  // trials with at least one eigenvalue in [a, b]
  int max_count = 0;
  double clean_fraction = 0.0;
  bool pass = false;
};

struct GapReport {
  std::vector<GapRecord> gaps;  // interior gaps; uncertified ones carry trials = 0
  int trials = 0;
  std::uint64_t seed = 0;
  double min_clean_fraction = 0.0;
  double runtime_s = 0.0;

  bool all_certified_pass() const;
};

struct RateRow {
  int n = 0;
  int p = 0;
  double v_n = 0.0;
  double median_abs = 0.0;     // median |s_n - s0_n|
  double median_scaled = 0.0;  // n v_n median |s_n - s0_n|
};

struct RateReport {
  double x = 0.0;
  double delta = 0.0;
  bool x_in_certified_gap = false;
  int seeds = 0;
  std::vector<RateRow> rows;
  double runtime_s = 0.0;
};

LsdReport run_lsd_experiment(const ExperimentConfig& config);

/// Density grid, gap detection and certification of every interior gap.
GapScan run_gap_scan(const ExperimentConfig& config);

/// Counts eigenvalues of simulated B_n inside every certified gap.
/// Throws NoGapFound without interior gaps and CertificationFailed when none
/// of them certifies.
GapReport run_gap_experiment(const ExperimentConfig& config);

RateReport run_rate_experiment(const ExperimentConfig& config);

std::string to_json(const LsdReport& report, bool include_runtime = true);
std::string to_json(const GapScan& scan);
std::string to_json(const GapReport& report, bool include_runtime = true);
std::string to_json(const RateReport& report, bool include_runtime = true);

}  // namespace noisegap
