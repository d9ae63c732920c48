// noisegap command-line harness.
//
//   noisegap lsd        --config cfg.json --out report.json   density, CDF, KS per trial
//   noisegap gaps       --config cfg.json --out report.json   detected and certified gaps
//   noisegap verify-gap --config cfg.json --out report.json   eigenvalue counts in gaps
//   noisegap rate       --config cfg.json --out report.json   convergence-rate table
//
// Exit codes: 0 success, 2 validation error, 3 solver failure, 4 no gap found.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "noisegap/error.hpp"
#include "noisegap/experiment.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNoGap = 4;

struct CommonArgs {
  std::string config;
  std::string out;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "Experiment config (JSON)")->required();
  cmd->add_option("--out", args.out, "Report path (JSON)")->required();
  cmd->add_option("--trials", args.trials, "Override the number of trials");
  cmd->add_option("--seed", args.seed, "Override the ensemble master seed");
}

noisegap::ExperimentConfig load(const CommonArgs& args) {
  auto config = noisegap::load_config(args.config);
  if (args.trials) {
    if (*args.trials < 0)
      throw noisegap::Error(noisegap::ErrorKind::InvalidConfig, "--trials must be nonnegative");
    config.trials = *args.trials;
  }
  if (args.seed && config.ensemble) config.ensemble->seed = *args.seed;
  return config;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out)
    throw noisegap::Error(noisegap::ErrorKind::InvalidConfig, "cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

std::filesystem::path side_file(const std::string& out, const std::string& suffix) {
  std::filesystem::path path(out);
  return path.parent_path() / (path.stem().string() + suffix);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limiting spectra and spectral gaps of information-plus-noise matrices"};
  app.require_subcommand(1);

  CommonArgs lsd_args, gaps_args, verify_args, rate_args;
  auto* lsd = app.add_subcommand("lsd", "Density, CDF and per-trial KS distances");
  auto* gaps = app.add_subcommand("gaps", "Detect and certify support gaps");
  auto* verify = app.add_subcommand("verify-gap", "Count sample eigenvalues in certified gaps");
  auto* rate = app.add_subcommand("rate", "Scaled Stieltjes-transform deviation across n");
  add_common(lsd, lsd_args);
  add_common(gaps, gaps_args);
  add_common(verify, verify_args);
  add_common(rate, rate_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (lsd->parsed()) {
      const auto config = load(lsd_args);
      const auto report = noisegap::run_lsd_experiment(config);
      write_file(side_file(lsd_args.out, "_density.csv"), noisegap::profile_to_csv(report.profile));
      write_file(side_file(lsd_args.out, "_cdf.csv"), noisegap::cdf_to_csv(report.cdf));
      write_file(lsd_args.out, noisegap::to_json(report));
    } else if (gaps->parsed()) {
      const auto config = load(gaps_args);
      const auto scan = noisegap::run_gap_scan(config);
      write_file(side_file(gaps_args.out, "_density.csv"), noisegap::profile_to_csv(scan.profile));
      write_file(gaps_args.out, noisegap::to_json(scan));
    } else if (verify->parsed()) {
      const auto config = load(verify_args);
      write_file(verify_args.out, noisegap::to_json(noisegap::run_gap_experiment(config)));
    } else if (rate->parsed()) {
      const auto config = load(rate_args);
      write_file(rate_args.out, noisegap::to_json(noisegap::run_rate_experiment(config)));
    }
  } catch (const noisegap::Error& e) {
    std::cerr << "noisegap: " << e.what() << '\n';
    switch (noisegap::classify(e.kind())) {
      case noisegap::ErrorClass::Validation: return kExitValidation;
      case noisegap::ErrorClass::Numerical: return kExitNumerical;
      case noisegap::ErrorClass::NoGap: return kExitNoGap;
    }
  } catch (const std::exception& e) {
    std::cerr << "noisegap: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
