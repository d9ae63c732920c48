#include "noisegap/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "noisegap/error.hpp"
#include "parallel.hpp"

namespace noisegap {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorKind::InvalidConfig, message);
}

const json& require(const json& node, const char* key) {
  if (!node.is_object() || !node.contains(key))
    config_error(std::string("missing required field '") + key + "'");
  return node.at(key);
}

double number(const json& node, const char* key) {
  const auto& v = require(node, key);
  if (!v.is_number()) config_error(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

long long integer(const json& node, const char* key) {
  const auto& v = require(node, key);
  if (!v.is_number_integer()) config_error(std::string("field '") + key + "' must be an integer");
  return v.get<long long>();
}

template <class T>
void optional_field(const json& node, const char* key, T& out) {
  if (!node.is_object() || !node.contains(key)) return;
  const auto& v = node.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) config_error(std::string("field '") + key + "' must be a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) config_error(std::string("field '") + key + "' must be an integer");
    out = v.get<T>();
  } else {
    if (!v.is_number()) config_error(std::string("field '") + key + "' must be a number");
    out = v.get<T>();
  }
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json certificate_json(const GapCertificate& c) {
  return {{"a", c.a},
          {"b", c.b},
          {"delta_min", c.delta_min},
          {"slope_min", c.slope_min},
          {"monotone", c.monotone},
          {"max_im", c.max_im},
          {"im_bound", c.im_bound},
          {"valid", c.valid()}};
}

json gap_json(const Gap& g) {
  return {{"c", g.c}, {"a", g.a}, {"b", g.b}, {"d", g.d}, {"exterior", g.exterior}};
}

}  // namespace

void ExperimentConfig::validate() const {
  ModelParams::from_ratio(y);
  spectrum();
  solver.validate();
  if (!(grid.lo > 0.0) || !(grid.hi > grid.lo))
    config_error("grid needs 0 < lo < hi");
  if (grid.points < 3) config_error("grid needs at least three points");
  if (!(v_eval > 0.0)) config_error("solver.v_eval must be positive");
  if (!(gap.f_threshold > 0.0)) config_error("gap.f_threshold must be positive");
  if (gap.min_width_steps < 1) config_error("gap.min_width_steps must be at least 1");
  if (!(gap.margin_frac > 0.0 && gap.margin_frac < 0.5))
    config_error("gap.margin_frac must lie in (0, 0.5)");
  if (gap.probe_points < 3) config_error("gap.probe_points must be at least 3");
  if (!(gap.min_clean_fraction >= 0.0 && gap.min_clean_fraction <= 1.0))
    config_error("gap.min_clean_fraction must lie in [0, 1]");
  if (trials < 0) config_error("trials must be nonnegative");
  if (!(rate.delta > 0.0)) config_error("rate.delta must be positive");
  if (rate.n_list.empty()) config_error("rate.n_list must not be empty");
  for (std::size_t i = 0; i < rate.n_list.size(); ++i) {
    if (rate.n_list[i] < 1) config_error("rate.n_list entries must be positive");
    if (i > 0 && rate.n_list[i] <= rate.n_list[i - 1])
      config_error("rate.n_list must be strictly increasing");
  }
  if (ensemble) ensemble_spec();
}

JointSpectrum ExperimentConfig::spectrum() const { return joint_spectrum_from_atoms(atoms); }

EnsembleSpec ExperimentConfig::ensemble_spec() const {
  if (!ensemble) config_error("this experiment needs an 'ensemble' section");
  ModelParams::from_ratio(y);
  const ModelParams dims{y, ensemble->p, ensemble->n};
  try {
    dims.validate();
  } catch (const Error& e) {
    config_error(std::string("ensemble dimensions: ") + e.what());
  }
  auto spec = ensemble_from_spectrum(spectrum(), ensemble->p, ensemble->n, ensemble->entry_dist,
                                     ensemble->seed);
  spec.rotate_basis = ensemble->rotate_basis;
  return spec;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("config must be a JSON object");

  ExperimentConfig config;
  config.y = number(doc, "y");

  const auto& atoms = require(doc, "atoms");
  if (!atoms.is_array()) config_error("'atoms' must be an array");
  for (const auto& atom : atoms)
    config.atoms.push_back({number(atom, "u"), number(atom, "t"), number(atom, "w")});

  const auto& grid = require(doc, "grid");
  config.grid.lo = number(grid, "lo");
  config.grid.hi = number(grid, "hi");
  config.grid.points = static_cast<int>(integer(grid, "points"));

  if (doc.contains("solver")) {
    const auto& s = doc["solver"];
    optional_field(s, "tol", config.solver.tol);
    optional_field(s, "max_iter", config.solver.max_iter);
    optional_field(s, "damping", config.solver.damping_init);
    optional_field(s, "v_start", config.solver.v_start);
    optional_field(s, "v_factor", config.solver.v_factor);
    optional_field(s, "v_eval", config.v_eval);
    optional_field(s, "richardson", config.richardson);
  }

  if (doc.contains("ensemble")) {
    const auto& e = doc["ensemble"];
    EnsembleSettings ensemble;
    ensemble.p = static_cast<int>(integer(e, "p"));
    ensemble.n = static_cast<int>(integer(e, "n"));
    if (e.contains("entry_dist")) {
      if (!e["entry_dist"].is_string()) config_error("'entry_dist' must be a string");
      ensemble.entry_dist = entry_dist_from_string(e["entry_dist"].get<std::string>());
    }
    if (e.contains("seed")) {
      if (!e["seed"].is_number_unsigned()) config_error("'seed' must be a nonnegative integer");
      ensemble.seed = e["seed"].get<std::uint64_t>();
    }
    optional_field(e, "rotate_basis", ensemble.rotate_basis);
    config.ensemble = ensemble;
  }

  if (doc.contains("gap")) {
    const auto& g = doc["gap"];
    optional_field(g, "f_threshold", config.gap.f_threshold);
    optional_field(g, "min_width_steps", config.gap.min_width_steps);
    optional_field(g, "margin_frac", config.gap.margin_frac);
    optional_field(g, "probe_points", config.gap.probe_points);
    optional_field(g, "min_clean_fraction", config.gap.min_clean_fraction);
  }

  if (doc.contains("trials")) config.trials = static_cast<int>(integer(doc, "trials"));

  if (doc.contains("rate")) {
    const auto& r = doc["rate"];
    if (r.contains("n_list")) {
      if (!r["n_list"].is_array()) config_error("'rate.n_list' must be an array");
      config.rate.n_list.clear();
      for (const auto& v : r["n_list"]) {
        if (!v.is_number_integer()) config_error("'rate.n_list' entries must be integers");
        config.rate.n_list.push_back(v.get<int>());
      }
    }
    optional_field(r, "delta", config.rate.delta);
    if (r.contains("x")) config.rate.x = number(r, "x");
  }

  try {
    config.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidConfig) throw;
    config_error(e.what());
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

bool GapReport::all_certified_pass() const {
  bool any = false;
  for (const auto& g : gaps) {
    if (!g.certificate.valid()) continue;
    any = true;
    if (!g.pass) return false;
  }
  return any;
}

LsdReport run_lsd_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto h = config.spectrum();

  LsdReport report;
  report.profile = density_grid(config.grid.lo, config.grid.hi, config.grid.points, config.y, h,
                                config.solver, config.v_eval, config.richardson);
  report.cdf = cdf(report.profile);
  report.total_mass = report.cdf.back().F;

  if (config.trials > 0) {
    const auto spec = config.ensemble_spec();
    report.ks.resize(config.trials);
    detail::for_each_trial(report.ks.size(), [&](std::size_t t) {
      report.ks[t] = ks_distance(sample_eigenvalues(spec, t), report.cdf);
    });
    report.median_ks = median(report.ks);
  }
  report.runtime_s = seconds_since(start);
  return report;
}

GapScan run_gap_scan(const ExperimentConfig& config) {
  const auto h = config.spectrum();
  GapScan scan;
  scan.profile = density_grid(config.grid.lo, config.grid.hi, config.grid.points, config.y, h,
                              config.solver, config.v_eval, config.richardson);
  scan.gaps = detect_gaps(scan.profile, config.gap.f_threshold,
                          config.gap.min_width_steps * config.grid.step(), config.gap.margin_frac);
  for (const auto& gap : scan.gaps.interior())
    scan.certificates.push_back(certify_gap(gap.a, gap.b, config.y, h, config.solver,
                                            config.v_eval, config.gap.probe_points));
  return scan;
}

GapReport run_gap_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto spec = config.ensemble_spec();
  const auto scan = run_gap_scan(config);
  const auto interior = scan.gaps.interior();
  if (interior.empty()) throw Error(ErrorKind::NoGapFound, "no interior gap in the density grid");

  GapReport report;
  report.trials = config.trials;
  report.seed = spec.master_seed;
  report.min_clean_fraction = config.gap.min_clean_fraction;
  std::vector<std::size_t> certified;
  for (std::size_t k = 0; k < interior.size(); ++k) {
    GapRecord record;
    record.gap = interior[k];
    record.certificate = scan.certificates[k];
    if (record.certificate.valid()) certified.push_back(k);
    report.gaps.push_back(record);
  }
  if (certified.empty())
    throw Error(ErrorKind::CertificationFailed, "no detected gap passed certification",
                interior.front().a);

  // counts[trial][certified gap]
  std::vector<std::vector<std::size_t>> counts(config.trials);
  detail::for_each_trial(counts.size(), [&](std::size_t t) {
    const auto sample = sample_eigenvalues(spec, t);
    for (std::size_t k : certified)
      counts[t].push_back(count_in_interval(sample, interior[k].a, interior[k].b));
  });

  for (std::size_t c = 0; c < certified.size(); ++c) {
    auto& record = report.gaps[certified[c]];
    record.trials = config.trials;
    for (const auto& row : counts) {
      if (row[c] > 0) ++record.violations;
      record.max_count = std::max(record.max_count, static_cast<int>(row[c]));
    }
    record.clean_fraction =
        config.trials > 0 ? 1.0 - static_cast<double>(record.violations) / config.trials : 1.0;
    record.pass = record.clean_fraction >= config.gap.min_clean_fraction;
  }
  report.runtime_s = seconds_since(start);
  return report;
}

RateReport run_rate_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (!config.ensemble) config_error("rate experiment needs an 'ensemble' section");
  if (config.trials < 1) config_error("rate experiment needs trials >= 1");
  const auto h = config.spectrum();

  RateReport report;
  report.delta = config.rate.delta;
  report.seeds = config.trials;

  std::vector<Gap> certified;
  try {
    const auto scan = run_gap_scan(config);
    const auto interior = scan.gaps.interior();
    for (std::size_t k = 0; k < interior.size(); ++k)
      if (scan.certificates[k].valid()) certified.push_back(interior[k]);
  } catch (const Error& e) {
    if (classify(e.kind()) != ErrorClass::Numerical) throw;
  }

  if (config.rate.x) {
    report.x = *config.rate.x;
  } else {
    if (certified.empty())
      throw Error(ErrorKind::NoGapFound, "rate experiment needs x or a certified gap");
    report.x = 0.5 * (certified.front().a + certified.front().b);
  }
  report.x_in_certified_gap = std::any_of(certified.begin(), certified.end(), [&](const Gap& g) {
    return g.a <= report.x && report.x <= g.b;
  });

  for (int n : config.rate.n_list) {
    const int p = std::max(1, static_cast<int>(std::lround(config.y * n)));
    auto spec = ensemble_from_spectrum(h, p, n, config.ensemble->entry_dist,
                                       config.ensemble->seed);
    spec.rotate_basis = config.ensemble->rotate_basis;
    const auto h_n = spec.induced_spectrum();
    const double y_n = static_cast<double>(p) / n;
    const double v_n = std::pow(static_cast<double>(n), -config.rate.delta);
    const cplx z(report.x, v_n);
    const auto limit = solve_primal(z, y_n, h_n, config.solver);

    std::vector<double> deviations(config.trials);
    // Seed t fixes one double array; every n reads its p x n corner, so each
    // seed traces a single realization along the sequence of n.
    detail::for_each_trial(deviations.size(), [&](std::size_t t) {
      const auto noise = double_array_corner(spec.entry_dist,
                                             derive_seed(config.ensemble->seed, t), p, n);
      const auto sample = eigenvalues_of(data_matrix(spec, noise, t));
      deviations[t] = std::abs(empirical_stieltjes(sample, z) - limit.s);
    });
    const double med = median(deviations);
    report.rows.push_back({n, p, v_n, med, n * v_n * med});
  }
  report.runtime_s = seconds_since(start);
  return report;
}

std::string to_json(const LsdReport& report, bool include_runtime) {
  json doc{{"schema", kReportSchema}, {"command", "lsd"}};
  doc["grid"] = {{"lo", report.profile.xs.front()},
                 {"hi", report.profile.xs.back()},
                 {"points", report.profile.xs.size()},
                 {"v", report.profile.v_used}};
  doc["zero_mass"] = report.profile.zero_mass;
  doc["total_mass"] = report.total_mass;
  doc["ks"] = report.ks;
  doc["median_ks"] = report.median_ks ? json(*report.median_ks) : json(nullptr);
  if (include_runtime) doc["runtime_s"] = report.runtime_s;
  return doc.dump(2);
}

std::string to_json(const GapScan& scan) {
  json doc{{"schema", kReportSchema}, {"command", "gaps"}};
  doc["gaps"] = json::parse(gaps_to_json(scan.gaps));
  auto certs = json::array();
  for (const auto& c : scan.certificates) certs.push_back(certificate_json(c));
  doc["certificates"] = certs;
  return doc.dump(2);
}

std::string to_json(const GapReport& report, bool include_runtime) {
  json doc{{"schema", kReportSchema},
           {"command", "verify-gap"},
           {"trials", report.trials},
           {"seed", report.seed},
           {"min_clean_fraction", report.min_clean_fraction},
           {"pass", report.all_certified_pass()}};
  auto gaps = json::array();
  for (const auto& g : report.gaps) {
    json item = gap_json(g.gap);
    item["certificate"] = certificate_json(g.certificate);
    item["trials"] = g.trials;
    item["violations"] = g.violations;
    item["max_count"] = g.max_count;
    item["clean_fraction"] = g.clean_fraction;
    item["pass"] = g.pass;
    gaps.push_back(item);
  }
  doc["gaps"] = gaps;
  if (include_runtime) doc["runtime_s"] = report.runtime_s;
  return doc.dump(2);
}

std::string to_json(const RateReport& report, bool include_runtime) {
  json doc{{"schema", kReportSchema},
           {"command", "rate"},
           {"x", report.x},
           {"delta", report.delta},
           {"seeds", report.seeds},
           {"x_in_certified_gap", report.x_in_certified_gap}};
  if (!report.x_in_certified_gap) doc["flag"] = "x not in certified gap";
  auto rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"n", r.n},
                    {"p", r.p},
                    {"v_n", r.v_n},
                    {"median_abs", r.median_abs},
                    {"median_scaled", r.median_scaled}});
  doc["rows"] = rows;
  if (include_runtime) doc["runtime_s"] = report.runtime_s;
  return doc.dump(2);
}

}  // namespace noisegap
