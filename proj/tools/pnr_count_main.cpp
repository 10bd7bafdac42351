// pnr-count: batch front end for emitter-count estimation studies.
//
// Subcommands: simulate | estimate | crlb | montecarlo | plan.
// Every value can come from --config JSON; explicit flags override it, and
// unknown config fields are rejected. All randomness flows from --seed; when
// the flag is absent a seed is drawn from system entropy and printed so the
// run stays reproducible after the fact.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 input parse error,
// 4 unidentifiable data, 5 numerical failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pnr/errors.hpp"
#include "pnr/estimation.hpp"
#include "pnr/fisher.hpp"
#include "pnr/io.hpp"
#include "pnr/montecarlo.hpp"
#include "pnr/photon_model.hpp"
#include "pnr/planner.hpp"
#include "pnr/random.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;
constexpr int kExitUnidentifiable = 4;
constexpr int kExitNumerical = 5;
constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------- config --

json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config '" + path + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& error) {
    throw std::invalid_argument("config '" + path + "' is not valid JSON: " + error.what());
  }
}

/// One config key: the CLI flag that can override it and the setter invoked
/// when the config supplies the value.
struct ConfigField {
  CLI::Option* option = nullptr;
  std::function<void(const json&)> apply;
};

using ConfigFields = std::map<std::string, ConfigField>;

void apply_config(const json& config, const std::string& command, ConfigFields& fields) {
  if (!config.is_object()) {
    throw std::invalid_argument("config root must be a JSON object");
  }
  for (const auto& [key, value] : config.items()) {
    if (key == "command") {
      if (!value.is_string() || value.get<std::string>() != command) {
        throw std::invalid_argument("config field 'command' must equal '" + command + "'");
      }
      continue;
    }
    const auto found = fields.find(key);
    if (found == fields.end()) {
      throw std::invalid_argument("unknown config field '" + key + "' for command '" +
                                  command + "'");
    }
    if (found->second.option != nullptr && found->second.option->count() > 0) {
      continue;  // explicit flag wins over the config file
    }
    found->second.apply(value);
  }
}

double expect_number(const json& value, const std::string& key) {
  if (!value.is_number()) {
    throw std::invalid_argument("config field '" + key + "' must be a number");
  }
  return value.get<double>();
}

std::int64_t expect_integer(const json& value, const std::string& key) {
  if (!value.is_number_integer()) {
    throw std::invalid_argument("config field '" + key + "' must be an integer");
  }
  return value.get<std::int64_t>();
}

std::uint64_t expect_unsigned(const json& value, const std::string& key) {
  if (!value.is_number_unsigned() &&
      !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
    throw std::invalid_argument("config field '" + key + "' must be a nonnegative integer");
  }
  return value.get<std::uint64_t>();
}

std::string expect_string(const json& value, const std::string& key) {
  if (!value.is_string()) {
    throw std::invalid_argument("config field '" + key + "' must be a string");
  }
  return value.get<std::string>();
}

// ------------------------------------------------------------- utilities --

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

std::uint64_t entropy_seed() {
  std::random_device device;
  return (static_cast<std::uint64_t>(device()) << 32) ^ static_cast<std::uint64_t>(device());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

/// Report sink: --out file when given, stdout otherwise.
void emit_report(const std::string& out_path, const json& report) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

std::string sidecar_path(const std::string& csv_path) {
  if (csv_path.size() >= 4 && csv_path.substr(csv_path.size() - 4) == ".csv") {
    return csv_path.substr(0, csv_path.size() - 4) + ".json";
  }
  return csv_path + ".json";
}

std::string derived_path(const std::string& csv_path, const std::string& suffix) {
  if (csv_path.size() >= 4 && csv_path.substr(csv_path.size() - 4) == ".csv") {
    return csv_path.substr(0, csv_path.size() - 4) + suffix + ".csv";
  }
  return csv_path + suffix;
}

std::vector<std::string> csv_header_comments(const std::string& command, const json& config) {
  return {"pnr-count " + command, "config: " + config.dump()};
}

json matrix_to_json(const Eigen::Matrix2d& matrix) {
  return json::array({json::array({matrix(0, 0), matrix(0, 1)}),
                      json::array({matrix(1, 0), matrix(1, 1)})});
}

json ellipse_to_json(const pnr::ConfidenceEllipse& region) {
  json out;
  out["center"] = json::array({region.center.x(), region.center.y()});
  out["semi_major"] = region.semi_major;
  out["semi_minor"] = region.semi_minor;
  out["orientation_radians"] = region.orientation;
  out["coverage"] = region.coverage;
  return out;
}

// ------------------------------------------------------------- commands ---

struct SimulateArgs {
  std::int64_t emitters = 0;
  double detection_prob = -1.0;
  std::uint64_t nu = 0;
  std::uint64_t seed = 0;
  bool seed_provided = false;
  std::string out;
};

int run_simulate(const SimulateArgs& args) {
  require(args.emitters >= 1, "simulate needs --emitters >= 1");
  require(args.detection_prob >= 0.0, "simulate needs --prob in [0, 1]");
  require(args.nu >= 1, "simulate needs --nu >= 1");
  require(!args.out.empty(), "simulate needs --out");

  const pnr::EmitterModel model{args.emitters, args.detection_prob};
  model.validate();

  std::uint64_t seed = args.seed;
  if (!args.seed_provided) {
    seed = entropy_seed();
    std::cout << "seed: " << seed << "\n";
  }

  json config;
  config["command"] = "simulate";
  config["emitters"] = args.emitters;
  config["detection_prob"] = args.detection_prob;
  config["nu"] = args.nu;
  config["seed"] = seed;
  config["out"] = args.out;

  const pnr::PhotonHistogram histogram = pnr::sample_histogram(model, args.nu, seed);
  pnr::write_histogram_csv_file(histogram, args.out, csv_header_comments("simulate", config));

  // Ideal-pmf overlay: cover both the populated bins and essentially all of
  // the probability mass.
  json ns = json::array();
  json pmfs = json::array();
  double cumulative = 0.0;
  const int sampled_max = histogram.max_photons();
  for (std::int64_t n = 0; n <= model.emitters; ++n) {
    const double f = pnr::pmf_theta(static_cast<int>(n), model);
    ns.push_back(n);
    pmfs.push_back(f);
    cumulative += f;
    if (n >= sampled_max && cumulative >= 1.0 - 1e-12) break;
  }

  json sidecar;
  sidecar["schema_version"] = kSchemaVersion;
  sidecar["command"] = "simulate";
  sidecar["config"] = config;
  sidecar["ideal_pmf"] = json{{"N", ns}, {"pmf", pmfs}};
  sidecar["sample"] = json{{"experiments", histogram.experiments()},
                           {"sample_mean", histogram.sample_mean()},
                           {"max_photons", histogram.max_photons()}};
  write_text_file(sidecar_path(args.out), sidecar.dump(2) + "\n");
  return 0;
}

struct EstimateArgs {
  std::string input;
  std::int64_t m_max = 0;  // 0 = automatic ceiling
  std::string out;
};

int run_estimate(const EstimateArgs& args) {
  require(!args.input.empty(), "estimate needs --input");
  require(args.m_max >= 0, "--m-max must be nonnegative (0 = automatic)");

  json config;
  config["command"] = "estimate";
  config["input"] = args.input;
  config["m_max"] = args.m_max;
  config["out"] = args.out;

  const pnr::PhotonHistogram histogram = pnr::read_histogram_csv_file(args.input);
  pnr::MleOptions options;
  options.max_emitters = args.m_max;
  options.keep_profile = true;
  const pnr::EstimationResult result = pnr::mle(histogram, options);

  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "estimate";
  report["config"] = config;
  report["data"] = json{{"experiments", histogram.experiments()},
                        {"sample_mean", histogram.sample_mean()},
                        {"max_photons", histogram.max_photons()}};
  report["estimate"] = json{{"emitters", result.theta_hat.emitters},
                            {"detection_prob", result.theta_hat.detection_prob},
                            {"lambda", result.beta_hat.mean_photons},
                            {"xi", result.beta_hat.emitters_over_prob},
                            {"log_likelihood", result.log_likelihood},
                            {"converged", result.converged},
                            {"scan_min", result.scan_min},
                            {"scan_max", result.scan_max}};
  json profile_m = json::array();
  json profile_p = json::array();
  json profile_ll = json::array();
  for (const auto& point : result.profile) {
    profile_m.push_back(point.emitters);
    profile_p.push_back(point.detection_prob);
    profile_ll.push_back(point.log_likelihood);
  }
  report["profile"] = json{{"emitters", profile_m},
                           {"detection_prob", profile_p},
                           {"log_likelihood", profile_ll}};
  emit_report(args.out, report);
  return 0;
}

struct CrlbArgs {
  std::int64_t emitters = 0;
  double detection_prob = -1.0;
  std::uint64_t nu = 1;
  double coverage = 0.95;
  int ellipse_points = 64;
  std::string out;
};

int run_crlb(const CrlbArgs& args) {
  require(args.emitters >= 1, "crlb needs --emitters >= 1");
  require(args.detection_prob >= 0.0, "crlb needs --prob in (0, 1)");
  require(args.nu >= 1, "--nu must be at least 1");
  require(args.coverage >= 0.0 && args.coverage < 1.0, "--coverage must lie in [0, 1)");
  require(args.ellipse_points >= 3, "--ellipse-points must be at least 3");

  const pnr::EmitterModel theta{args.emitters, args.detection_prob};
  theta.validate();
  const pnr::BrightnessModel beta = pnr::to_beta(theta);

  json config;
  config["command"] = "crlb";
  config["emitters"] = args.emitters;
  config["detection_prob"] = args.detection_prob;
  config["nu"] = args.nu;
  config["coverage"] = args.coverage;
  config["ellipse_points"] = args.ellipse_points;
  config["out"] = args.out;

  const pnr::FisherMatrix fim_theta = pnr::fim(theta);
  const pnr::FisherMatrix fim_beta = pnr::fim(beta);
  const pnr::CovarianceMatrix cov_theta = pnr::crlb_from_fim(fim_theta, args.nu);
  const pnr::CovarianceMatrix cov_beta = pnr::crlb_from_fim(fim_beta, args.nu);
  const pnr::ConfidenceEllipse ellipse_theta =
      pnr::ellipse(cov_theta,
                   Eigen::Vector2d(static_cast<double>(theta.emitters), theta.detection_prob),
                   args.coverage);
  const pnr::ConfidenceEllipse ellipse_beta =
      pnr::ellipse(cov_beta, Eigen::Vector2d(beta.mean_photons, beta.emitters_over_prob),
                   args.coverage);

  // Image of the beta-space ellipse boundary in (M, p); points whose lambda
  // exceeds xi (detection probability above 1) cannot be mapped and are
  // dropped with a count.
  json mapped_m = json::array();
  json mapped_p = json::array();
  int dropped = 0;
  for (const auto& point : pnr::ellipse_boundary(ellipse_beta, args.ellipse_points)) {
    try {
      const auto image = pnr::transform_beta_to_theta({point});
      mapped_m.push_back(image.front().x());
      mapped_p.push_back(image.front().y());
    } catch (const std::invalid_argument&) {
      ++dropped;
    }
  }

  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "crlb";
  report["config"] = config;
  report["theta"] = json{{"emitters", args.emitters},
                         {"detection_prob", args.detection_prob},
                         {"fim", matrix_to_json(fim_theta.entries)},
                         {"fim_truncation", fim_theta.truncation},
                         {"covariance", matrix_to_json(cov_theta.entries)},
                         {"ellipse", ellipse_to_json(ellipse_theta)}};
  report["beta"] = json{{"lambda", beta.mean_photons},
                        {"xi", beta.emitters_over_prob},
                        {"fim", matrix_to_json(fim_beta.entries)},
                        {"fim_truncation", fim_beta.truncation},
                        {"covariance", matrix_to_json(cov_beta.entries)},
                        {"ellipse", ellipse_to_json(ellipse_beta)},
                        {"ellipse_mapped_to_theta",
                         json{{"emitters", mapped_m},
                              {"detection_prob", mapped_p},
                              {"dropped_points", dropped}}}};
  emit_report(args.out, report);
  return 0;
}

struct MontecarloArgs {
  std::int64_t emitters = 0;
  double detection_prob = -1.0;
  std::vector<std::uint64_t> nu_list = {100, 1000, 10000, 100000};
  int runs = 100;
  std::uint64_t seed = 0;
  bool seed_provided = false;
  int threads = 0;
  std::string out;
};

int run_montecarlo(const MontecarloArgs& args) {
  require(args.emitters >= 1, "montecarlo needs --emitters >= 1");
  require(args.detection_prob >= 0.0, "montecarlo needs --prob in (0, 1)");
  require(args.runs >= 2, "--runs must be at least 2");
  require(args.threads >= 0, "--threads must be nonnegative");
  require(!args.out.empty(), "montecarlo needs --out");

  const pnr::EmitterModel model{args.emitters, args.detection_prob};
  model.validate();

  std::uint64_t seed = args.seed;
  if (!args.seed_provided) {
    seed = entropy_seed();
    std::cout << "seed: " << seed << "\n";
  }

  json config;
  config["command"] = "montecarlo";
  config["emitters"] = args.emitters;
  config["detection_prob"] = args.detection_prob;
  config["nu_list"] = args.nu_list;
  config["runs"] = args.runs;
  config["seed"] = seed;
  config["threads"] = args.threads;
  config["out"] = args.out;

  const std::vector<pnr::ScalingRow> rows =
      pnr::scaling_study(model, args.nu_list, args.runs, seed, args.threads);

  std::ostringstream table;
  pnr::write_scaling_csv(rows, table, csv_header_comments("montecarlo", config));
  write_text_file(args.out, table.str());
  return 0;
}

struct PlanArgs {
  double target = 0.01;
  pnr::PlanGridOptions grid;
  double pulse_period = 1e-6;
  std::string out;
};

int run_plan(const PlanArgs& args) {
  require(args.target > 0.0, "--target must be positive");
  require(args.pulse_period > 0.0, "--pulse-period must be positive");
  require(!args.out.empty(), "plan needs --out");

  json config;
  config["command"] = "plan";
  config["target"] = args.target;
  config["m_min"] = args.grid.m_min;
  config["m_max"] = args.grid.m_max;
  config["p_min"] = args.grid.p_min;
  config["p_max"] = args.grid.p_max;
  config["m_resolution"] = args.grid.m_resolution;
  config["p_resolution"] = args.grid.p_resolution;
  config["contour_lambdas"] = args.grid.contour_lambdas;
  config["pulse_period"] = args.pulse_period;
  config["out"] = args.out;

  const pnr::PlanGrid grid = pnr::plan_grid(args.grid, args.target);

  std::ostringstream matrix;
  pnr::write_plan_csv(grid, matrix, csv_header_comments("plan", config));
  write_text_file(args.out, matrix.str());

  std::ostringstream contours;
  pnr::write_contours_csv(grid, args.pulse_period, contours,
                          csv_header_comments("plan", config));
  write_text_file(derived_path(args.out, "_contours"), contours.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-number-resolved emitter counting toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pnr-count 1.0.0");

  std::string config_path;

  SimulateArgs simulate_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Sample a synthetic photon-count histogram and its ideal pmf");
  simulate->add_option("--config", config_path, "JSON config file");
  auto* sim_m = simulate->add_option("-M,--emitters", simulate_args.emitters, "emitter count");
  auto* sim_p =
      simulate->add_option("-p,--prob", simulate_args.detection_prob, "detection probability");
  auto* sim_nu = simulate->add_option("-n,--nu", simulate_args.nu, "number of experiments");
  auto* sim_seed = simulate->add_option("--seed", simulate_args.seed, "master RNG seed");
  auto* sim_out = simulate->add_option("--out", simulate_args.out, "histogram CSV path");

  EstimateArgs estimate_args;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "Profile-likelihood MLE of (M, p) from a histogram file");
  estimate->add_option("--config", config_path, "JSON config file");
  auto* est_input =
      estimate->add_option("-i,--input", estimate_args.input, "histogram CSV path");
  auto* est_mmax = estimate->add_option("--m-max", estimate_args.m_max,
                                        "emitter scan ceiling (0 = automatic)");
  auto* est_out = estimate->add_option("--out", estimate_args.out,
                                       "report JSON path (default: stdout)");

  CrlbArgs crlb_args;
  CLI::App* crlb = app.add_subcommand(
      "crlb", "Fisher information, CRLB covariance, and confidence ellipses");
  crlb->add_option("--config", config_path, "JSON config file");
  auto* crlb_m = crlb->add_option("-M,--emitters", crlb_args.emitters, "emitter count");
  auto* crlb_p = crlb->add_option("-p,--prob", crlb_args.detection_prob,
                                  "detection probability");
  auto* crlb_nu = crlb->add_option("-n,--nu", crlb_args.nu, "number of experiments");
  auto* crlb_cov = crlb->add_option("--coverage", crlb_args.coverage,
                                    "confidence level in [0, 1)");
  auto* crlb_pts = crlb->add_option("--ellipse-points", crlb_args.ellipse_points,
                                    "boundary samples for the mapped ellipse");
  auto* crlb_out = crlb->add_option("--out", crlb_args.out,
                                    "report JSON path (default: stdout)");

  MontecarloArgs montecarlo_args;
  CLI::App* montecarlo = app.add_subcommand(
      "montecarlo", "Seeded MLE ensembles: variance scaling against the CRLB");
  montecarlo->add_option("--config", config_path, "JSON config file");
  auto* mc_m = montecarlo->add_option("-M,--emitters", montecarlo_args.emitters,
                                      "ground-truth emitter count");
  auto* mc_p = montecarlo->add_option("-p,--prob", montecarlo_args.detection_prob,
                                      "ground-truth detection probability");
  auto* mc_nu_list = montecarlo->add_option("--nu-list", montecarlo_args.nu_list,
                                            "experiments per run, ascending")
                         ->delimiter(',');
  auto* mc_runs = montecarlo->add_option("--runs", montecarlo_args.runs, "runs per nu");
  auto* mc_seed = montecarlo->add_option("--seed", montecarlo_args.seed, "master RNG seed");
  auto* mc_threads =
      montecarlo->add_option("--threads", montecarlo_args.threads,
                             "worker threads (0 = hardware concurrency)");
  auto* mc_out = montecarlo->add_option("--out", montecarlo_args.out, "study CSV path");

  PlanArgs plan_args;
  CLI::App* plan = app.add_subcommand(
      "plan", "Experiments-needed surface over (M, p) with fixed-lambda contours");
  plan->add_option("--config", config_path, "JSON config file");
  auto* plan_target = plan->add_option("--target", plan_args.target,
                                       "relative-variance target Var[M]/M");
  auto* plan_mmin = plan->add_option("--m-min", plan_args.grid.m_min, "smallest M");
  auto* plan_mmax = plan->add_option("--m-max", plan_args.grid.m_max, "largest M");
  auto* plan_pmin = plan->add_option("--p-min", plan_args.grid.p_min, "smallest p");
  auto* plan_pmax = plan->add_option("--p-max", plan_args.grid.p_max, "largest p");
  auto* plan_mres =
      plan->add_option("--m-resolution", plan_args.grid.m_resolution, "M-axis points");
  auto* plan_pres =
      plan->add_option("--p-resolution", plan_args.grid.p_resolution, "p-axis points");
  auto* plan_lambdas = plan->add_option("--lambdas", plan_args.grid.contour_lambdas,
                                        "fixed-lambda contour values")
                           ->delimiter(',');
  auto* plan_period = plan->add_option("--pulse-period", plan_args.pulse_period,
                                       "seconds per experiment");
  auto* plan_out = plan->add_option("--out", plan_args.out, "grid CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForAllHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForVersion& version) {
    return app.exit(version);
  } catch (const CLI::ParseError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) {
      ConfigFields fields;
      fields["emitters"] = {sim_m, [&](const json& v) {
                              simulate_args.emitters = expect_integer(v, "emitters");
                            }};
      fields["detection_prob"] = {sim_p, [&](const json& v) {
                                    simulate_args.detection_prob =
                                        expect_number(v, "detection_prob");
                                  }};
      fields["nu"] = {sim_nu,
                      [&](const json& v) { simulate_args.nu = expect_unsigned(v, "nu"); }};
      fields["seed"] = {sim_seed, [&](const json& v) {
                          simulate_args.seed = expect_unsigned(v, "seed");
                          simulate_args.seed_provided = true;
                        }};
      fields["out"] = {sim_out,
                       [&](const json& v) { simulate_args.out = expect_string(v, "out"); }};
      if (!config_path.empty()) apply_config(load_config_file(config_path), "simulate", fields);
      simulate_args.seed_provided = simulate_args.seed_provided || sim_seed->count() > 0;
      return run_simulate(simulate_args);
    }
    if (estimate->parsed()) {
      ConfigFields fields;
      fields["input"] = {est_input, [&](const json& v) {
                           estimate_args.input = expect_string(v, "input");
                         }};
      fields["m_max"] = {est_mmax, [&](const json& v) {
                           estimate_args.m_max = expect_integer(v, "m_max");
                         }};
      fields["out"] = {est_out,
                       [&](const json& v) { estimate_args.out = expect_string(v, "out"); }};
      if (!config_path.empty()) apply_config(load_config_file(config_path), "estimate", fields);
      return run_estimate(estimate_args);
    }
    if (crlb->parsed()) {
      ConfigFields fields;
      fields["emitters"] = {crlb_m, [&](const json& v) {
                              crlb_args.emitters = expect_integer(v, "emitters");
                            }};
      fields["detection_prob"] = {crlb_p, [&](const json& v) {
                                    crlb_args.detection_prob =
                                        expect_number(v, "detection_prob");
                                  }};
      fields["nu"] = {crlb_nu,
                      [&](const json& v) { crlb_args.nu = expect_unsigned(v, "nu"); }};
      fields["coverage"] = {crlb_cov, [&](const json& v) {
                              crlb_args.coverage = expect_number(v, "coverage");
                            }};
      fields["ellipse_points"] = {crlb_pts, [&](const json& v) {
                                    crlb_args.ellipse_points = static_cast<int>(
                                        expect_integer(v, "ellipse_points"));
                                  }};
      fields["out"] = {crlb_out,
                       [&](const json& v) { crlb_args.out = expect_string(v, "out"); }};
      if (!config_path.empty()) apply_config(load_config_file(config_path), "crlb", fields);
      return run_crlb(crlb_args);
    }
    if (montecarlo->parsed()) {
      ConfigFields fields;
      fields["emitters"] = {mc_m, [&](const json& v) {
                              montecarlo_args.emitters = expect_integer(v, "emitters");
                            }};
      fields["detection_prob"] = {mc_p, [&](const json& v) {
                                    montecarlo_args.detection_prob =
                                        expect_number(v, "detection_prob");
                                  }};
      fields["nu_list"] = {mc_nu_list, [&](const json& v) {
                             if (!v.is_array() || v.empty()) {
                               throw std::invalid_argument(
                                   "config field 'nu_list' must be a nonempty array");
                             }
                             montecarlo_args.nu_list.clear();
                             for (const auto& item : v) {
                               montecarlo_args.nu_list.push_back(
                                   expect_unsigned(item, "nu_list"));
                             }
                           }};
      fields["runs"] = {mc_runs, [&](const json& v) {
                          montecarlo_args.runs = static_cast<int>(expect_integer(v, "runs"));
                        }};
      fields["seed"] = {mc_seed, [&](const json& v) {
                          montecarlo_args.seed = expect_unsigned(v, "seed");
                          montecarlo_args.seed_provided = true;
                        }};
      fields["threads"] = {mc_threads, [&](const json& v) {
                             montecarlo_args.threads =
                                 static_cast<int>(expect_integer(v, "threads"));
                           }};
      fields["out"] = {mc_out,
                       [&](const json& v) { montecarlo_args.out = expect_string(v, "out"); }};
      if (!config_path.empty()) {
        apply_config(load_config_file(config_path), "montecarlo", fields);
      }
      montecarlo_args.seed_provided = montecarlo_args.seed_provided || mc_seed->count() > 0;
      return run_montecarlo(montecarlo_args);
    }
    if (plan->parsed()) {
      ConfigFields fields;
      fields["target"] = {plan_target, [&](const json& v) {
                            plan_args.target = expect_number(v, "target");
                          }};
      fields["m_min"] = {plan_mmin, [&](const json& v) {
                           plan_args.grid.m_min = expect_number(v, "m_min");
                         }};
      fields["m_max"] = {plan_mmax, [&](const json& v) {
                           plan_args.grid.m_max = expect_number(v, "m_max");
                         }};
      fields["p_min"] = {plan_pmin, [&](const json& v) {
                           plan_args.grid.p_min = expect_number(v, "p_min");
                         }};
      fields["p_max"] = {plan_pmax, [&](const json& v) {
                           plan_args.grid.p_max = expect_number(v, "p_max");
                         }};
      fields["m_resolution"] = {plan_mres, [&](const json& v) {
                                  plan_args.grid.m_resolution =
                                      static_cast<int>(expect_integer(v, "m_resolution"));
                                }};
      fields["p_resolution"] = {plan_pres, [&](const json& v) {
                                  plan_args.grid.p_resolution =
                                      static_cast<int>(expect_integer(v, "p_resolution"));
                                }};
      fields["contour_lambdas"] = {plan_lambdas, [&](const json& v) {
                                     if (!v.is_array()) {
                                       throw std::invalid_argument(
                                           "config field 'contour_lambdas' must be an array");
                                     }
                                     plan_args.grid.contour_lambdas.clear();
                                     for (const auto& item : v) {
                                       plan_args.grid.contour_lambdas.push_back(
                                           expect_number(item, "contour_lambdas"));
                                     }
                                   }};
      fields["pulse_period"] = {plan_period, [&](const json& v) {
                                  plan_args.pulse_period = expect_number(v, "pulse_period");
                                }};
      fields["out"] = {plan_out,
                       [&](const json& v) { plan_args.out = expect_string(v, "out"); }};
      if (!config_path.empty()) apply_config(load_config_file(config_path), "plan", fields);
      return run_plan(plan_args);
    }
    std::cerr << "error: no subcommand selected\n";
    return kExitConfig;
  } catch (const pnr::ParseError& error) {
    std::cerr << "parse error: " << error.what() << "\n";
    return kExitParse;
  } catch (const pnr::UnidentifiableDataError& error) {
    std::cerr << "unidentifiable data: " << error.what() << "\n";
    return kExitUnidentifiable;
  } catch (const pnr::NumericalError& error) {
    std::cerr << "numerical failure: " << error.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitConfig;
  }
}
