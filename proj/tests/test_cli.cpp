// End-to-end tests of the pnr-count executable: each case invokes the real
// binary (path injected at configure time) in a scratch directory and
// inspects exit codes, files, and streams.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;
  std::string error;
};

const fs::path& scratch_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "pnr_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

CommandResult run_cli(const std::string& arguments) {
  static int invocation = 0;
  const fs::path out_file = scratch_dir() / ("stdout_" + std::to_string(invocation));
  const fs::path err_file = scratch_dir() / ("stderr_" + std::to_string(invocation));
  ++invocation;
  const std::string command = std::string(PNR_CLI_BINARY) + " " + arguments + " >" +
                              out_file.string() + " 2>" + err_file.string();
  const int status = std::system(command.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.output = slurp(out_file);
  result.error = slurp(err_file);
  return result;
}

std::string data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream kept;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') {
      kept << line << "\n";
    }
  }
  return kept.str();
}

}  // namespace

TEST_CASE("running without a subcommand is a usage error") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("simulate").exit_code == 2);  // missing required options
}

TEST_CASE("--help and --version succeed") {
  const CommandResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.output.find("simulate") != std::string::npos);
  CHECK(run_cli("simulate --help").exit_code == 0);
  CHECK(run_cli("--version").exit_code == 0);
}

TEST_CASE("simulate writes a histogram, a sidecar, and is reproducible") {
  const fs::path hist = scratch_dir() / "sim.csv";
  const std::string args = "simulate -M 40 -p 0.2 --nu 20000 --seed 7 --out " +
                           hist.string();
  const CommandResult first = run_cli(args);
  CHECK(first.exit_code == 0);
  // Explicit seed: nothing to announce on stdout.
  CHECK(first.output.find("seed:") == std::string::npos);
  REQUIRE(fs::exists(hist));

  // CSV totals match the requested number of experiments.
  std::istringstream in(data_rows(slurp(hist)));
  std::string line;
  std::getline(in, line);
  CHECK(line == "N,count");
  std::uint64_t total = 0;
  while (std::getline(in, line)) {
    total += std::stoull(line.substr(line.find(',') + 1));
  }
  CHECK(total == 20000);

  // Sidecar carries the effective config and the ideal pmf.
  const fs::path sidecar = scratch_dir() / "sim.json";
  REQUIRE(fs::exists(sidecar));
  const json meta = json::parse(slurp(sidecar));
  CHECK(meta.at("command") == "simulate");
  CHECK(meta.at("config").at("emitters") == 40);
  CHECK(meta.at("config").at("seed") == 7);
  CHECK(meta.at("sample").at("experiments") == 20000);
  CHECK(meta.at("ideal_pmf").at("N").size() == meta.at("ideal_pmf").at("pmf").size());

  // Byte-identical rerun with identical arguments.
  const std::string bytes = slurp(hist);
  const std::string sidecar_bytes = slurp(sidecar);
  CHECK(run_cli(args).exit_code == 0);
  CHECK(slurp(hist) == bytes);
  CHECK(slurp(sidecar) == sidecar_bytes);
}

TEST_CASE("simulate without a seed invents one and reports it") {
  const fs::path hist = scratch_dir() / "sim_noseed.csv";
  const CommandResult r =
      run_cli("simulate -M 5 -p 0.5 --nu 100 --out " + hist.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("seed:") != std::string::npos);
}

TEST_CASE("estimate recovers the simulated model and echoes a profile") {
  const fs::path hist = scratch_dir() / "est_input.csv";
  REQUIRE(run_cli("simulate -M 40 -p 0.2 --nu 100000 --seed 11 --out " +
                  hist.string())
              .exit_code == 0);
  const fs::path report_path = scratch_dir() / "est.json";
  const CommandResult r = run_cli("estimate --input " + hist.string() +
                                  " --out " + report_path.string());
  CHECK(r.exit_code == 0);
  const json report = json::parse(slurp(report_path));
  const json& estimate = report.at("estimate");
  const std::int64_t m_hat = estimate.at("emitters").get<std::int64_t>();
  CHECK(m_hat >= 30);
  CHECK(m_hat <= 55);
  CHECK(estimate.at("converged").get<bool>());
  // Brightness is pinned to the sample mean by the profile construction.
  const double lambda_hat = estimate.at("lambda").get<double>();
  const double nbar = report.at("data").at("sample_mean").get<double>();
  CHECK(lambda_hat == doctest::Approx(nbar).epsilon(1e-9));
  // Profile arrays span the scan range.
  const auto& profile = report.at("profile");
  const std::size_t span =
      static_cast<std::size_t>(estimate.at("scan_max").get<std::int64_t>() -
                               estimate.at("scan_min").get<std::int64_t>() + 1);
  CHECK(profile.at("emitters").size() == span);
  CHECK(profile.at("log_likelihood").size() == span);
}

TEST_CASE("estimate exit codes distinguish parse, data, and usage failures") {
  const fs::path missing = scratch_dir() / "missing.csv";
  CHECK(run_cli("estimate --input " + missing.string()).exit_code == 2);

  const fs::path bad = scratch_dir() / "bad.csv";
  spit(bad, "N,count\n0,5\nnot a row\n");
  const CommandResult parse_failure = run_cli("estimate --input " + bad.string());
  CHECK(parse_failure.exit_code == 3);
  CHECK(parse_failure.error.find("line 3") != std::string::npos);

  const fs::path dark = scratch_dir() / "dark.csv";
  spit(dark, "N,count\n0,50\n");
  CHECK(run_cli("estimate --input " + dark.string()).exit_code == 4);

  const fs::path ok = scratch_dir() / "ok.csv";
  spit(ok, "N,count\n0,10\n5,10\n");
  // Ceiling below the largest observed photon number.
  CHECK(run_cli("estimate --input " + ok.string() + " --m-max 4").exit_code == 2);
}

TEST_CASE("crlb reports both parameterizations with a mapped ellipse") {
  const fs::path report_path = scratch_dir() / "crlb.json";
  const CommandResult r = run_cli(
      "crlb -M 40 -p 0.2 --nu 100 --ellipse-points 32 --out " + report_path.string());
  CHECK(r.exit_code == 0);
  const json report = json::parse(slurp(report_path));
  const double c_mm = report.at("theta").at("covariance")[0][0].get<double>();
  CHECK(c_mm == doctest::Approx(494.79222).epsilon(1e-6));
  const double c_ll = report.at("beta").at("covariance")[0][0].get<double>();
  CHECK(c_ll == doctest::Approx(0.064).epsilon(1e-6));
  CHECK(report.at("theta").at("ellipse").at("coverage").get<double>() == 0.95);
  const auto& mapped = report.at("beta").at("ellipse_mapped_to_theta");
  CHECK(mapped.at("emitters").size() + mapped.at("dropped_points").get<std::size_t>() == 32);
  // Without --out the report goes to stdout.
  const CommandResult piped = run_cli("crlb -M 40 -p 0.2 --nu 100");
  CHECK(piped.exit_code == 0);
  CHECK(json::parse(piped.output).at("theta").at("covariance")[0][0].get<double>() ==
        doctest::Approx(494.79222).epsilon(1e-6));
}

TEST_CASE("crlb rejects a numerically singular request with exit 5") {
  const CommandResult r = run_cli("crlb -M 1000000 -p 1e-6 --nu 10");
  CHECK(r.exit_code == 5);
  CHECK(r.error.find("numerical failure") != std::string::npos);
  CHECK(r.error.find("singular") != std::string::npos);
}

TEST_CASE("montecarlo output is invariant to the thread count") {
  const fs::path a = scratch_dir() / "mc_a.csv";
  const fs::path b = scratch_dir() / "mc_b.csv";
  const std::string base = "montecarlo -M 5 -p 0.4 --nu-list 50,200 --runs 8 --seed 3 ";
  CHECK(run_cli(base + "--threads 1 --out " + a.string()).exit_code == 0);
  CHECK(run_cli(base + "--threads 3 --out " + b.string()).exit_code == 0);
  // The config echo differs (threads), the data must not.
  CHECK(data_rows(slurp(a)) == data_rows(slurp(b)));
  CHECK(data_rows(slurp(a)).find("\n50,M,") != std::string::npos);
}

TEST_CASE("montecarlo rejects invalid requests") {
  CHECK(run_cli("montecarlo -M 5 -p 0.4 --nu-list 200,50 --runs 8 --seed 1 --out " +
                (scratch_dir() / "x.csv").string())
            .exit_code == 2);
  CHECK(run_cli("montecarlo -M 1000000 -p 1e-6 --nu-list 10 --runs 4 --seed 1 --out " +
                (scratch_dir() / "y.csv").string())
            .exit_code == 5);
}

TEST_CASE("plan writes the surface and its contour companion") {
  const fs::path surface = scratch_dir() / "plan.csv";
  const CommandResult r = run_cli(
      "plan --target 0.01 --m-min 5 --m-max 500 --p-min 0.01 --p-max 0.9 "
      "--m-resolution 6 --p-resolution 5 --lambdas 10,20 --out " +
      surface.string());
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(surface));
  const std::string matrix = data_rows(slurp(surface));
  CHECK(matrix.rfind("M\\p,", 0) == 0);
  const fs::path contours = scratch_dir() / "plan_contours.csv";
  REQUIRE(fs::exists(contours));
  CHECK(data_rows(slurp(contours)).rfind("lambda,M,p,nu,time_seconds", 0) == 0);
}

TEST_CASE("config files merge with explicit flags taking precedence") {
  const fs::path config = scratch_dir() / "sim_config.json";
  const fs::path hist = scratch_dir() / "from_config.csv";
  spit(config, json{{"emitters", 40},
                    {"detection_prob", 0.2},
                    {"nu", 500},
                    {"seed", 9},
                    {"out", hist.string()}}
                   .dump());
  CHECK(run_cli("simulate --config " + config.string()).exit_code == 0);
  json meta = json::parse(slurp(scratch_dir() / "from_config.json"));
  CHECK(meta.at("config").at("emitters") == 40);
  CHECK(meta.at("config").at("nu") == 500);

  // A flag on the command line overrides the config value.
  CHECK(run_cli("simulate --config " + config.string() + " -M 50").exit_code == 0);
  meta = json::parse(slurp(scratch_dir() / "from_config.json"));
  CHECK(meta.at("config").at("emitters") == 50);
}

TEST_CASE("unknown config fields are rejected, not ignored") {
  const fs::path config = scratch_dir() / "bad_config.json";
  spit(config, json{{"emitters", 40}, {"detektion_prob", 0.2}}.dump());
  const CommandResult r = run_cli("simulate --config " + config.string());
  CHECK(r.exit_code == 2);
  CHECK(r.error.find("detektion_prob") != std::string::npos);
}
