#include "pnr/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "pnr/errors.hpp"
#include "pnr/random.hpp"

namespace pnr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ParameterStats stats_of(const std::vector<double>& values) {
  ParameterStats out{kNaN, kNaN};
  const std::size_t n = values.size();
  if (n == 0) return out;
  long double sum = 0.0L;
  for (double v : values) sum += v;
  const double mean = static_cast<double>(sum / static_cast<long double>(n));
  out.mean = mean;
  if (n < 2) return out;
  long double squares = 0.0L;
  for (double v : values) {
    const long double d = v - mean;
    squares += d * d;
  }
  out.variance = static_cast<double>(squares / static_cast<long double>(n - 1));
  return out;
}

}  // namespace

EnsembleResult run_ensemble(const EmitterModel& ground_truth, std::uint64_t nu, int runs,
                            std::uint64_t master_seed, int threads,
                            const MleOptions& mle_options) {
  ground_truth.validate();
  if (!(ground_truth.detection_prob > 0.0 && ground_truth.detection_prob < 1.0)) {
    throw std::invalid_argument(
        "Monte-Carlo ensembles need an interior detection probability, got " +
        std::to_string(ground_truth.detection_prob));
  }
  if (nu < 1) throw std::invalid_argument("need at least one experiment per run");
  if (runs < 2) throw std::invalid_argument("need at least two runs, got " +
                                            std::to_string(runs));

  EnsembleResult result;
  result.ground_truth = ground_truth;
  result.nu = nu;
  result.runs = runs;
  // Computed before any sampling: a degenerate (near-Poisson) ground truth
  // should fail fast, not after the whole ensemble has run.
  result.crlb_theta = crlb(ground_truth, nu);
  result.crlb_beta = crlb(to_beta(ground_truth), nu);

  std::vector<std::optional<EstimationResult>> outcomes(static_cast<std::size_t>(runs));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto work = [&]() {
    while (true) {
      const int index = next.fetch_add(1);
      if (index >= runs) return;
      try {
        const PhotonHistogram data = sample_histogram(
            ground_truth, nu, derive_seed(master_seed, static_cast<std::uint64_t>(index)));
        try {
          outcomes[static_cast<std::size_t>(index)] = mle(data, mle_options);
        } catch (const UnidentifiableDataError&) {
          // all-zero histogram: recorded as a count, not an estimate
        }
      } catch (...) {
        const std::lock_guard<std::mutex> guard(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  int worker_count = threads > 0
                         ? threads
                         : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  worker_count = std::min(worker_count, runs);
  if (worker_count <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (int t = 0; t < worker_count; ++t) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();
  }
  if (failure) std::rethrow_exception(failure);

  const BrightnessModel beta0 = to_beta(ground_truth);
  const ConfidenceEllipse region =
      ellipse(result.crlb_beta,
              Eigen::Vector2d(beta0.mean_photons, beta0.emitters_over_prob), 0.95);

  std::vector<double> m_hat, p_hat, lambda_hat, xi_hat;
  int inside = 0;
  for (int index = 0; index < runs; ++index) {
    auto& outcome = outcomes[static_cast<std::size_t>(index)];
    if (!outcome.has_value()) {
      ++result.unidentifiable_runs;
      continue;
    }
    result.estimates.push_back(std::move(*outcome));
    const EstimationResult& estimate = result.estimates.back();
    if (!estimate.converged) continue;  // ceiling-bound: excluded from statistics
    m_hat.push_back(static_cast<double>(estimate.theta_hat.emitters));
    p_hat.push_back(estimate.theta_hat.detection_prob);
    lambda_hat.push_back(estimate.beta_hat.mean_photons);
    xi_hat.push_back(estimate.beta_hat.emitters_over_prob);
    if (region.contains(Eigen::Vector2d(estimate.beta_hat.mean_photons,
                                        estimate.beta_hat.emitters_over_prob))) {
      ++inside;
    }
  }
  result.included_runs = static_cast<int>(m_hat.size());
  result.excluded_runs = runs - result.included_runs;
  result.emitters_stats = stats_of(m_hat);
  result.detection_stats = stats_of(p_hat);
  result.lambda_stats = stats_of(lambda_hat);
  result.xi_stats = stats_of(xi_hat);
  result.inside_ellipse_fraction =
      result.included_runs > 0
          ? static_cast<double>(inside) / static_cast<double>(result.included_runs)
          : kNaN;
  return result;
}

ScalingRow summarize(const EnsembleResult& ensemble) {
  ScalingRow row;
  row.nu = ensemble.nu;
  row.emitters_stats = ensemble.emitters_stats;
  row.detection_stats = ensemble.detection_stats;
  row.lambda_stats = ensemble.lambda_stats;
  row.xi_stats = ensemble.xi_stats;
  row.crlb_emitters = ensemble.crlb_theta.entries(0, 0);
  row.crlb_detection = ensemble.crlb_theta.entries(1, 1);
  row.crlb_lambda = ensemble.crlb_beta.entries(0, 0);
  row.crlb_xi = ensemble.crlb_beta.entries(1, 1);
  row.runs = ensemble.runs;
  row.included_runs = ensemble.included_runs;
  row.unidentifiable_runs = ensemble.unidentifiable_runs;
  row.inside_ellipse_fraction = ensemble.inside_ellipse_fraction;
  return row;
}

std::vector<ScalingRow> scaling_study(const EmitterModel& ground_truth,
                                      const std::vector<std::uint64_t>& nu_list, int runs,
                                      std::uint64_t master_seed, int threads,
                                      const MleOptions& mle_options) {
  if (nu_list.empty()) throw std::invalid_argument("scaling study needs at least one nu");
  for (std::size_t i = 0; i < nu_list.size(); ++i) {
    if (nu_list[i] < 1) throw std::invalid_argument("every nu must be at least 1");
    if (i > 0 && nu_list[i] <= nu_list[i - 1]) {
      throw std::invalid_argument("nu values must be strictly ascending");
    }
  }
  std::vector<ScalingRow> rows;
  rows.reserve(nu_list.size());
  for (std::size_t i = 0; i < nu_list.size(); ++i) {
    const std::uint64_t row_seed = derive_seed(master_seed, static_cast<std::uint64_t>(i));
    rows.push_back(summarize(
        run_ensemble(ground_truth, nu_list[i], runs, row_seed, threads, mle_options)));
  }
  return rows;
}

}  // namespace pnr
