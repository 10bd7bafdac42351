#include "pnr/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pnr/errors.hpp"
#include "pnr/special_functions.hpp"

namespace pnr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// ln pmf_theta computed directly in log space, so deep tails do not get
/// clipped to -inf by double underflow of the pmf itself.
double log_pmf(int photons, std::int64_t emitters, double p) {
  if (photons < 0 || photons > emitters) return kNegInf;
  if (p == 0.0) return photons == 0 ? 0.0 : kNegInf;
  if (p == 1.0) return photons == emitters ? 0.0 : kNegInf;
  const double m = static_cast<double>(emitters);
  const double n = static_cast<double>(photons);
  if (photons == 0) return m * std::log1p(-p);
  if (photons == emitters) return n * std::log(p);
  return log_binomial_pmf(n, m, p);
}

double log_pmf_continuous(int photons, double emitters, double p) {
  const double n = static_cast<double>(photons);
  if (photons < 0) return kNegInf;
  const double rounded = std::round(emitters);
  const bool integral = std::abs(emitters - rounded) <= 1e-9 * std::max(1.0, emitters);
  if (integral && n == rounded) {
    return p == 0.0 ? (photons == 0 ? 0.0 : kNegInf) : n * std::log(p);
  }
  if (n >= emitters) return kNegInf;
  if (p == 0.0) return photons == 0 ? 0.0 : kNegInf;
  if (p == 1.0) return kNegInf;
  if (photons == 0) return emitters * std::log1p(-p);
  return log_binomial_pmf(n, emitters, p);
}

void require_data(const PhotonHistogram& data) {
  if (data.empty()) {
    throw std::invalid_argument("log-likelihood of an empty histogram is undefined");
  }
}

}  // namespace

double log_likelihood(const PhotonHistogram& data, const EmitterModel& model) {
  model.validate();
  require_data(data);
  long double total = 0.0L;
  for (const auto& [photons, count] : data.counts()) {
    const double term = log_pmf(photons, model.emitters, model.detection_prob);
    if (term == kNegInf) return kNegInf;
    total += static_cast<long double>(count) * term;
  }
  return static_cast<double>(total);
}

double log_likelihood(const PhotonHistogram& data, double emitters, double detection_prob) {
  if (!(emitters > 0.0) || !std::isfinite(emitters)) {
    throw std::invalid_argument("continuous emitter count must be finite and positive, got " +
                                std::to_string(emitters));
  }
  if (!(detection_prob >= 0.0 && detection_prob <= 1.0)) {
    throw std::invalid_argument("detection probability must lie in [0, 1], got " +
                                std::to_string(detection_prob));
  }
  require_data(data);
  long double total = 0.0L;
  for (const auto& [photons, count] : data.counts()) {
    const double term = log_pmf_continuous(photons, emitters, detection_prob);
    if (term == kNegInf) return kNegInf;
    total += static_cast<long double>(count) * term;
  }
  return static_cast<double>(total);
}

EstimationResult mle(const PhotonHistogram& data, const MleOptions& options) {
  if (data.empty()) {
    throw UnidentifiableDataError("cannot estimate from an empty histogram");
  }
  const int max_photons = data.max_photons();
  if (max_photons == 0) {
    throw UnidentifiableDataError(
        "no photon was ever detected: the emitter count is unidentifiable");
  }
  const double sample_mean = data.sample_mean();

  const std::int64_t scan_min = max_photons;
  const std::int64_t scan_max =
      options.max_emitters > 0
          ? options.max_emitters
          : std::max<std::int64_t>(10000, 100 * static_cast<std::int64_t>(max_photons));
  if (scan_max < scan_min) {
    throw std::invalid_argument("search ceiling " + std::to_string(scan_max) +
                                " lies below the largest observed photon count " +
                                std::to_string(scan_min));
  }

  EstimationResult result;
  result.scan_min = scan_min;
  result.scan_max = scan_max;
  if (options.keep_profile) {
    result.profile.reserve(static_cast<std::size_t>(scan_max - scan_min + 1));
  }

  std::int64_t best_m = scan_min;
  double best_p = 0.0;
  double best_ll = kNegInf;
  for (std::int64_t m = scan_min; m <= scan_max; ++m) {
    const double p = std::min(sample_mean / static_cast<double>(m), 1.0);
    long double total = 0.0L;
    for (const auto& [photons, count] : data.counts()) {
      total += static_cast<long double>(count) * log_pmf(photons, m, p);
    }
    const double ll = static_cast<double>(total);
    if (options.keep_profile) result.profile.push_back({m, p, ll});
    if (ll > best_ll) {  // strict: ties stay with the smaller M
      best_ll = ll;
      best_m = m;
      best_p = p;
    }
  }

  result.theta_hat = EmitterModel{best_m, best_p};
  result.beta_hat = to_beta(result.theta_hat);
  result.log_likelihood = best_ll;
  result.converged = best_m < scan_max;
  return result;
}

}  // namespace pnr
