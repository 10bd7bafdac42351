#pragma once

#include <cstdint>
#include <vector>

#include "pnr/photon_model.hpp"

namespace pnr {

struct MleOptions {
  /// Upper end of the integer emitter scan. 0 selects the default ceiling
  /// max(10^4, 100 * max observed photon number).
  std::int64_t max_emitters = 0;
  /// Record the profiled likelihood at every candidate M (off by default:
  /// the profile can hold thousands of points).
  bool keep_profile = false;
};

/// One point of the profile likelihood: the candidate M, its closed-form
/// inner maximizer p = sample mean / M, and the profiled log-likelihood.
struct ProfilePoint {
  std::int64_t emitters = 0;
  double detection_prob = 0.0;
  double log_likelihood = 0.0;
};

struct EstimationResult {
  EmitterModel theta_hat;
  BrightnessModel beta_hat;  // always to_beta(theta_hat)
  double log_likelihood = 0.0;
  /// False when the maximum sits on the scan ceiling: the profiled likelihood
  /// may still be climbing toward its Poisson plateau and the reported M is a
  /// lower bound, not a resolved estimate.
  bool converged = false;
  std::int64_t scan_min = 0;
  std::int64_t scan_max = 0;
  std::vector<ProfilePoint> profile;  // nonempty only with keep_profile
};

/// Joint log-likelihood of the histogram under (M, p), in nats. Returns
/// -infinity when the model assigns probability zero to any observed bin
/// (N > M, or p in {0, 1} contradicting the data). Throws on empty data.
double log_likelihood(const PhotonHistogram& data, const EmitterModel& model);

/// Continuous-M extension of the log-likelihood (gamma interpolation).
double log_likelihood(const PhotonHistogram& data, double emitters, double detection_prob);

/// Joint MLE by profile likelihood: for each integer M from the largest
/// observed photon number up to the ceiling, the inner maximizer over p is
/// the closed-form binomial MLE p(M) = sample mean / M; the outer scan keeps
/// the best M, ties broken toward smaller M.
///
/// Throws UnidentifiableDataError when the histogram is empty or no photon
/// was ever detected, and std::invalid_argument when the ceiling lies below
/// the largest observed photon number.
EstimationResult mle(const PhotonHistogram& data, const MleOptions& options = {});

}  // namespace pnr
