#pragma once

#include <cstdint>
#include <map>

namespace pnr {

/// Ground-truth or estimated parameter pair: M identical emitters, each with
/// per-pulse detection probability p.
struct EmitterModel {
  std::int64_t emitters = 1;    // M >= 1
  double detection_prob = 0.0;  // p in [0, 1]

  /// Throws std::invalid_argument if M < 1 or p outside [0, 1].
  void validate() const;
};

/// Reparameterized pair: lambda = M p (mean detected photons per experiment)
/// and xi = M / p. Brightness is directly observable; the M/p split is not.
struct BrightnessModel {
  double mean_photons = 0.0;       // lambda >= 0
  double emitters_over_prob = 1.0; // xi > 0

  /// Throws std::invalid_argument on lambda < 0, xi <= 0, or implied p > 1.
  void validate() const;
};

/// Aggregated outcome of nu experiments: occurrence count per photon number.
class PhotonHistogram {
 public:
  PhotonHistogram() = default;

  void add(int photons, std::uint64_t occurrences = 1);

  const std::map<int, std::uint64_t>& counts() const { return counts_; }
  std::uint64_t experiments() const { return experiments_; }
  bool empty() const { return experiments_ == 0; }

  /// Largest photon number with a nonzero count; -1 for an empty histogram.
  int max_photons() const;

  double sample_mean() const;

 private:
  std::map<int, std::uint64_t> counts_;
  std::uint64_t experiments_ = 0;
};

/// Binomial probability of detecting `photons` of M possible, evaluated via
/// log-gamma so it stays finite up to M ~ 1e6. Exactly 0 beyond the support.
double pmf_theta(int photons, const EmitterModel& model);

/// Continuous extension of pmf_theta in the emitter count (factorials through
/// the gamma function). Agrees with the integer form when `emitters` is whole.
double pmf_theta(int photons, double emitters, double detection_prob);

/// The same distribution in the (lambda, xi) parameterization.
double pmf_beta(int photons, const BrightnessModel& model);

/// Poisson pmf, the M -> infinity limit at fixed lambda.
double pmf_poisson(int photons, double mean_photons);

/// (M, p) -> (lambda, xi). Undefined at p = 0 (xi diverges); throws there.
BrightnessModel to_beta(const EmitterModel& model);

/// Result of inverting (lambda, xi): the continuous pair sqrt(lambda xi),
/// sqrt(lambda/xi), plus whether the emitter count is whole (within 1e-9).
struct ThetaFromBeta {
  double emitters = 0.0;
  double detection_prob = 0.0;
  bool integral = false;

  /// The exact integer model. Throws std::domain_error unless `integral`.
  EmitterModel rounded() const;
};

ThetaFromBeta to_theta(const BrightnessModel& model);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Binomial moments: mean M p, variance M p (1 - p).
Moments moments(const EmitterModel& model);

/// Zero-delay second-order correlation baseline for M equal emitters.
double g2_zero(std::int64_t emitters);

/// nu independent draws from pmf_theta, aggregated. Each experiment draws
/// from its own counter-based stream keyed by (seed, experiment index), so
/// the result is reproducible and independent of any work partitioning.
PhotonHistogram sample_histogram(const EmitterModel& model, std::uint64_t experiments,
                                 std::uint64_t seed);

}  // namespace pnr
