#include "pnr/photon_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pnr/random.hpp"
#include "pnr/special_functions.hpp"

namespace pnr {

namespace {

// Tolerance (relative to the value) for deciding that a continuous emitter
// count is actually a whole number.
constexpr double kIntegralTol = 1e-9;

bool nearly_integer(double x, double* rounded) {
  const double r = std::round(x);
  *rounded = r;
  return std::abs(x - r) <= kIntegralTol * std::max(1.0, std::abs(x));
}

}  // namespace

void EmitterModel::validate() const {
  if (emitters < 1) {
    throw std::invalid_argument("emitter count must be at least 1, got " +
                                std::to_string(emitters));
  }
  if (!(detection_prob >= 0.0 && detection_prob <= 1.0)) {
    throw std::invalid_argument("detection probability must lie in [0, 1], got " +
                                std::to_string(detection_prob));
  }
}

void BrightnessModel::validate() const {
  if (!(mean_photons >= 0.0) || !std::isfinite(mean_photons)) {
    throw std::invalid_argument("mean photon number must be finite and nonnegative, got " +
                                std::to_string(mean_photons));
  }
  if (!(emitters_over_prob > 0.0) || !std::isfinite(emitters_over_prob)) {
    throw std::invalid_argument("emitters/probability ratio must be finite and positive, got " +
                                std::to_string(emitters_over_prob));
  }
  if (mean_photons > emitters_over_prob) {
    throw std::invalid_argument(
        "implied detection probability sqrt(lambda/xi) exceeds 1 (lambda = " +
        std::to_string(mean_photons) + ", xi = " + std::to_string(emitters_over_prob) + ")");
  }
}

void PhotonHistogram::add(int photons, std::uint64_t occurrences) {
  if (photons < 0) {
    throw std::invalid_argument("photon number must be nonnegative, got " +
                                std::to_string(photons));
  }
  if (occurrences == 0) return;
  counts_[photons] += occurrences;
  experiments_ += occurrences;
}

int PhotonHistogram::max_photons() const {
  for (auto it = counts_.rbegin(); it != counts_.rend(); ++it) {
    if (it->second > 0) return it->first;
  }
  return -1;
}

double PhotonHistogram::sample_mean() const {
  if (experiments_ == 0) {
    throw std::logic_error("sample mean of an empty histogram is undefined");
  }
  long double weighted = 0.0L;
  for (const auto& [photons, count] : counts_) {
    weighted += static_cast<long double>(photons) * static_cast<long double>(count);
  }
  return static_cast<double>(weighted / static_cast<long double>(experiments_));
}

double pmf_theta(int photons, const EmitterModel& model) {
  model.validate();
  const std::int64_t m = model.emitters;
  const double p = model.detection_prob;
  if (photons < 0 || photons > m) return 0.0;
  if (p == 0.0) return photons == 0 ? 1.0 : 0.0;
  if (p == 1.0) return photons == m ? 1.0 : 0.0;
  const double md = static_cast<double>(m);
  const double n = static_cast<double>(photons);
  if (photons == 0) return std::exp(md * std::log1p(-p));
  if (photons == m) return std::pow(p, n);
  return std::exp(log_binomial_pmf(n, md, p));
}

double pmf_theta(int photons, double emitters, double detection_prob) {
  if (!(emitters > 0.0) || !std::isfinite(emitters)) {
    throw std::invalid_argument("continuous emitter count must be finite and positive, got " +
                                std::to_string(emitters));
  }
  if (!(detection_prob >= 0.0 && detection_prob <= 1.0)) {
    throw std::invalid_argument("detection probability must lie in [0, 1], got " +
                                std::to_string(detection_prob));
  }
  if (photons < 0) return 0.0;
  const double n = static_cast<double>(photons);
  const double p = detection_prob;

  // Support: N < M always contributes; N = M only when M is a whole number.
  double rounded = 0.0;
  const bool integral = nearly_integer(emitters, &rounded);
  if (integral && static_cast<double>(photons) == rounded) {
    return p == 0.0 ? (photons == 0 ? 1.0 : 0.0) : std::pow(p, n);
  }
  if (n >= emitters) return 0.0;

  if (p == 0.0) return photons == 0 ? 1.0 : 0.0;
  if (p == 1.0) return 0.0;  // all mass sits on N = M, handled above
  if (photons == 0) return std::exp(emitters * std::log1p(-p));
  return std::exp(log_binomial_pmf(n, emitters, p));
}

double pmf_beta(int photons, const BrightnessModel& model) {
  model.validate();
  if (photons < 0) return 0.0;
  if (model.mean_photons == 0.0) return photons == 0 ? 1.0 : 0.0;
  const double emitters = std::sqrt(model.mean_photons * model.emitters_over_prob);
  const double prob = std::sqrt(model.mean_photons / model.emitters_over_prob);
  return pmf_theta(photons, emitters, std::min(prob, 1.0));
}

double pmf_poisson(int photons, double mean_photons) {
  if (!(mean_photons >= 0.0) || !std::isfinite(mean_photons)) {
    throw std::invalid_argument("Poisson mean must be finite and nonnegative, got " +
                                std::to_string(mean_photons));
  }
  if (photons < 0) return 0.0;
  if (mean_photons == 0.0) return photons == 0 ? 1.0 : 0.0;
  const double n = static_cast<double>(photons);
  return std::exp(n * std::log(mean_photons) - mean_photons - log_factorial(n));
}

BrightnessModel to_beta(const EmitterModel& model) {
  model.validate();
  if (model.detection_prob == 0.0) {
    throw std::invalid_argument(
        "detection probability 0 has no brightness-space image (xi diverges)");
  }
  const double m = static_cast<double>(model.emitters);
  return BrightnessModel{m * model.detection_prob, m / model.detection_prob};
}

EmitterModel ThetaFromBeta::rounded() const {
  if (!integral) {
    throw std::domain_error("emitter count " + std::to_string(emitters) +
                            " is not a whole number; no exact integer model exists");
  }
  EmitterModel model{static_cast<std::int64_t>(std::llround(emitters)), detection_prob};
  model.validate();
  return model;
}

ThetaFromBeta to_theta(const BrightnessModel& model) {
  model.validate();
  if (model.mean_photons == 0.0) {
    throw std::invalid_argument(
        "zero brightness leaves the emitter count unidentified; cannot invert");
  }
  ThetaFromBeta result;
  const double s = std::sqrt(model.mean_photons * model.emitters_over_prob);
  double rounded = 0.0;
  result.integral = nearly_integer(s, &rounded) && rounded >= 1.0;
  if (result.integral) {
    // Snap to the integer and recover p by exact division so that
    // to_theta(to_beta(model)) reproduces the original pair bit for bit.
    result.emitters = rounded;
    result.detection_prob = std::min(model.mean_photons / rounded, 1.0);
  } else {
    result.emitters = s;
    result.detection_prob = std::min(std::sqrt(model.mean_photons / model.emitters_over_prob), 1.0);
  }
  return result;
}

Moments moments(const EmitterModel& model) {
  model.validate();
  const double m = static_cast<double>(model.emitters);
  const double p = model.detection_prob;
  return Moments{m * p, m * p * (1.0 - p)};
}

double g2_zero(std::int64_t emitters) {
  if (emitters < 1) {
    throw std::invalid_argument("emitter count must be at least 1, got " +
                                std::to_string(emitters));
  }
  return 1.0 - 1.0 / static_cast<double>(emitters);
}

PhotonHistogram sample_histogram(const EmitterModel& model, std::uint64_t experiments,
                                 std::uint64_t seed) {
  model.validate();
  PhotonHistogram histogram;
  for (std::uint64_t i = 0; i < experiments; ++i) {
    CounterRng rng(seed, i);
    const std::int64_t draw = sample_binomial(rng, model.emitters, model.detection_prob);
    histogram.add(static_cast<int>(draw));
  }
  return histogram;
}

}  // namespace pnr
