#include "pnr/random.hpp"

#include <cmath>
#include <stdexcept>

#include "pnr/special_functions.hpp"

namespace pnr {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : state_(mix64(mix64(seed + kGolden) + (stream + 1) * kGolden)) {}

std::uint64_t CounterRng::next() {
  state_ += kGolden;
  return mix64(state_);
}

double CounterRng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(mix64(master_seed + kGolden) + (index + 1) * kGolden);
}

namespace {

// Inversion by sequential CDF walk; requires trials * prob modest.
std::int64_t binomial_inversion(CounterRng& rng, std::int64_t trials, double prob) {
  const double ratio = prob / (1.0 - prob);
  for (;;) {
    double u = rng.uniform();
    double pk = std::exp(static_cast<double>(trials) * std::log1p(-prob));
    std::int64_t k = 0;
    while (u > pk) {
      u -= pk;
      ++k;
      if (k > trials) break;  // guard against accumulated round-off in the tail
      pk *= ratio * static_cast<double>(trials - k + 1) / static_cast<double>(k);
    }
    if (k <= trials) return k;
  }
}

// Transformed rejection with a squeeze (Hormann's BTRS layout). The fast
// path accepts without evaluating the pmf; the slow path tests the exact
// log pmf ratio against the envelope, so the sampler is exact.
std::int64_t binomial_btrs(CounterRng& rng, std::int64_t trials, double prob) {
  const double n = static_cast<double>(trials);
  const double spq = std::sqrt(n * prob * (1.0 - prob));
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * prob;
  const double c = n * prob + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double log_ratio = std::log(prob / (1.0 - prob));
  const double mode = std::floor((n + 1.0) * prob);
  const double log_pmf_mode = log_factorial(mode) + log_factorial(n - mode);

  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + c);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || kf > n) continue;
    // Exact acceptance: log of the envelope height vs log f(k) - log f(mode).
    const double lhs = std::log(v * alpha / (a / (us * us) + b));
    const double rhs = log_pmf_mode - log_factorial(kf) - log_factorial(n - kf) +
                       (kf - mode) * log_ratio;
    if (lhs <= rhs) return static_cast<std::int64_t>(kf);
  }
}

}  // namespace

std::int64_t sample_binomial(CounterRng& rng, std::int64_t trials, double prob) {
  if (trials < 0 || !(prob >= 0.0) || !(prob <= 1.0))
    throw std::invalid_argument("sample_binomial: need trials >= 0 and prob in [0,1]");
  if (trials == 0 || prob == 0.0) return 0;
  if (prob == 1.0) return trials;

  const bool flipped = prob > 0.5;
  const double q = flipped ? 1.0 - prob : prob;
  const std::int64_t k = (static_cast<double>(trials) * q <= 30.0)
                             ? binomial_inversion(rng, trials, q)
                             : binomial_btrs(rng, trials, q);
  return flipped ? trials - k : k;
}

}  // namespace pnr
