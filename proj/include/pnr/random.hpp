#pragma once

#include <cstdint>

namespace pnr {

/// Counter-based uniform generator: the state is a pure function of
/// (seed, stream), so stream s of seed k yields the same sequence no matter
/// which thread or process draws it. One stream per experiment gives
/// bit-identical aggregates under any work partitioning.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  /// Next raw 64-bit value.
  std::uint64_t next();

  /// Uniform double in [0, 1).
  double uniform();

 private:
  std::uint64_t state_;
};

/// Stable sub-seed for run/row `index` of a master seed. Distinct indices
/// give distinct, well-mixed seeds.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

/// One binomial draw Bin(trials, prob) from `rng`. Inversion when the
/// smaller-tail mean is at most 30, transformed rejection (BTRS) above.
std::int64_t sample_binomial(CounterRng& rng, std::int64_t trials, double prob);

}  // namespace pnr
