#pragma once

#include <cstdint>
#include <vector>

#include "pnr/estimation.hpp"
#include "pnr/fisher.hpp"
#include "pnr/photon_model.hpp"

namespace pnr {

struct ParameterStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased (divisor n-1); NaN when n < 2
};

struct EnsembleResult {
  EmitterModel ground_truth;
  std::uint64_t nu = 0;  // experiments per run
  int runs = 0;

  /// One entry per run that produced an estimate (identifiable data); runs
  /// whose histogram contained no photons at all are only counted below.
  std::vector<EstimationResult> estimates;
  int unidentifiable_runs = 0;
  /// Runs excluded from the statistics: unidentifiable ones plus estimates
  /// that ended on the scan ceiling (converged == false).
  int excluded_runs = 0;
  int included_runs = 0;

  ParameterStats emitters_stats;   // M-hat
  ParameterStats detection_stats;  // p-hat
  ParameterStats lambda_stats;     // lambda-hat = M-hat * p-hat
  ParameterStats xi_stats;         // xi-hat = M-hat / p-hat

  CovarianceMatrix crlb_theta;  // C_nu at the ground truth, (M, p)
  CovarianceMatrix crlb_beta;   // C_nu at the ground truth, (lambda, xi)

  /// Fraction of included beta-hat falling inside the 95% CRLB ellipse
  /// centered on the true (lambda, xi). NaN when nothing was included.
  double inside_ellipse_fraction = 0.0;
};

/// Samples `runs` independent synthetic datasets of nu experiments each
/// (run seeds derived from the master seed by run index), estimates each by
/// profile-likelihood MLE, and aggregates sample statistics in both
/// parameterizations. Deterministic for fixed inputs regardless of the
/// thread count (threads = 0 picks the hardware concurrency).
EnsembleResult run_ensemble(const EmitterModel& ground_truth, std::uint64_t nu, int runs,
                            std::uint64_t master_seed, int threads = 0,
                            const MleOptions& mle_options = {});

/// One row of the variance-versus-nu scaling table.
struct ScalingRow {
  std::uint64_t nu = 0;
  ParameterStats emitters_stats, detection_stats, lambda_stats, xi_stats;
  double crlb_emitters = 0.0, crlb_detection = 0.0;  // CRLB diagonals at this nu
  double crlb_lambda = 0.0, crlb_xi = 0.0;
  int runs = 0;
  int included_runs = 0;
  int unidentifiable_runs = 0;
  double inside_ellipse_fraction = 0.0;
};

ScalingRow summarize(const EnsembleResult& ensemble);

/// Runs one ensemble per nu (ascending) and tabulates sample variances next
/// to the CRLB diagonals — the data behind the variance-scaling curves.
/// Each row draws from its own seed derived from the master by row index.
std::vector<ScalingRow> scaling_study(const EmitterModel& ground_truth,
                                      const std::vector<std::uint64_t>& nu_list, int runs,
                                      std::uint64_t master_seed, int threads = 0,
                                      const MleOptions& mle_options = {});

}  // namespace pnr
