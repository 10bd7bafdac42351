#pragma once

#include <cstdint>
#include <vector>

#include "pnr/photon_model.hpp"

namespace pnr {

struct PlannedExperiments {
  /// The smooth solution of C_MM(theta)/nu = target * M.
  double exact = 0.0;
  /// ceil(exact): the smallest integer experiment count meeting the target.
  std::uint64_t count = 0;
};

/// Smallest nu for which the CRLB variance of M after nu experiments drops
/// to target * M (the relative-variance criterion Var[M]/M = target).
/// Throws NumericalError when the FIM at the point is singular.
PlannedExperiments experiments_needed(const EmitterModel& model, double target);

/// Continuous-M variant for grid and contour evaluation.
PlannedExperiments experiments_needed(double emitters, double detection_prob, double target);

struct ContourPoint {
  double emitters = 0.0;
  double detection_prob = 0.0;
  double nu_exact = 0.0;
};

struct Contour {
  double mean_photons = 0.0;  // the fixed lambda = M p along this contour
  std::vector<ContourPoint> points;
};

struct PlanGridOptions {
  double m_min = 2.0;
  double m_max = 2000.0;
  double p_min = 1e-3;
  double p_max = 0.999;
  int m_resolution = 50;
  int p_resolution = 50;
  /// Fixed-brightness contours to trace along p = lambda/M over the M axis.
  std::vector<double> contour_lambdas = {5.0, 10.0, 20.0, 50.0};
};

struct PlanGrid {
  std::vector<double> m_axis;  // log-spaced emitter counts
  std::vector<double> p_axis;  // log-spaced detection probabilities
  /// nu_exact[i][j] for (m_axis[i], p_axis[j]); NaN marks a point where the
  /// FIM was numerically singular (degenerate corner), not an abort.
  std::vector<std::vector<double>> nu_exact;
  double target = 0.0;
  std::vector<Contour> contours;
};

/// Experiments-needed surface over a log-spaced (M, p) grid, with
/// fixed-lambda contour profiles extracted along p = lambda/M.
PlanGrid plan_grid(const PlanGridOptions& options, double target);

/// nu(M) along the fixed-brightness line p = lambda/M. Every sampled M must
/// be at least lambda (p would exceed 1 otherwise); p is clamped just below
/// 1 at the M = lambda endpoint.
std::vector<ContourPoint> contour_profile(double mean_photons,
                                          const std::vector<double>& m_samples,
                                          double target);

/// Total acquisition time in seconds: nu experiments at one pulse each.
double acquisition_time(double experiments, double pulse_period_seconds);

}  // namespace pnr
