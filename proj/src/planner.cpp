#include "pnr/planner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pnr/errors.hpp"
#include "pnr/fisher.hpp"

namespace pnr {

namespace {

// Contour samples at M = lambda imply p = 1, where the FIM degenerates;
// evaluate just inside the boundary instead.
constexpr double kProbCeiling = 1.0 - 1e-6;

// ceil() of experiment counts must stay representable; the criterion can
// explode near degenerate corners before the FIM gate trips.
constexpr double kMaxCount = 9.0e18;

std::vector<double> log_spaced(double low, double high, int points) {
  std::vector<double> axis;
  axis.reserve(static_cast<std::size_t>(points));
  if (points == 1) {
    axis.push_back(low);
    return axis;
  }
  const double log_low = std::log(low);
  const double step = (std::log(high) - log_low) / static_cast<double>(points - 1);
  for (int i = 0; i < points; ++i) {
    axis.push_back(std::exp(log_low + step * static_cast<double>(i)));
  }
  axis.front() = low;
  axis.back() = high;
  return axis;
}

}  // namespace

PlannedExperiments experiments_needed(double emitters, double detection_prob, double target) {
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw std::invalid_argument("relative-variance target must be positive, got " +
                                std::to_string(target));
  }
  const CovarianceMatrix per_experiment = crlb_from_fim(fim_theta(emitters, detection_prob), 1);
  const double c_mm = per_experiment.entries(0, 0);
  const double exact = c_mm / (target * emitters);
  if (!(exact < kMaxCount)) {
    throw NumericalError("required experiment count " + std::to_string(exact) +
                         " is beyond representable range");
  }
  PlannedExperiments planned;
  planned.exact = exact;
  planned.count = static_cast<std::uint64_t>(std::ceil(exact));
  if (planned.count == 0) planned.count = 1;
  return planned;
}

PlannedExperiments experiments_needed(const EmitterModel& model, double target) {
  model.validate();
  return experiments_needed(static_cast<double>(model.emitters), model.detection_prob, target);
}

std::vector<ContourPoint> contour_profile(double mean_photons,
                                          const std::vector<double>& m_samples,
                                          double target) {
  if (!(mean_photons > 0.0)) {
    throw std::invalid_argument("contour brightness must be positive, got " +
                                std::to_string(mean_photons));
  }
  std::vector<ContourPoint> profile;
  profile.reserve(m_samples.size());
  for (double m : m_samples) {
    if (m < mean_photons) {
      throw std::invalid_argument("contour sample M = " + std::to_string(m) +
                                  " lies below lambda = " + std::to_string(mean_photons) +
                                  " (detection probability would exceed 1)");
    }
    const double p = std::min(mean_photons / m, kProbCeiling);
    profile.push_back({m, p, experiments_needed(m, p, target).exact});
  }
  return profile;
}

PlanGrid plan_grid(const PlanGridOptions& options, double target) {
  if (!(options.m_min >= 2.0) || !(options.m_max <= 1e4) || !(options.m_min <= options.m_max)) {
    throw std::invalid_argument("emitter range must satisfy 2 <= M_min <= M_max <= 10^4");
  }
  if (!(options.p_min > 0.0) || !(options.p_max < 1.0) || !(options.p_min <= options.p_max)) {
    throw std::invalid_argument("probability range must satisfy 0 < p_min <= p_max < 1");
  }
  if (options.m_resolution < 1 || options.p_resolution < 1) {
    throw std::invalid_argument("grid resolution must be at least 1 in each axis");
  }
  if (!(target > 0.0)) {
    throw std::invalid_argument("relative-variance target must be positive");
  }

  PlanGrid grid;
  grid.target = target;
  grid.m_axis = log_spaced(options.m_min, options.m_max, options.m_resolution);
  grid.p_axis = log_spaced(options.p_min, options.p_max, options.p_resolution);
  grid.nu_exact.assign(grid.m_axis.size(),
                       std::vector<double>(grid.p_axis.size(),
                                           std::numeric_limits<double>::quiet_NaN()));
  for (std::size_t i = 0; i < grid.m_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.p_axis.size(); ++j) {
      try {
        grid.nu_exact[i][j] = experiments_needed(grid.m_axis[i], grid.p_axis[j], target).exact;
      } catch (const NumericalError&) {
        // degenerate corner: left as a missing value
      }
    }
  }

  for (double lambda : options.contour_lambdas) {
    Contour contour;
    contour.mean_photons = lambda;
    for (double m : grid.m_axis) {
      if (m < lambda) continue;
      const double p = std::min(lambda / m, kProbCeiling);
      try {
        contour.points.push_back({m, p, experiments_needed(m, p, target).exact});
      } catch (const NumericalError&) {
        // skip degenerate contour samples for the same reason as grid cells
      }
    }
    if (!contour.points.empty()) grid.contours.push_back(std::move(contour));
  }
  return grid;
}

double acquisition_time(double experiments, double pulse_period_seconds) {
  if (!(experiments > 0.0)) {
    throw std::invalid_argument("experiment count must be positive, got " +
                                std::to_string(experiments));
  }
  if (!(pulse_period_seconds > 0.0)) {
    throw std::invalid_argument("pulse period must be positive, got " +
                                std::to_string(pulse_period_seconds));
  }
  return experiments * pulse_period_seconds;
}

}  // namespace pnr
