#include "pnr/fisher.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pnr/errors.hpp"
#include "pnr/special_functions.hpp"

namespace pnr {

namespace {

constexpr double kUnderflowFloor = 1e-15;    // relative to the pmf peak
constexpr double kMaxConditionNumber = 1e12; // FIM invertibility gate

/// d/dm ln pmf(N | m, p) for the gamma-interpolated pmf; regular on the
/// whole continuous domain m > N - 1, including m = N.
double log_pmf_dm(int photons, double m, double p) {
  return digamma(m + 1.0) - digamma(m - photons + 1.0) + std::log1p(-p);
}

/// d/dp ln pmf(N | m, p), the textbook binomial score in p.
double log_pmf_dp(int photons, double m, double p) {
  return (static_cast<double>(photons) - m * p) / (p * (1.0 - p));
}

/// Largest photon number carrying probability under continuous emitter
/// count m: m itself when whole, floor(m) otherwise.
int support_max(double m) {
  const double rounded = std::round(m);
  if (std::abs(m - rounded) <= 1e-9 * std::max(1.0, m)) {
    return static_cast<int>(rounded);
  }
  return static_cast<int>(std::floor(m));
}

void require_interior_theta(double m, double p) {
  if (!(m >= 1.0) || !std::isfinite(m)) {
    throw std::invalid_argument("emitter count must be finite and at least 1, got " +
                                std::to_string(m));
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument(
        "Fisher quantities need an interior detection probability in (0, 1), got " +
        std::to_string(p));
  }
}

void require_interior_beta(const BrightnessModel& model) {
  model.validate();
  if (model.mean_photons == 0.0) {
    throw std::invalid_argument("Fisher quantities are undefined at zero brightness");
  }
  if (model.mean_photons == model.emitters_over_prob) {
    throw std::invalid_argument(
        "Fisher quantities are undefined at the lambda = xi boundary (p = 1)");
  }
}

struct Summand {
  double pmf = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Accumulates sum_N d_i d_j / f outward from the distribution mode,
/// dropping (and stopping at) terms whose pmf is below the underflow floor.
/// The pmf is unimodal in N, so both walks terminate without skipping any
/// term above the floor. Fixed evaluation order keeps results bit-stable.
template <typename Evaluator>
FisherMatrix accumulate_fim(const Evaluator& evaluate, int mode_hint, int highest,
                            Parameterization tag) {
  FisherMatrix result;
  result.parameterization = tag;

  const int start = std::min(std::max(mode_hint, 0), highest);
  const double peak = evaluate(start).pmf;
  const double floor = kUnderflowFloor * peak;

  double i11 = 0.0, i12 = 0.0, i22 = 0.0;
  int included_max = 0;
  for (int n = start; n >= 0; --n) {
    const Summand s = evaluate(n);
    if (!(s.pmf >= floor)) break;
    i11 += s.d1 * s.d1 / s.pmf;
    i12 += s.d1 * s.d2 / s.pmf;
    i22 += s.d2 * s.d2 / s.pmf;
    included_max = std::max(included_max, n);
  }
  for (int n = start + 1; n <= highest; ++n) {
    const Summand s = evaluate(n);
    if (!(s.pmf >= floor)) break;
    i11 += s.d1 * s.d1 / s.pmf;
    i12 += s.d1 * s.d2 / s.pmf;
    i22 += s.d2 * s.d2 / s.pmf;
    included_max = n;
  }

  result.entries << i11, i12, i12, i22;
  result.truncation = included_max;
  return result;
}

}  // namespace

double dpmf_dlambda(int photons, const BrightnessModel& model) {
  require_interior_beta(model);
  if (photons < 0) return 0.0;
  const double lambda = model.mean_photons;
  const double xi = model.emitters_over_prob;
  const double s = std::sqrt(lambda * xi);
  const double q = std::sqrt(lambda / xi);
  const double f = pmf_beta(photons, model);
  if (f == 0.0) return 0.0;  // beyond the support: pmf vanishes identically
  const double n = static_cast<double>(photons);
  const double ds = xi / (2.0 * s);  // ds/dlambda
  const double dq = 1.0 / (2.0 * s); // dq/dlambda
  const double bracket =
      ds * log_pmf_dm(photons, s, q) + dq * (n / q - (s - n) / (1.0 - q));
  return f * bracket;
}

double dpmf_dxi(int photons, const BrightnessModel& model) {
  require_interior_beta(model);
  if (photons < 0) return 0.0;
  const double lambda = model.mean_photons;
  const double xi = model.emitters_over_prob;
  const double s = std::sqrt(lambda * xi);
  const double q = std::sqrt(lambda / xi);
  const double f = pmf_beta(photons, model);
  if (f == 0.0) return 0.0;
  const double n = static_cast<double>(photons);
  const double ds = lambda / (2.0 * s); // ds/dxi
  const double dq = -q / (2.0 * xi);    // dq/dxi
  const double bracket =
      ds * log_pmf_dm(photons, s, q) + dq * (n / q - (s - n) / (1.0 - q));
  return f * bracket;
}

double dpmf_dm(int photons, const EmitterModel& model) {
  model.validate();
  require_interior_theta(static_cast<double>(model.emitters), model.detection_prob);
  if (photons < 0 || photons >= model.emitters) {
    throw std::domain_error("emitter-count derivative needs 0 <= N < M, got N = " +
                            std::to_string(photons) + ", M = " +
                            std::to_string(model.emitters));
  }
  const double m = static_cast<double>(model.emitters);
  const double f = pmf_theta(photons, model);
  return f * log_pmf_dm(photons, m, model.detection_prob);
}

double dpmf_dp(int photons, const EmitterModel& model) {
  model.validate();
  require_interior_theta(static_cast<double>(model.emitters), model.detection_prob);
  if (photons < 0 || photons > model.emitters) return 0.0;
  const double m = static_cast<double>(model.emitters);
  const double f = pmf_theta(photons, model);
  return f * log_pmf_dp(photons, m, model.detection_prob);
}

FisherMatrix fim_theta(double emitters, double detection_prob, int truncation) {
  require_interior_theta(emitters, detection_prob);
  const double m = emitters;
  const double p = detection_prob;
  const int highest =
      truncation >= 0 ? std::min(truncation, support_max(m)) : support_max(m);
  const int mode = static_cast<int>(std::floor((m + 1.0) * p));
  const auto evaluate = [m, p](int n) {
    Summand s;
    s.pmf = pmf_theta(n, m, p);
    if (s.pmf > 0.0) {
      s.d1 = s.pmf * log_pmf_dm(n, m, p);
      s.d2 = s.pmf * log_pmf_dp(n, m, p);
    }
    return s;
  };
  return accumulate_fim(evaluate, mode, highest, Parameterization::theta);
}

FisherMatrix fim(const EmitterModel& model, int truncation) {
  model.validate();
  return fim_theta(static_cast<double>(model.emitters), model.detection_prob, truncation);
}

FisherMatrix fim(const BrightnessModel& model, int truncation) {
  require_interior_beta(model);
  const double lambda = model.mean_photons;
  const double xi = model.emitters_over_prob;
  const double s = std::sqrt(lambda * xi);
  const double q = std::sqrt(lambda / xi);
  const int highest = truncation >= 0 ? std::min(truncation, support_max(s)) : support_max(s);
  const int mode = static_cast<int>(std::floor((s + 1.0) * q));
  const auto evaluate = [lambda, xi, s, q](int n) {
    Summand out;
    out.pmf = pmf_theta(n, s, q);
    if (out.pmf > 0.0) {
      const double nd = static_cast<double>(n);
      const double score_q = nd / q - (s - nd) / (1.0 - q);
      const double score_s = log_pmf_dm(n, s, q);
      out.d1 = out.pmf * (xi / (2.0 * s) * score_s + 1.0 / (2.0 * s) * score_q);
      out.d2 = out.pmf * (lambda / (2.0 * s) * score_s - q / (2.0 * xi) * score_q);
    }
    return out;
  };
  return accumulate_fim(evaluate, mode, highest, Parameterization::beta);
}

CovarianceMatrix crlb_from_fim(const FisherMatrix& information, std::uint64_t experiments) {
  if (experiments == 0) {
    throw std::invalid_argument("CRLB needs at least one experiment");
  }
  // The two parameters carry very different units, so the raw eigenvalue
  // ratio of the FIM is dominated by scale, not by actual degeneracy.
  // Equilibrate to [[1, r], [r, 1]] first: its condition (1+|r|)/(1-|r|)
  // measures score collinearity alone, and the inverse has a closed form
  // that avoids cancellation in the tiny determinant.
  const double i11 = information.entries(0, 0);
  const double i22 = information.entries(1, 1);
  const double i12 = information.entries(0, 1);
  if (!(i11 > 0.0) || !(i22 > 0.0)) {
    throw NumericalError("Fisher matrix has a non-positive diagonal; CRLB undefined");
  }
  const double r = i12 / std::sqrt(i11 * i22);
  const double condition =
      std::abs(r) < 1.0 ? (1.0 + std::abs(r)) / (1.0 - std::abs(r))
                        : std::numeric_limits<double>::infinity();
  if (condition > kMaxConditionNumber) {
    throw NumericalError("Fisher matrix is numerically singular (condition number " +
                         std::to_string(condition) + "); CRLB undefined");
  }
  const double slack = 1.0 - r * r;
  const double nu = static_cast<double>(experiments);
  CovarianceMatrix cov;
  cov.entries(0, 0) = 1.0 / (i11 * slack) / nu;
  cov.entries(1, 1) = 1.0 / (i22 * slack) / nu;
  cov.entries(0, 1) = -r / (std::sqrt(i11 * i22) * slack) / nu;
  cov.entries(1, 0) = cov.entries(0, 1);
  cov.experiments = experiments;
  cov.parameterization = information.parameterization;
  return cov;
}

CovarianceMatrix crlb(const EmitterModel& model, std::uint64_t experiments) {
  return crlb_from_fim(fim(model), experiments);
}

CovarianceMatrix crlb(const BrightnessModel& model, std::uint64_t experiments) {
  return crlb_from_fim(fim(model), experiments);
}

bool ConfidenceEllipse::contains(const Eigen::Vector2d& point) const {
  const Eigen::Vector2d d = point - center;
  const double mahalanobis = d.dot(covariance.inverse() * d);
  return mahalanobis <= chi_squared_quantile_2dof(coverage);
}

ConfidenceEllipse ellipse(const CovarianceMatrix& cov, const Eigen::Vector2d& center,
                          double coverage) {
  if (!(coverage >= 0.0 && coverage < 1.0)) {
    throw std::invalid_argument("coverage must lie in [0, 1), got " +
                                std::to_string(coverage));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(cov.entries);
  const double low = solver.eigenvalues()(0);
  const double high = solver.eigenvalues()(1);
  if (!(low > 0.0)) {
    throw NumericalError("covariance is not positive definite (smallest eigenvalue " +
                         std::to_string(low) + "); no confidence ellipse exists");
  }
  const double q = chi_squared_quantile_2dof(coverage);

  ConfidenceEllipse region;
  region.center = center;
  region.coverage = coverage;
  region.covariance = cov.entries;
  region.semi_major = std::sqrt(q * high);
  region.semi_minor = std::sqrt(q * low);
  const Eigen::Vector2d major_axis = solver.eigenvectors().col(1);
  double angle = std::atan2(major_axis.y(), major_axis.x());
  if (angle < -(std::numbers::pi / 2.0)) angle += std::numbers::pi;
  if (angle >= (std::numbers::pi / 2.0)) angle -= std::numbers::pi;
  region.orientation = angle;
  return region;
}

std::vector<Eigen::Vector2d> ellipse_boundary(const ConfidenceEllipse& region, int points) {
  if (points < 1) {
    throw std::invalid_argument("ellipse boundary needs at least one point");
  }
  const double c = std::cos(region.orientation);
  const double s = std::sin(region.orientation);
  std::vector<Eigen::Vector2d> boundary;
  boundary.reserve(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(points);
    const double u = region.semi_major * std::cos(t);
    const double v = region.semi_minor * std::sin(t);
    boundary.emplace_back(region.center.x() + c * u - s * v,
                          region.center.y() + s * u + c * v);
  }
  return boundary;
}

std::vector<Eigen::Vector2d> transform_beta_to_theta(const std::vector<Eigen::Vector2d>& points) {
  std::vector<Eigen::Vector2d> image;
  image.reserve(points.size());
  for (const auto& point : points) {
    const double lambda = point.x();
    const double xi = point.y();
    if (!(lambda > 0.0) || !(xi > 0.0)) {
      throw std::invalid_argument("brightness-space point must have positive coordinates");
    }
    if (lambda > xi) {
      throw std::invalid_argument(
          "brightness-space point implies detection probability above 1 (lambda = " +
          std::to_string(lambda) + " > xi = " + std::to_string(xi) + ")");
    }
    image.emplace_back(std::sqrt(lambda * xi), std::sqrt(lambda / xi));
  }
  return image;
}

}  // namespace pnr
