#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pnr/photon_model.hpp"

namespace pnr {

enum class Parameterization { theta, beta };

/// Partial derivatives of the gamma-interpolated pmf. All are exact closed
/// forms (digamma where the emitter count varies) and agree with central
/// finite differences of the pmf at interior parameter points. Photon numbers
/// beyond the support return 0 (the pmf vanishes identically there).
double dpmf_dlambda(int photons, const BrightnessModel& model);
double dpmf_dxi(int photons, const BrightnessModel& model);
double dpmf_dm(int photons, const EmitterModel& model);
double dpmf_dp(int photons, const EmitterModel& model);

struct FisherMatrix {
  Eigen::Matrix2d entries = Eigen::Matrix2d::Zero();
  Parameterization parameterization = Parameterization::theta;
  /// Largest photon number actually included in the summation.
  int truncation = 0;
};

/// Per-experiment Fisher Information. Each element is
///   sum_N (d pmf / d param_i)(d pmf / d param_j) / pmf,
/// summed outward from the distribution mode and truncated once the pmf
/// falls below 1e-15 of its peak (or the support ends). A nonnegative
/// `truncation` caps the summation at that photon number instead.
FisherMatrix fim(const EmitterModel& model, int truncation = -1);
FisherMatrix fim(const BrightnessModel& model, int truncation = -1);

/// Continuous-M variant used by the planner's parameter-space maps.
FisherMatrix fim_theta(double emitters, double detection_prob, int truncation = -1);

struct CovarianceMatrix {
  Eigen::Matrix2d entries = Eigen::Matrix2d::Zero();
  std::uint64_t experiments = 1;  // the nu this covariance corresponds to
  Parameterization parameterization = Parameterization::theta;
};

/// Cramer-Rao lower bound for nu experiments: C_nu = I^{-1} / nu at the
/// supplied ground truth. Throws NumericalError when the FIM is singular
/// (condition number above 1e12).
CovarianceMatrix crlb(const EmitterModel& model, std::uint64_t experiments);
CovarianceMatrix crlb(const BrightnessModel& model, std::uint64_t experiments);
CovarianceMatrix crlb_from_fim(const FisherMatrix& information, std::uint64_t experiments);

struct ConfidenceEllipse {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double orientation = 0.0;  // angle of the major axis, radians in [-pi/2, pi/2)
  double coverage = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // the C_nu it was built from

  /// True iff (x - center)^T C_nu^{-1} (x - center) <= chi-square quantile.
  bool contains(const Eigen::Vector2d& point) const;
};

/// Confidence region of the given coverage (in [0, 1)) for an asymptotically
/// normal estimator with covariance cov: semi-axes sqrt(q * eigenvalue) with
/// q = -2 ln(1 - coverage), the chi-square(2 dof) quantile. Coverage 0 gives
/// the degenerate point ellipse. Throws NumericalError when cov is not
/// positive definite.
ConfidenceEllipse ellipse(const CovarianceMatrix& cov, const Eigen::Vector2d& center,
                          double coverage);

/// Evenly spaced points (by angle) on the ellipse boundary.
std::vector<Eigen::Vector2d> ellipse_boundary(const ConfidenceEllipse& region, int points);

/// Pointwise map of brightness-space points (lambda, xi) to emitter space
/// (sqrt(lambda xi), sqrt(lambda/xi)). The image of an ellipse is a bent,
/// non-elliptical region. Throws std::invalid_argument when a point implies
/// a detection probability above 1 (lambda > xi).
std::vector<Eigen::Vector2d> transform_beta_to_theta(const std::vector<Eigen::Vector2d>& points);

}  // namespace pnr
