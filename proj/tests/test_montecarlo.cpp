#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pnr/errors.hpp"
#include "pnr/montecarlo.hpp"

#include "test_support.hpp"

using namespace pnr;
using pnr::test::rel_error;

TEST_SUITE_BEGIN("montecarlo");

TEST_CASE("ensembles are reproducible and thread-count invariant") {
  const EmitterModel truth{40, 0.2};
  const EnsembleResult st = run_ensemble(truth, 300, 24, 13579, 1);
  const EnsembleResult mt = run_ensemble(truth, 300, 24, 13579, 3);

  REQUIRE(st.estimates.size() == mt.estimates.size());
  for (std::size_t i = 0; i < st.estimates.size(); ++i) {
    CHECK(st.estimates[i].theta_hat.emitters == mt.estimates[i].theta_hat.emitters);
    CHECK(st.estimates[i].theta_hat.detection_prob ==
          mt.estimates[i].theta_hat.detection_prob);
  }
  CHECK(st.emitters_stats.mean == mt.emitters_stats.mean);
  CHECK(st.emitters_stats.variance == mt.emitters_stats.variance);
  CHECK(st.lambda_stats.variance == mt.lambda_stats.variance);
  CHECK(st.inside_ellipse_fraction == mt.inside_ellipse_fraction);

  // A different master seed must change the draws.
  const EnsembleResult other = run_ensemble(truth, 300, 24, 13580, 1);
  CHECK(other.lambda_stats.mean != st.lambda_stats.mean);
}

TEST_CASE("bookkeeping invariants hold run by run") {
  const EnsembleResult r = run_ensemble(EmitterModel{3, 0.35}, 40, 60, 2468, 2);
  CHECK(r.runs == 60);
  CHECK(r.estimates.size() + static_cast<std::size_t>(r.unidentifiable_runs) == 60);
  CHECK(r.included_runs + r.excluded_runs == 60);
  int ceiling_hits = 0;
  for (const auto& est : r.estimates) {
    if (!est.converged) {
      ++ceiling_hits;
    }
  }
  CHECK(r.excluded_runs == r.unidentifiable_runs + ceiling_hits);
  CHECK(r.nu == 40);
  CHECK(r.ground_truth.emitters == 3);
}

TEST_CASE("a nearly dark source yields unidentifiable runs") {
  // With nu = 3 and p = 0.01, many histograms contain zero photons; those
  // runs must be counted, not crash the ensemble.
  const EnsembleResult r = run_ensemble(EmitterModel{2, 0.01}, 3, 50, 777, 2);
  CHECK(r.unidentifiable_runs > 0);
  CHECK(r.estimates.size() == static_cast<std::size_t>(50 - r.unidentifiable_runs));
}

TEST_CASE("Bernoulli ensemble variance tracks the exact CRLB") {
  // M = 1: p-hat is the sample mean of Bernoulli draws, Var = p(1-p)/nu.
  const EnsembleResult r = run_ensemble(EmitterModel{1, 0.5}, 1000, 100, 4242, 0,
                                        MleOptions{.max_emitters = 1});
  // Estimates at the ceiling M_max = 1 are deliberately excluded from the
  // moment statistics, so recompute over every estimate directly.
  REQUIRE(r.estimates.size() == 100);
  double mean = 0.0;
  for (const auto& est : r.estimates) {
    mean += est.theta_hat.detection_prob;
  }
  mean /= 100.0;
  double var = 0.0;
  for (const auto& est : r.estimates) {
    const double d = est.theta_hat.detection_prob - mean;
    var += d * d;
  }
  var /= 99.0;
  const double exact = 0.5 * 0.5 / 1000.0;
  CHECK(std::abs(mean - 0.5) < 0.005);
  CHECK(var > 0.7 * exact);
  CHECK(var < 1.3 * exact);
}

TEST_CASE("estimator concentrates as nu grows") {
  const std::vector<ScalingRow> rows =
      scaling_study(EmitterModel{40, 0.2}, {100, 10000}, 50, 96321, 0,
                    MleOptions{.max_emitters = 2000});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].nu == 100);
  CHECK(rows[1].nu == 10000);
  // Brightness variance shrinks roughly like 1/nu.
  CHECK(rows[1].lambda_stats.variance < rows[0].lambda_stats.variance);
  // At nu = 1e4 the lambda variance should sit near its CRLB.
  CHECK(rows[1].lambda_stats.variance > 0.5 * rows[1].crlb_lambda);
  CHECK(rows[1].lambda_stats.variance < 2.0 * rows[1].crlb_lambda);
  // CRLB columns scale exactly as 1/nu.
  CHECK(rel_error(rows[0].crlb_lambda / 100.0, rows[1].crlb_lambda) < 1e-12);
}

TEST_CASE("coverage of the 95% brightness ellipse is near nominal") {
  const EnsembleResult r = run_ensemble(EmitterModel{40, 0.2}, 10000, 100, 864200, 0,
                                        MleOptions{.max_emitters = 2000});
  CHECK(r.included_runs >= 95);
  CHECK(r.inside_ellipse_fraction >= 0.88);
  CHECK(r.inside_ellipse_fraction <= 1.0);
}

TEST_CASE("summarize copies the ensemble verbatim") {
  const EnsembleResult r = run_ensemble(EmitterModel{5, 0.6}, 200, 30, 111, 2);
  const ScalingRow row = summarize(r);
  CHECK(row.nu == r.nu);
  CHECK(row.runs == r.runs);
  CHECK(row.included_runs == r.included_runs);
  CHECK(row.lambda_stats.mean == r.lambda_stats.mean);
  CHECK(row.crlb_emitters == r.crlb_theta.entries(0, 0));
  CHECK(row.crlb_xi == r.crlb_beta.entries(1, 1));
  CHECK(row.inside_ellipse_fraction == r.inside_ellipse_fraction);
}

TEST_CASE("invalid ensemble requests are rejected") {
  CHECK_THROWS_AS(run_ensemble(EmitterModel{5, 0.6}, 0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_ensemble(EmitterModel{5, 0.6}, 100, 1, 1), std::invalid_argument);
  // Boundary ground truths make the CRLB meaningless here.
  CHECK_THROWS_AS(run_ensemble(EmitterModel{5, 1.0}, 100, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_ensemble(EmitterModel{5, 0.0}, 100, 10, 1), std::invalid_argument);
  // A near-Poisson ground truth fails fast on the singular information matrix.
  CHECK_THROWS_AS(run_ensemble(EmitterModel{1000000, 1e-6}, 10, 5, 1), NumericalError);

  CHECK_THROWS_AS(scaling_study(EmitterModel{5, 0.6}, {100, 100}, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(scaling_study(EmitterModel{5, 0.6}, {1000, 100}, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(scaling_study(EmitterModel{5, 0.6}, {}, 10, 1),
                  std::invalid_argument);
}

TEST_SUITE_END();
