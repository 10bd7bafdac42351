#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pnr/montecarlo.hpp"
#include "pnr/photon_model.hpp"
#include "pnr/planner.hpp"

namespace pnr {

/// Shortest decimal form that round-trips to the same double (via
/// std::to_chars): locale-independent and byte-stable across runs.
std::string format_double(double value);

/// Histogram wire format: '#' comment lines, a "N,count" header, then one
/// row per nonzero photon number, sorted ascending. Omitted rows mean zero.
void write_histogram_csv(const PhotonHistogram& histogram, std::ostream& out,
                         const std::vector<std::string>& comments = {});
void write_histogram_csv_file(const PhotonHistogram& histogram, const std::string& path,
                              const std::vector<std::string>& comments = {});

/// Parses the histogram format above. Throws ParseError (with the 1-based
/// line number) on malformed content, including a missing header or a
/// header with no data rows. Comment lines may appear anywhere.
PhotonHistogram read_histogram_csv(std::istream& in);
PhotonHistogram read_histogram_csv_file(const std::string& path);

/// Long-format scaling table: one row per (nu, parameter), parameters
/// M, p, lambda, xi, with the matching CRLB diagonal alongside.
void write_scaling_csv(const std::vector<ScalingRow>& rows, std::ostream& out,
                       const std::vector<std::string>& comments = {});

/// Experiments-needed matrix: header row carries the p axis, first column
/// the M axis; missing (degenerate) cells serialize as "nan".
void write_plan_csv(const PlanGrid& grid, std::ostream& out,
                    const std::vector<std::string>& comments = {});

/// Fixed-lambda contour samples: lambda,M,p,nu plus the acquisition time
/// of ceil(nu) experiments at the given pulse period.
void write_contours_csv(const PlanGrid& grid, double pulse_period_seconds, std::ostream& out,
                        const std::vector<std::string>& comments = {});

}  // namespace pnr
