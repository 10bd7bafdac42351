#include "doctest.h"

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "pnr/errors.hpp"
#include "pnr/io.hpp"
#include "pnr/montecarlo.hpp"
#include "pnr/planner.hpp"

#include "test_support.hpp"

using namespace pnr;

TEST_SUITE_BEGIN("io");

TEST_CASE("format_double is shortest-round-trip and locale-free") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(0.0) == "0");
  for (double v : {1.0 / 3.0, 1e-17, 6.02214076e23, 1.9582134e9, 5e-324}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("histograms round-trip through the CSV format") {
  PhotonHistogram h;
  h.add(0, 17);
  h.add(3, 5);
  h.add(12, 1);

  std::ostringstream out;
  write_histogram_csv(h, out, {"first comment", "second comment"});
  const std::string text = out.str();
  CHECK(text.find("# first comment\n") != std::string::npos);
  CHECK(text.find("N,count\n") != std::string::npos);

  std::istringstream in(text);
  const PhotonHistogram back = read_histogram_csv(in);
  CHECK(back.counts() == h.counts());
  CHECK(back.experiments() == 23);
}

TEST_CASE("reader tolerates comments and a case-insensitive header") {
  std::istringstream in(
      "# leading comment\n"
      "n,COUNT\n"
      "0,5\n"
      "# interleaved comment\n"
      "2,3\n");
  const PhotonHistogram h = read_histogram_csv(in);
  CHECK(h.experiments() == 8);
  CHECK(h.counts().at(2) == 3);
}

namespace {

long parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_histogram_csv(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("malformed histogram inputs fail with the offending line number") {
  // Missing header.
  CHECK(parse_error_line("0,5\n1,3\n") == 1);
  // Header but no data rows: reported at the end of the input.
  CHECK(parse_error_line("N,count\n") == 1);
  CHECK(parse_error_line("# only comments\nN,count\n# trailing\n") == 3);
  // Wrong field count.
  CHECK(parse_error_line("N,count\n0,5,9\n") == 2);
  CHECK(parse_error_line("N,count\n0\n") == 2);
  // Non-numeric and out-of-range fields.
  CHECK(parse_error_line("N,count\nzero,5\n") == 2);
  CHECK(parse_error_line("N,count\n0,-5\n") == 2);
  CHECK(parse_error_line("N,count\n-1,5\n") == 2);
  CHECK(parse_error_line("N,count\n0,many\n") == 2);
  // Duplicate or descending photon numbers.
  CHECK(parse_error_line("N,count\n0,5\n0,2\n") == 3);
  CHECK(parse_error_line("N,count\n3,5\n1,2\n") == 3);
  // Completely empty input.
  CHECK(parse_error_line("") == 1);

  // The message carries the line number too.
  std::istringstream in("N,count\n0,5\nbad line\n");
  try {
    read_histogram_csv(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("file helpers surface filesystem errors") {
  CHECK_THROWS_AS(read_histogram_csv_file("/nonexistent/path/h.csv"), std::runtime_error);
  PhotonHistogram h;
  h.add(1, 2);
  CHECK_THROWS_AS(write_histogram_csv_file(h, "/nonexistent/path/h.csv"),
                  std::runtime_error);
}

TEST_CASE("scaling table serializes one row per parameter per nu") {
  const std::vector<ScalingRow> rows =
      scaling_study(EmitterModel{5, 0.5}, {50, 200}, 10, 4321, 2);
  std::ostringstream out;
  write_scaling_csv(rows, out, {"demo"});
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  REQUIRE(lines.size() >= 10);  // 1 comment + 1 header + 2 nu * 4 parameters
  CHECK(lines[0] == "# demo");
  CHECK(lines[1] ==
        "nu,parameter,mean,sample_variance,crlb_variance,runs,included_runs,"
        "unidentifiable_runs,inside_ellipse_fraction");
  CHECK(lines[2].rfind("50,M,", 0) == 0);
  CHECK(lines[3].rfind("50,p,", 0) == 0);
  CHECK(lines[4].rfind("50,lambda,", 0) == 0);
  CHECK(lines[5].rfind("50,xi,", 0) == 0);
  CHECK(lines[6].rfind("200,M,", 0) == 0);
}

TEST_CASE("plan matrix and contour files carry the full grid") {
  PlanGridOptions options;
  options.m_resolution = 4;
  options.p_resolution = 3;
  options.contour_lambdas = {10.0};
  const PlanGrid grid = plan_grid(options, 0.01);

  std::ostringstream out;
  write_plan_csv(grid, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("M\\p,", 0) == 0);
  int data_rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') {
      ++data_rows;
    }
  }
  CHECK(data_rows == 4);

  std::ostringstream cout_;
  write_contours_csv(grid, 1e-6, cout_);
  std::istringstream cin_(cout_.str());
  std::getline(cin_, header);
  CHECK(header == "lambda,M,p,nu,time_seconds");
  int contour_rows = 0;
  while (std::getline(cin_, line)) {
    if (!line.empty() && line[0] != '#') {
      ++contour_rows;
    }
  }
  CHECK(contour_rows == static_cast<int>(grid.contours[0].points.size()));
}

TEST_CASE("serialization is byte-stable across calls") {
  PhotonHistogram h;
  h.add(0, 3);
  h.add(7, 2);
  std::ostringstream a, b;
  write_histogram_csv(h, a, {"comment"});
  write_histogram_csv(h, b, {"comment"});
  CHECK(a.str() == b.str());
}

TEST_SUITE_END();
