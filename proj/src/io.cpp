#include "pnr/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pnr/errors.hpp"

namespace pnr {

namespace {

std::string trimmed(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

std::string lowered(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return text;
}

template <typename Int>
Int parse_integer(const std::string& field, std::size_t line, const char* what) {
  Int value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError("expected " + std::string(what) + ", got '" + field + "'", line);
  }
  return value;
}

void write_comments(std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& comment : comments) out << "# " << comment << "\n";
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buffer, ptr);
}

void write_histogram_csv(const PhotonHistogram& histogram, std::ostream& out,
                         const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "N,count\n";
  for (const auto& [photons, count] : histogram.counts()) {
    if (count == 0) continue;
    out << photons << "," << count << "\n";
  }
}

void write_histogram_csv_file(const PhotonHistogram& histogram, const std::string& path,
                              const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_histogram_csv(histogram, out, comments);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

PhotonHistogram read_histogram_csv(std::istream& in) {
  PhotonHistogram histogram;
  std::string line;
  std::size_t line_number = 0;
  bool header_seen = false;
  bool data_seen = false;
  int previous_photons = -1;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string body = trimmed(line);
    if (body.empty() || body.front() == '#') continue;
    if (!header_seen) {
      if (lowered(body) != "n,count") {
        throw ParseError("expected header 'N,count', got '" + body + "'", line_number);
      }
      header_seen = true;
      continue;
    }
    const auto comma = body.find(',');
    if (comma == std::string::npos || body.find(',', comma + 1) != std::string::npos) {
      throw ParseError("expected exactly two comma-separated fields, got '" + body + "'",
                       line_number);
    }
    const int photons =
        parse_integer<int>(trimmed(body.substr(0, comma)), line_number, "a photon number");
    const auto count = parse_integer<std::uint64_t>(trimmed(body.substr(comma + 1)),
                                                    line_number, "an occurrence count");
    if (photons < 0) {
      throw ParseError("photon number must be nonnegative, got " + std::to_string(photons),
                       line_number);
    }
    if (photons <= previous_photons) {
      throw ParseError("photon numbers must be strictly ascending (saw " +
                       std::to_string(photons) + " after " +
                       std::to_string(previous_photons) + ")", line_number);
    }
    previous_photons = photons;
    data_seen = true;
    histogram.add(photons, count);
  }
  // Report end-of-input structural problems at the final line, or line 1
  // for a stream with no lines at all.
  const std::size_t eof_line = line_number == 0 ? 1 : line_number;
  if (!header_seen) throw ParseError("missing 'N,count' header", eof_line);
  if (!data_seen) throw ParseError("header present but no data rows", eof_line);
  return histogram;
}

PhotonHistogram read_histogram_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return read_histogram_csv(in);
}

void write_scaling_csv(const std::vector<ScalingRow>& rows, std::ostream& out,
                       const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "nu,parameter,mean,sample_variance,crlb_variance,runs,included_runs,"
         "unidentifiable_runs,inside_ellipse_fraction\n";
  const auto emit = [&out](const ScalingRow& row, const char* name,
                           const ParameterStats& stats, double crlb_diagonal) {
    out << row.nu << "," << name << "," << format_double(stats.mean) << ","
        << format_double(stats.variance) << "," << format_double(crlb_diagonal) << ","
        << row.runs << "," << row.included_runs << "," << row.unidentifiable_runs << ","
        << format_double(row.inside_ellipse_fraction) << "\n";
  };
  for (const auto& row : rows) {
    emit(row, "M", row.emitters_stats, row.crlb_emitters);
    emit(row, "p", row.detection_stats, row.crlb_detection);
    emit(row, "lambda", row.lambda_stats, row.crlb_lambda);
    emit(row, "xi", row.xi_stats, row.crlb_xi);
  }
}

void write_plan_csv(const PlanGrid& grid, std::ostream& out,
                    const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "M\\p";
  for (double p : grid.p_axis) out << "," << format_double(p);
  out << "\n";
  for (std::size_t i = 0; i < grid.m_axis.size(); ++i) {
    out << format_double(grid.m_axis[i]);
    for (std::size_t j = 0; j < grid.p_axis.size(); ++j) {
      out << "," << format_double(grid.nu_exact[i][j]);
    }
    out << "\n";
  }
}

void write_contours_csv(const PlanGrid& grid, double pulse_period_seconds, std::ostream& out,
                        const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "lambda,M,p,nu,time_seconds\n";
  for (const auto& contour : grid.contours) {
    for (const auto& point : contour.points) {
      out << format_double(contour.mean_photons) << "," << format_double(point.emitters)
          << "," << format_double(point.detection_prob) << ","
          << format_double(point.nu_exact) << ","
          << format_double(std::ceil(point.nu_exact) * pulse_period_seconds) << "\n";
    }
  }
}

}  // namespace pnr
