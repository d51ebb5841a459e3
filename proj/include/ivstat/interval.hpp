#pragma once

// Interval-valued observations, their internal (uniform) representation,
// and symbolic descriptive statistics.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "ivstat/error.hpp"
#include "ivstat/linalg.hpp"

namespace ivstat {

/// Closed interval [lower, upper]; lower == upper is a point.
class Interval {
 public:
  Interval(double lower, double upper) : lower_(lower), upper_(upper) {
    if (!std::isfinite(lower) || !std::isfinite(upper)) throw DomainError("interval endpoints must be finite");
    if (lower > upper) throw DomainError("interval lower endpoint exceeds upper endpoint");
  }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double width() const { return upper_ - lower_; }
  double midpoint() const { return 0.5 * (lower_ + upper_); }
  bool degenerate() const { return lower_ == upper_; }

 private:
  double lower_;
  double upper_;
};

/// One hyper-rectangle: p intervals.
struct IntervalObservation {
  std::vector<Interval> coords;

  std::size_t dim() const { return coords.size(); }
};

class IntervalDataset {
 public:
  IntervalDataset(std::vector<IntervalObservation> observations, std::vector<std::string> names)
      : observations_(std::move(observations)), names_(std::move(names)) {
    if (observations_.empty()) throw InputError("dataset has no observations");
    const std::size_t p = observations_.front().dim();
    if (p == 0) throw InputError("observations must have at least one coordinate");
    for (const auto& obs : observations_)
      if (obs.dim() != p) throw InputError("observations differ in dimension");
    if (names_.size() != p) throw InputError("variable name count does not match dimension");
  }

  std::size_t n() const { return observations_.size(); }
  std::size_t p() const { return names_.size(); }
  const std::vector<IntervalObservation>& observations() const { return observations_; }
  const IntervalObservation& operator[](std::size_t i) const { return observations_[i]; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<IntervalObservation> observations_;
  std::vector<std::string> names_;
};

/// Mean vector and spread matrix of the uniform internal distribution.
struct InternalRep {
  Vector theta1;
  Matrix theta2;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Parses CSV with header `a_1,b_1,...,a_p,b_p` and one observation per row.
/// Blank lines are ignored. Rows and columns in error messages are 1-based;
/// row 1 is the first data row.
inline IntervalDataset parse_dataset(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (!detail::trim(line).empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (lines.empty()) throw ParseError("empty input: missing header");

  const auto header = detail::split_commas(lines.front());
  if (header.size() % 2 != 0) throw ParseError("odd column count in header (" + std::to_string(header.size()) + ")");
  const std::size_t p = header.size() / 2;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) {
    const std::string a = "a_" + std::to_string(j + 1);
    const std::string b = "b_" + std::to_string(j + 1);
    if (header[2 * j] != a || header[2 * j + 1] != b)
      throw ParseError("header column " + std::to_string(2 * j + 1) + ": expected '" + a + "," + b + "'");
    names.push_back("X" + std::to_string(j + 1));
  }

  std::vector<IntervalObservation> observations;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = detail::split_commas(lines[r]);
    const std::string where_row = "row " + std::to_string(r);
    if (cells.size() != header.size())
      throw ParseError(where_row + ": expected " + std::to_string(header.size()) + " columns, found " +
                       std::to_string(cells.size()));
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto cell = cells[c];
      std::string_view digits = cell;
      if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
      const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), values[c]);
      if (digits.empty() || res.ec != std::errc() || res.ptr != digits.data() + digits.size() ||
          !std::isfinite(values[c]))
        throw ParseError("malformed number '" + std::string(cell) + "' at " + where_row + ", column " +
                         std::to_string(c + 1));
    }
    IntervalObservation obs;
    for (std::size_t j = 0; j < p; ++j) {
      if (values[2 * j] > values[2 * j + 1])
        throw ParseError("lower > upper at " + where_row + ", var " + std::to_string(j + 1));
      obs.coords.emplace_back(values[2 * j], values[2 * j + 1]);
    }
    observations.push_back(std::move(obs));
  }
  if (observations.empty()) throw ParseError("no data rows");
  return IntervalDataset(std::move(observations), std::move(names));
}

/// Inverse of parse_dataset; numbers use the shortest round-trip form.
inline std::string serialize_dataset(const IntervalDataset& data) {
  std::string out;
  for (std::size_t j = 0; j < data.p(); ++j) {
    if (j) out += ',';
    out += "a_" + std::to_string(j + 1) + ",b_" + std::to_string(j + 1);
  }
  out += '\n';
  for (const auto& obs : data.observations()) {
    for (std::size_t j = 0; j < obs.dim(); ++j) {
      if (j) out += ',';
      out += detail::format_double(obs.coords[j].lower()) + ',' + detail::format_double(obs.coords[j].upper());
    }
    out += '\n';
  }
  return out;
}

inline Vector internal_mean(const IntervalObservation& obs) {
  Vector m(static_cast<Eigen::Index>(obs.dim()));
  for (std::size_t j = 0; j < obs.dim(); ++j) m(static_cast<Eigen::Index>(j)) = obs.coords[j].midpoint();
  return m;
}

/// (1/12) w w^T with w the width vector.
inline Matrix internal_spread(const IntervalObservation& obs) {
  Vector w(static_cast<Eigen::Index>(obs.dim()));
  for (std::size_t j = 0; j < obs.dim(); ++j) w(static_cast<Eigen::Index>(j)) = obs.coords[j].width();
  return (w * w.transpose()) / 12.0;
}

inline InternalRep to_internal(const IntervalObservation& obs) { return {internal_mean(obs), internal_spread(obs)}; }

inline std::vector<InternalRep> to_internal(const IntervalDataset& data) {
  std::vector<InternalRep> reps;
  reps.reserve(data.n());
  for (const auto& obs : data.observations()) reps.push_back(to_internal(obs));
  return reps;
}

struct MeanVariance {
  double mean;
  double variance;
};

/// Symbolic mean and variance of variable j (0-based) assuming points are
/// spread uniformly within each interval.
inline MeanVariance describe_mean_var(const IntervalDataset& data, std::size_t j) {
  if (j >= data.p()) throw DomainError("variable index out of range");
  const double n = static_cast<double>(data.n());
  KahanSum sum, sum_sq;
  for (const auto& obs : data.observations()) {
    const double a = obs.coords[j].lower();
    const double b = obs.coords[j].upper();
    sum.add(a + b);
  }
  const double mean = sum.value() / (2.0 * n);
  // Centered form of (3n)^-1 sum(a^2 + ab + b^2) - mean^2.
  for (const auto& obs : data.observations()) {
    const double a = obs.coords[j].lower() - mean;
    const double b = obs.coords[j].upper() - mean;
    sum_sq.add(a * a + a * b + b * b);
  }
  return {mean, sum_sq.value() / (3.0 * n)};
}

/// Symbolic covariance between variables j and k (0-based).
inline double describe_cov(const IntervalDataset& data, std::size_t j, std::size_t k) {
  if (j >= data.p() || k >= data.p()) throw DomainError("variable index out of range");
  if (j == k) return describe_mean_var(data, j).variance;
  if (j > k) std::swap(j, k);  // bit-identical in either argument order
  const double mj = describe_mean_var(data, j).mean;
  const double mk = describe_mean_var(data, k).mean;
  KahanSum sum;
  for (const auto& obs : data.observations()) {
    const double aj = obs.coords[j].lower() - mj, bj = obs.coords[j].upper() - mj;
    const double ak = obs.coords[k].lower() - mk, bk = obs.coords[k].upper() - mk;
    sum.add(2.0 * aj * ak + aj * bk + bj * ak + 2.0 * bj * bk);
  }
  return sum.value() / (6.0 * static_cast<double>(data.n()));
}

struct DescriptiveReport {
  std::vector<std::string> names;
  std::vector<MeanVariance> variables;
  Matrix covariance;  // symbolic covariance; diagonal holds the variances
};

inline DescriptiveReport describe_dataset(const IntervalDataset& data) {
  DescriptiveReport rep;
  rep.names = data.names();
  const auto p = static_cast<Eigen::Index>(data.p());
  rep.covariance = Matrix::Zero(p, p);
  for (std::size_t j = 0; j < data.p(); ++j) rep.variables.push_back(describe_mean_var(data, j));
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index k = j; k < p; ++k) {
      const double c = (j == k) ? rep.variables[static_cast<std::size_t>(j)].variance
                                : describe_cov(data, static_cast<std::size_t>(j), static_cast<std::size_t>(k));
      rep.covariance(j, k) = rep.covariance(k, j) = c;
    }
  return rep;
}

}  // namespace ivstat
