#pragma once

// Per-role optimal ranges and the distance transform. A standardized value in
// [-2, 2] becomes its distance to the role's [quantile(beta), quantile(1-beta)]
// interval: 0 inside, at most 4 at the extremes.

#include <span>
#include <string>
#include <vector>

namespace rolefinder {

struct OptimalRange {
  std::string feature;
  double lower = 0.0;
  double upper = 0.0;
  double beta = 0.25;

  friend bool operator==(const OptimalRange&, const OptimalRange&) = default;
};

// Linear interpolation between closest ranks at position p * (n - 1) of the sorted sample.
double empirical_quantile(std::span<const double> values, double p);

// Throws ValidationError on empty values or beta outside (0, 0.5).
OptimalRange fit_optimal_range(std::span<const double> values, double beta, std::string feature = {});

// 0 if lower <= value <= upper, else the distance to the nearest bound.
constexpr double distance_transform(double value, const OptimalRange& range) {
  if (value < range.lower) return range.lower - value;
  if (value > range.upper) return value - range.upper;
  return 0.0;
}

struct RoleRangeSet {
  std::string role;
  std::vector<OptimalRange> ranges;  // one per key feature, in column order
  std::size_t fitted_on = 0;         // number of rows the ranges were fitted on

  std::size_t size() const { return ranges.size(); }
  std::vector<double> transform(std::span<const double> row) const;

  friend bool operator==(const RoleRangeSet&, const RoleRangeSet&) = default;
};

// Fits one range per column over `rows` (each row has one value per feature).
RoleRangeSet fit_role_ranges(std::string role, std::span<const std::vector<double>> rows,
                             std::span<const std::string> features, double beta);

// Elementwise distance transform of every row. Throws on dimension mismatch.
std::vector<std::vector<double>> transform_dataset(std::span<const std::vector<double>> rows,
                                                   const RoleRangeSet& ranges);

}  // namespace rolefinder
