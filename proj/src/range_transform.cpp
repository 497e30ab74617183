#include "rolefinder/range_transform.hpp"

#include <algorithm>
#include <cmath>

#include "rolefinder/errors.hpp"

namespace rolefinder {

double empirical_quantile(std::span<const double> values, double p) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

OptimalRange fit_optimal_range(std::span<const double> values, double beta, std::string feature) {
  if (values.empty()) throw ValidationError("optimal range needs at least one value");
  if (!(beta > 0.0 && beta < 0.5)) throw ValidationError("beta must lie in (0, 0.5)");
  OptimalRange r;
  r.feature = std::move(feature);
  r.beta = beta;
  r.lower = empirical_quantile(values, beta);
  r.upper = empirical_quantile(values, 1.0 - beta);
  return r;
}

std::vector<double> RoleRangeSet::transform(std::span<const double> row) const {
  if (row.size() != ranges.size()) throw ValidationError("range transform: feature mismatch");
  std::vector<double> out(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) out[i] = distance_transform(row[i], ranges[i]);
  return out;
}

RoleRangeSet fit_role_ranges(std::string role, std::span<const std::vector<double>> rows,
                             std::span<const std::string> features, double beta) {
  if (rows.empty()) throw ValidationError("optimal ranges need at least one row");
  RoleRangeSet set;
  set.role = std::move(role);
  set.fitted_on = rows.size();
  std::vector<double> column(rows.size());
  for (std::size_t f = 0; f < features.size(); ++f) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != features.size()) throw ValidationError("range fit: feature mismatch");
      column[r] = rows[r][f];
    }
    set.ranges.push_back(fit_optimal_range(column, beta, features[f]));
  }
  return set;
}

std::vector<std::vector<double>> transform_dataset(std::span<const std::vector<double>> rows,
                                                   const RoleRangeSet& ranges) {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(ranges.transform(r));
  return out;
}

}  // namespace rolefinder
