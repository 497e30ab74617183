#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rolefinder/errors.hpp"
#include "rolefinder/range_transform.hpp"
#include "rolefinder/seed.hpp"
#include "test_support.hpp"

using namespace rolefinder;
using rolefinder::testing::random_vector;

namespace {

double quantile_oracle(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

TEST(OptimalRange, QuartilesOfFiveValues) {
  const std::vector<double> v = {4, 0, 3, 1, 2};
  const auto r = fit_optimal_range(v, 0.25, "f");
  EXPECT_EQ(r.lower, 1.0);
  EXPECT_EQ(r.upper, 3.0);
  EXPECT_EQ(r.beta, 0.25);
  EXPECT_EQ(r.feature, "f");
}

TEST(OptimalRange, ConstantSample) {
  const std::vector<double> v(7, 0.37);
  const auto r = fit_optimal_range(v, 0.1);
  EXPECT_EQ(r.lower, 0.37);
  EXPECT_EQ(r.upper, 0.37);
}

TEST(OptimalRange, InterpolatesBetweenTwoValues) {
  const std::vector<double> v = {-2, 2};
  const auto r = fit_optimal_range(v, 0.25);
  EXPECT_EQ(r.lower, -1.0);
  EXPECT_EQ(r.upper, 1.0);
}

TEST(OptimalRange, Errors) {
  const std::vector<double> empty;
  const std::vector<double> v = {1, 2};
  EXPECT_THROW(fit_optimal_range(empty, 0.25), ValidationError);
  EXPECT_THROW(fit_optimal_range(v, 0.0), ValidationError);
  EXPECT_THROW(fit_optimal_range(v, 0.5), ValidationError);
  EXPECT_THROW(fit_optimal_range(v, -0.1), ValidationError);
}

TEST(OptimalRange, QuantileMatchesOracle) {
  Rng rng(1234);
  for (std::size_t n = 1; n <= 50; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      auto v = random_vector(rng, n, -2, 2);
      // Duplicates exercise tied order statistics.
      if (rep % 4 == 0 && n > 2) v[1] = v[0];
      const double p = uniform01(rng);
      EXPECT_EQ(empirical_quantile(v, p), quantile_oracle(v, p)) << "n=" << n << " p=" << p;
      for (double b : {0.1, 0.25, 0.4}) {
        const auto r = fit_optimal_range(v, b);
        EXPECT_EQ(r.lower, quantile_oracle(v, b));
        EXPECT_EQ(r.upper, quantile_oracle(v, 1.0 - b));
      }
    }
  }
}

TEST(OptimalRange, LargerBetaNeverWidens) {
  Rng rng(42);
  for (int rep = 0; rep < 200; ++rep) {
    const auto v = random_vector(rng, 1 + uniform_index(rng, 40), -2, 2);
    double b1 = 0.01 + 0.48 * uniform01(rng);
    double b2 = 0.01 + 0.48 * uniform01(rng);
    if (b1 > b2) std::swap(b1, b2);
    const auto wide = fit_optimal_range(v, b1);
    const auto narrow = fit_optimal_range(v, b2);
    EXPECT_LE(wide.lower, narrow.lower);
    EXPECT_GE(wide.upper, narrow.upper);
    EXPECT_LE(narrow.lower, narrow.upper);
  }
}

TEST(DistanceTransform, Examples) {
  EXPECT_EQ(distance_transform(0.5, {"f", -0.3, 1.1, 0.25}), 0.0);
  EXPECT_EQ(distance_transform(2.0, {"f", -0.5, 1.0, 0.25}), 1.0);
  EXPECT_EQ(distance_transform(-2.0, {"f", 2.0, 2.0, 0.25}), 4.0);
  EXPECT_EQ(distance_transform(-1.0, {"", 0.0, 1.0, 0.25}), 1.0);
}

TEST(DistanceTransform, LipschitzAndMonotoneInWidth) {
  Rng rng(7);
  for (int i = 0; i < 5000; ++i) {
    double lo = -2 + 4 * uniform01(rng);
    double hi = -2 + 4 * uniform01(rng);
    if (lo > hi) std::swap(lo, hi);
    const OptimalRange r{"f", lo, hi, 0.25};
    const double a = -2 + 4 * uniform01(rng);
    const double b = -2 + 4 * uniform01(rng);
    EXPECT_LE(std::abs(distance_transform(a, r) - distance_transform(b, r)), std::abs(a - b) + 1e-15);
    const OptimalRange wider{"f", lo - uniform01(rng), hi + uniform01(rng), 0.25};
    EXPECT_LE(distance_transform(a, wider), distance_transform(a, r));
  }
}

TEST(TransformDataset, MidpointRowIsZeroAndZeroRowStaysZero) {
  const std::vector<std::vector<double>> train = {{-1, -0.5, -2}, {1, 0.5, 2}, {-0.5, -0.2, -1}, {0.5, 0.2, 1}};
  const std::vector<std::string> features = {"a", "b", "c"};
  const auto set = fit_role_ranges("BWM", train, features, 0.25);
  EXPECT_EQ(set.fitted_on, 4u);
  ASSERT_EQ(set.size(), 3u);
  std::vector<double> mid;
  for (const auto& r : set.ranges) mid.push_back(0.5 * (r.lower + r.upper));
  EXPECT_EQ(set.transform(mid), (std::vector<double>(3, 0.0)));

  // Every range here contains 0, so transformed in-range rows are fixed points.
  const std::vector<std::vector<double>> rows = {std::vector<double>(3, 0.0), {0.1, -0.1, 0.5}, {-3, 3, 0}};
  const auto once = transform_dataset(rows, set);
  EXPECT_EQ(once[0], std::vector<double>(3, 0.0));
  EXPECT_EQ(once[1], std::vector<double>(3, 0.0));
  for (const auto& r : transform_dataset(std::vector<std::vector<double>>{once[0], once[1]}, set))
    EXPECT_EQ(r, std::vector<double>(3, 0.0));
}

TEST(TransformDataset, MatchesScalarLoop) {
  Rng rng(31);
  std::vector<std::string> features;
  std::vector<std::vector<double>> train;
  for (int f = 0; f < 12; ++f) features.push_back("k" + std::to_string(f));
  for (int i = 0; i < 25; ++i) train.push_back(random_vector(rng, 12, -2, 2));
  const auto set = fit_role_ranges("AP", train, features, 0.3);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 100; ++i) rows.push_back(random_vector(rng, 12, -2, 2));
  const auto out = transform_dataset(rows, set);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t f = 0; f < 12; ++f) {
      const auto& r = set.ranges[f];
      const double expect = rows[i][f] < r.lower ? r.lower - rows[i][f] : rows[i][f] > r.upper ? rows[i][f] - r.upper : 0.0;
      EXPECT_EQ(out[i][f], expect);
      EXPECT_GE(out[i][f], 0.0);
      EXPECT_LE(out[i][f], 4.0);
    }
  }
}

TEST(TransformDataset, FeatureMismatch) {
  const std::vector<std::vector<double>> train = {{0, 1}, {1, 2}};
  const std::vector<std::string> features = {"a", "b"};
  const auto set = fit_role_ranges("HM", train, features, 0.25);
  const std::vector<std::vector<double>> bad = {{0, 1, 2}};
  EXPECT_THROW(transform_dataset(bad, set), ValidationError);
  const std::vector<std::string> three = {"a", "b", "c"};
  EXPECT_THROW(fit_role_ranges("HM", train, three, 0.25), ValidationError);
}
