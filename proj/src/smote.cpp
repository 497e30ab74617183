#include <algorithm>
#include <numeric>

#include "rolefinder/diagnostics.hpp"
#include "rolefinder/errors.hpp"
#include "rolefinder/learner.hpp"
#include "rolefinder/seed.hpp"

namespace rolefinder {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

}  // namespace

std::vector<std::vector<std::size_t>> nearest_neighbors(std::span<const Row> points, std::size_t k) {
  const std::size_t m = points.size();
  k = std::min(k, m == 0 ? 0 : m - 1);
  std::vector<std::vector<std::size_t>> out(m);
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < m; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) dist.emplace_back(squared_distance(points[i], points[j]), j);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    for (std::size_t n = 0; n < k; ++n) out[i].push_back(dist[n].second);
  }
  return out;
}

std::vector<SyntheticSample> smote_samples(std::span<const Row> minority, std::size_t k,
                                           std::size_t n_synthetic, std::uint64_t seed) {
  if (n_synthetic == 0) return {};
  if (minority.size() < 2) throw ValidationError("SMOTE needs at least 2 minority rows");
  if (k == 0) throw ValidationError("SMOTE needs k >= 1");
  if (k > minority.size() - 1) {
    warn("SMOTE: k = " + std::to_string(k) + " lowered to " + std::to_string(minority.size() - 1) +
         " (minority class has " + std::to_string(minority.size()) + " rows)");
    k = minority.size() - 1;
  }
  const auto neighbors = nearest_neighbors(minority, k);

  Rng rng(seed);
  // Bases cycle through a seeded permutation so every minority row is used evenly.
  std::vector<std::size_t> bases(minority.size());
  std::iota(bases.begin(), bases.end(), 0);
  for (std::size_t i = bases.size(); i > 1; --i) std::swap(bases[i - 1], bases[uniform_index(rng, i)]);

  std::vector<SyntheticSample> out;
  out.reserve(n_synthetic);
  for (std::size_t s = 0; s < n_synthetic; ++s) {
    SyntheticSample sample;
    sample.base = bases[s % bases.size()];
    sample.neighbor = neighbors[sample.base][uniform_index(rng, k)];
    sample.gap = uniform01(rng);
    const auto& x = minority[sample.base];
    const auto& nn = minority[sample.neighbor];
    sample.row.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) sample.row[j] = x[j] + sample.gap * (nn[j] - x[j]);
    out.push_back(std::move(sample));
  }
  return out;
}

std::vector<Row> smote(std::span<const Row> minority, std::size_t k, std::size_t n_synthetic,
                       std::uint64_t seed) {
  auto samples = smote_samples(minority, k, n_synthetic, seed);
  std::vector<Row> rows;
  rows.reserve(samples.size());
  for (auto& s : samples) rows.push_back(std::move(s.row));
  return rows;
}

LabeledDataset balance_with_smote(const LabeledDataset& data, std::size_t k, std::uint64_t seed) {
  const std::size_t pos = data.positives();
  const std::size_t neg = data.negatives();
  if (pos == 0 || neg == 0) throw ValidationError("single-class dataset");
  const int minority_label = pos < neg ? 1 : 0;
  const std::size_t deficit = pos < neg ? neg - pos : pos - neg;

  std::vector<Row> minority;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] == minority_label) minority.push_back(data.rows[i]);
  }
  LabeledDataset out = data;
  if (deficit > 0) {
    auto synthetic = smote(minority, k, deficit, seed);
    for (auto& r : synthetic) {
      out.rows.push_back(std::move(r));
      out.labels.push_back(minority_label);
      if (!out.ids.empty()) out.ids.emplace_back("synthetic");
    }
  }
  out.weights = balanced_class_weights(out.labels);
  return out;
}

std::vector<Fold> stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (labels.empty()) throw ValidationError("cross-validation on an empty dataset");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] ? 1 : 0].push_back(i);
  const std::size_t smallest = std::min(by_class[0].size(), by_class[1].size());
  if (smallest < 2) {
    throw ValidationError("cross-validation needs at least 2 examples of each class");
  }
  if (k > smallest) {
    warn("cross-validation: folds lowered from " + std::to_string(k) + " to " + std::to_string(smallest) +
         " (smallest class has " + std::to_string(smallest) + " examples)");
    k = smallest;
  }
  if (k < 2) throw ValidationError("cross-validation needs at least 2 folds");

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> members(k);
  std::size_t next_fold = 0;
  for (auto& cls : by_class) {
    for (std::size_t i = cls.size(); i > 1; --i) std::swap(cls[i - 1], cls[uniform_index(rng, i)]);
    for (std::size_t idx : cls) {
      members[next_fold].push_back(idx);
      next_fold = (next_fold + 1) % k;
    }
  }
  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    folds[f].validation = members[f];
    std::sort(folds[f].validation.begin(), folds[f].validation.end());
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) folds[f].train.insert(folds[f].train.end(), members[g].begin(), members[g].end());
    }
    std::sort(folds[f].train.begin(), folds[f].train.end());
  }
  return folds;
}

}  // namespace rolefinder
