// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rolefinder/learner.hpp"
#include "rolefinder/range_transform.hpp"
#include "rolefinder/role_pipeline.hpp"
#include "rolefinder/seed.hpp"
#include "rolefinder/synthgen.hpp"

using namespace rolefinder;

namespace {

// Pinned tolerances.
constexpr double kSelectorSeconds = 1.0;
constexpr double kGradientRelError = 1e-4;
constexpr double kSeparableAccuracy = 0.99;
constexpr double kLossAbsError = 1e-12;
constexpr double kSegmentAbsError = 1e-12;
constexpr double kMinAuc = 0.90;
constexpr double kMinRecovery = 0.90;
constexpr double kLeagueSeconds = 300.0;

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %d %-28s %s  %s\n", id, name, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

Row random_row(Rng& rng, std::size_t n, double lo, double hi) {
  Row r(n);
  for (auto& v : r) v = lo + (hi - lo) * uniform01(rng);
  return r;
}

double oracle_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

void selector() {
  const std::vector<GridCell> cells = {
      {1.0, 0.25, 0.2469},  {0.5, 0.25, 0.18},    {0.1, 0.25, 0.0977},   {0.05, 0.25, 0.0831},
      {0.01, 0.25, 0.0835}, {0.005, 0.25, 0.1034}, {0.001, 0.25, 0.2199}, {0.05, 0.1, 0.0865},
      {0.05, 0.2, 0.0833},  {0.05, 0.3, 0.0840},   {0.05, 0.35, 0.0863},  {0.05, 0.4, 0.0890},
  };
  const auto start = std::chrono::steady_clock::now();
  const auto best = select_best_cell(cells);
  const double t = seconds_since(start);
  const bool ok = best == GridCell{0.05, 0.25, 0.0831} && t < kSelectorSeconds;
  report(1, "grid selector", ok, fmt("alpha=%g beta=%g loss=%g", best.alpha, best.beta, best.loss));
}

void distance_law() {
  Rng rng(derive_seed(1, "acceptance", 2));
  std::size_t bad = 0;
  for (int i = 0; i < 10000; ++i) {
    double lo = -2 + 4 * uniform01(rng), hi = -2 + 4 * uniform01(rng);
    if (lo > hi) std::swap(lo, hi);
    const double x = -3 + 6 * uniform01(rng);
    const double expect = x < lo ? lo - x : x > hi ? x - hi : 0.0;
    bad += distance_transform(x, {"f", lo, hi, 0.25}) != expect;
  }
  std::size_t bad_quantiles = 0;
  for (std::size_t n = 1; n <= 50; ++n) {
    const auto v = random_row(rng, n, -2, 2);
    for (double b : {0.1, 0.2, 0.25, 0.3, 0.35, 0.4}) {
      const auto r = fit_optimal_range(v, b);
      bad_quantiles += r.lower != oracle_quantile(v, b) || r.upper != oracle_quantile(v, 1 - b);
    }
  }
  report(2, "distance transform", bad == 0 && bad_quantiles == 0,
         fmt("mismatches=%g quantile_mismatches=%g", static_cast<double>(bad), static_cast<double>(bad_quantiles)));
}

void learner() {
  Rng rng(derive_seed(1, "acceptance", 3));
  std::vector<Row> rows;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    rows.push_back(random_row(rng, 5, -2, 2));
    labels.push_back(i % 3 == 0);
  }
  const auto data = make_dataset(rows, labels);
  double worst = 0;
  for (int point = 0; point < 10; ++point) {
    Row w = random_row(rng, 5, -1, 1);
    double b = -1 + 2 * uniform01(rng);
    Row gw(5);
    double gb = 0;
    objective_gradient(data, w, b, 0.1, gw, gb);
    const double h = 1e-6;
    for (std::size_t j = 0; j <= 5; ++j) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      if (j < 5) {
        wp[j] += h;
        wm[j] -= h;
      } else {
        bp += h;
        bm -= h;
      }
      const double fd = (objective(data, wp, bp, 0.1) - objective(data, wm, bm, 0.1)) / (2 * h);
      const double an = j < 5 ? gw[j] : gb;
      worst = std::max(worst, std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8}));
    }
  }

  // Two separated blobs, 100 points each.
  std::vector<Row> blob_rows;
  std::vector<int> blob_labels;
  for (int i = 0; i < 200; ++i) {
    const int y = i % 2;
    auto r = random_row(rng, 4, -1, 1);
    for (auto& v : r) v += y ? 2.5 : -2.5;
    blob_rows.push_back(r);
    blob_labels.push_back(y);
  }
  const auto blobs = make_dataset(blob_rows, blob_labels);
  TrainingConfig cfg;
  cfg.alpha = 0.01;
  cfg.epochs = 50;
  cfg.seed = 3;
  const auto model = fit_sgd(blobs, cfg);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < blobs.size(); ++i) correct += (model.predict_proba(blobs.rows[i]) >= 0.5) == blob_labels[i];
  const double accuracy = static_cast<double>(correct) / 200.0;

  // Direct weighted sum.
  double num = 0, den = 0;
  std::vector<double> probs;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-(0.3 * rows[i][0] - 0.2 * rows[i][1] + 0.1)));
    probs.push_back(p);
    const double wi = labels[i] ? data.weights.positive : data.weights.negative;
    num += wi * -(labels[i] ? std::log(p) : std::log(1 - p));
    den += wi;
  }
  const double loss_err = std::abs(weighted_mean_loss(probs, labels, data.weights) - num / den);

  const bool ok = worst < kGradientRelError && accuracy >= kSeparableAccuracy && loss_err <= kLossAbsError;
  report(3, "logistic learner", ok, fmt("grad_rel_err=%.2e accuracy=%.3f loss_err=%.1e", worst, accuracy, loss_err));
}

void smote_check() {
  Rng rng(derive_seed(1, "acceptance", 4));
  std::vector<Row> minority;
  for (int i = 0; i < 30; ++i) minority.push_back(random_row(rng, 3, -2, 2));
  const std::size_t k = 5;
  // Brute-force neighbour sets.
  std::vector<std::set<std::size_t>> nn(minority.size());
  for (std::size_t i = 0; i < minority.size(); ++i) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t j = 0; j < minority.size(); ++j) {
      if (j == i) continue;
      double s = 0;
      for (std::size_t f = 0; f < 3; ++f) s += (minority[i][f] - minority[j][f]) * (minority[i][f] - minority[j][f]);
      d.emplace_back(s, j);
    }
    std::sort(d.begin(), d.end());
    for (std::size_t m = 0; m < k; ++m) nn[i].insert(d[m].second);
  }
  std::size_t bad = 0;
  for (const auto& s : smote_samples(minority, k, 500, 11)) {
    bad += !nn[s.base].contains(s.neighbor) || s.gap < 0 || s.gap > 1;
    for (std::size_t f = 0; f < 3; ++f) {
      const double expect = minority[s.base][f] + s.gap * (minority[s.neighbor][f] - minority[s.base][f]);
      bad += std::abs(s.row[f] - expect) > kSegmentAbsError;
    }
  }
  std::vector<Row> rows = minority;
  std::vector<int> labels(minority.size(), 1);
  for (int i = 0; i < 170; ++i) {
    rows.push_back(random_row(rng, 3, -2, 2));
    labels.push_back(0);
  }
  const auto balanced = balance_with_smote(make_dataset(rows, labels), k, 5);
  const auto diff = std::abs(static_cast<double>(balanced.positives()) - static_cast<double>(balanced.negatives()));
  report(4, "smote", bad == 0 && diff <= 1,
         fmt("bad_samples=%g positives=%g negatives=%g", static_cast<double>(bad),
             static_cast<double>(balanced.positives()), static_cast<double>(balanced.negatives())));
}

void dataset_rule() {
  // 10 BWM, 20 HM, 20 BTB (connected), 50 each of CD, CF, AP, DLP.
  std::vector<std::string> ids;
  LabelSet labels;
  const std::vector<std::pair<std::string, int>> counts = {{"BWM", 10}, {"HM", 20}, {"BTB", 20}, {"CD", 50},
                                                           {"CF", 50},  {"AP", 50}, {"DLP", 50}};
  int n = 0;
  for (const auto& [role, c] : counts) {
    for (int i = 0; i < c; ++i) {
      const std::string id = role + std::to_string(1000 + n++);
      ids.push_back(id);
      labels.roles[id] = role;
    }
  }
  std::sort(ids.begin(), ids.end());
  FeatureMatrix features(ids, {"x"}, std::vector<double>(ids.size(), 0.0));
  bool ok = true;
  const auto& graph = default_role_graph();
  for (double fraction : {0.0, 0.25, 0.33, 1.0}) {
    const auto d = build_role_dataset("BWM", features, labels, graph, fraction, 9);
    const std::size_t expect_connected = static_cast<std::size_t>(std::ceil(fraction * 40 - 1e-9));
    ok = ok && d.positives() == 10 && d.disconnected_negatives == 200 && d.connected_negatives == expect_connected;
  }
  const auto d = build_role_dataset("BWM", features, labels, graph, 0.25, 9);
  std::size_t worst = 0;
  const auto folds = stratified_kfold(d.labels, 10, 3);
  for (const auto& f : folds) {
    std::size_t pos = 0;
    for (auto i : f.validation) pos += d.labels[i];
    const std::size_t neg = f.validation.size() - pos;
    // 10 positives over 10 folds -> exactly 1 each; 210 negatives -> 21 each.
    worst = std::max({worst, pos > 1 ? pos - 1 : 1 - pos, neg > 21 ? neg - 21 : 21 - neg});
  }
  ok = ok && folds.size() == 10 && worst <= 1;
  report(5, "role dataset and folds", ok,
         fmt("negatives=%g connected=%g fold_deviation=%g", static_cast<double>(d.negatives()),
             static_cast<double>(d.connected_negatives), static_cast<double>(worst)));
}

struct LeagueRun {
  SyntheticLeague league;
  FeatureTables tables;
  TrainResult result;
  ScoreMap scores;
  double seconds = 0;
};

LeagueRun run_league(std::size_t jobs) {
  LeagueRun r;
  const auto start = std::chrono::steady_clock::now();
  r.league = generate_league(default_league_spec(), jobs);
  r.tables = compute_features(r.league.matches, default_registry(), default_combinations(), {900.0, false, jobs});
  PipelineConfig cfg;
  cfg.training.jobs = jobs;
  r.result = train_all(r.tables.base, default_combinations(), r.league.labeled, default_role_graph(), cfg,
                       registry_hash(default_registry()));
  r.scores = score_players(r.result.bundle, r.tables.base, jobs);
  r.seconds = seconds_since(start);
  return r;
}

void recovery(const LeagueRun& run) {
  const auto trained = run.result.bundle.trained_roles();
  // Held-out players: everyone scored but not labeled.
  std::vector<std::string> held_out;
  for (const auto& [p, s] : run.scores)
    if (!run.league.labeled.roles.contains(p)) held_out.push_back(p);
  double min_auc = 1.0;
  std::string detail;
  for (auto role : kMidfielderRoles) {
    double cv_auc = 0.0;
    for (const auto& ev : run.result.report.evaluations)
      if (ev.role == role && ev.trained) cv_auc = ev.cv_auc;
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& p : held_out) {
      scores.push_back(run.scores.at(p).at(std::string(role)));
      labels.push_back(run.league.truth.roles.at(p) == role);
    }
    const double auc = roc_auc(scores, labels);
    min_auc = std::min({min_auc, cv_auc, auc});
    detail += std::string(role) + fmt(" cv=%.3f held=%.3f ", cv_auc, auc);
  }
  std::size_t hits = 0;
  for (const auto& [p, s] : run.scores) {
    std::string best = trained.front();
    for (const auto& r : trained)
      if (s.at(r) > s.at(best)) best = r;
    hits += best == run.league.truth.roles.at(p);
  }
  const double rate = static_cast<double>(hits) / static_cast<double>(run.scores.size());
  const bool ok = run.league.truth.roles.size() >= 300 && min_auc >= kMinAuc && rate >= kMinRecovery &&
                  run.seconds < kLeagueSeconds;
  report(6, "synthetic role recovery", ok,
         detail + fmt("argmax=%.3f players=%g seconds=%.1f", rate, static_cast<double>(run.scores.size()), run.seconds));
}

void neighbourhood(const LeagueRun& run) {
  // Mean score of role `col` over held-out players whose true role is `of`.
  auto mean = [&](std::string_view of, std::string_view col) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& [p, s] : run.scores) {
      if (run.league.labeled.roles.contains(p) || run.league.truth.roles.at(p) != of) continue;
      sum += s.at(std::string(col));
      ++n;
    }
    return n ? sum / static_cast<double>(n) : std::nan("");
  };
  const double btb_bwm = mean("BTB", "BWM"), btb_ap = mean("BTB", "AP");
  const double ap_hm = mean("AP", "HM");
  double ap_other = 1e9;
  for (auto r : {"BWM", "DLP", "BTB"}) ap_other = std::min(ap_other, mean("AP", r));
  const bool ok = btb_bwm > btb_ap && ap_hm < ap_other;
  report(7, "role neighbourhoods", ok,
         fmt("BTB:BWM=%.4f BTB:AP=%.4f", btb_bwm, btb_ap) + fmt(" AP:HM=%.4f AP:min(other)=%.4f", ap_hm, ap_other));
}

void determinism(const LeagueRun& first) {
  const auto second = run_league(2);
  const bool bundle_eq = bundle_to_json(first.result.bundle) == bundle_to_json(second.result.bundle);
  const bool report_eq = report_to_json(first.result.report) == report_to_json(second.result.report);
  report(8, "determinism", bundle_eq && report_eq,
         std::string("bundle ") + (bundle_eq ? "identical" : "differs") + ", report " +
             (report_eq ? "identical" : "differs"));
}

}  // namespace

int main() {
  selector();
  distance_law();
  learner();
  smote_check();
  dataset_rule();
  const auto run = run_league(1);
  recovery(run);
  neighbourhood(run);
  determinism(run);
  return failures == 0 ? 0 : 1;
}
