// Model bundle and training report serialization, plus the human-readable tables.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rolefinder/errors.hpp"
#include "rolefinder/role_pipeline.hpp"

namespace rolefinder {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kBundleFormat = "rolefinder-bundle";
constexpr std::string_view kReportFormat = "rolefinder-train-report/1";

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

std::string fixed(double v, int precision) {
  if (std::isnan(v)) return "-";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  return {buf, r.ptr};
}

// NaN is not representable in JSON.
ordered_json number_or_null(double v) { return std::isnan(v) ? ordered_json(nullptr) : ordered_json(v); }
double number_or_nan(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

ordered_json model_to_json(const LogisticModel& m) {
  return ordered_json{{"weights", m.weights},
                      {"bias", m.bias},
                      {"alpha", m.alpha},
                      {"epochs_run", m.epochs_run},
                      {"seed", m.seed},
                      {"learning_rate", m.learning_rate},
                      {"initial_objective", m.initial_objective},
                      {"final_objective", m.final_objective}};
}

LogisticModel model_from_json(const json& j) {
  LogisticModel m;
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.alpha = j.at("alpha").get<double>();
  m.epochs_run = j.at("epochs_run").get<std::size_t>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.learning_rate = j.at("learning_rate").get<double>();
  m.initial_objective = j.at("initial_objective").get<double>();
  m.final_objective = j.at("final_objective").get<double>();
  return m;
}

ordered_json standardization_to_json(const StandardizationParams& s) {
  std::vector<int> constant(s.constant.begin(), s.constant.end());
  return ordered_json{{"mean", s.mean}, {"sd", s.sd}, {"constant", constant}, {"clip", s.clip}};
}

StandardizationParams standardization_from_json(const json& j, const std::vector<std::string>& columns) {
  StandardizationParams s;
  s.columns = columns;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.sd = j.at("sd").get<std::vector<double>>();
  for (int c : j.at("constant").get<std::vector<int>>()) s.constant.push_back(c != 0);
  s.clip = j.at("clip").get<double>();
  if (s.mean.size() != columns.size() || s.sd.size() != columns.size() || s.constant.size() != columns.size()) {
    throw ValidationError("bundle: standardization does not match the feature manifest");
  }
  return s;
}

ordered_json ranges_to_json(const RoleRangeSet& r) {
  auto ranges = ordered_json::array();
  for (const auto& o : r.ranges) {
    ranges.push_back(ordered_json{{"feature", o.feature}, {"lower", o.lower}, {"upper", o.upper}, {"beta", o.beta}});
  }
  return ordered_json{{"fitted_on", r.fitted_on}, {"features", std::move(ranges)}};
}

RoleRangeSet ranges_from_json(const json& j, const std::string& role) {
  RoleRangeSet r;
  r.role = role;
  r.fitted_on = j.at("fitted_on").get<std::size_t>();
  for (const auto& o : j.at("features")) {
    r.ranges.push_back({o.at("feature").get<std::string>(), o.at("lower").get<double>(),
                        o.at("upper").get<double>(), o.at("beta").get<double>()});
  }
  return r;
}

ordered_json evaluation_to_json(const RoleEvaluation& e) {
  ordered_json o{{"role", e.role}, {"trained", e.trained}, {"positives", e.positives}, {"negatives", e.negatives}};
  if (e.trained) {
    o["folds"] = e.folds;
    o["cv_loss"] = e.cv_loss;
    o["cv_auc"] = e.cv_auc;
  } else {
    o["note"] = e.note;
  }
  return o;
}

std::string pad(std::string s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string bundle_to_json(const RoleModelBundle& bundle) {
  ordered_json doc;
  doc["format"] = kBundleFormat;
  doc["format_version"] = bundle.format_version;
  doc["manifest"] = bundle.manifest;
  doc["registry_hash"] = bundle.registry_hash;
  doc["seed"] = bundle.seed;
  doc["connected_fraction"] = bundle.connected_fraction;
  doc["ranges_from_positives"] = bundle.ranges_from_positives;
  doc["base_columns"] = bundle.base_columns;
  doc["combinations"] = ordered_json::parse(combinations_to_json(bundle.combinations));
  auto roles = ordered_json::array();
  for (const auto& r : bundle.roles) {
    ordered_json o{{"role", r.role}, {"trained", r.trained}, {"positives", r.positives}, {"negatives", r.negatives}};
    if (!r.trained) {
      o["reason"] = r.untrained_reason;
    } else {
      o["alpha"] = r.alpha;
      o["beta"] = r.beta;
      o["model"] = model_to_json(r.model);
      o["standardization"] = standardization_to_json(r.preprocessor.standardization);
      o["ranges"] = ranges_to_json(r.preprocessor.ranges);
    }
    roles.push_back(std::move(o));
  }
  doc["roles"] = std::move(roles);
  return doc.dump(2) + "\n";
}

RoleModelBundle bundle_from_json(std::string_view text) {
  const json doc = parse(text, "bundle");
  if (!doc.is_object() || doc.value("format", "") != kBundleFormat) {
    throw ValidationError("bundle: not a rolefinder model bundle");
  }
  RoleModelBundle b;
  try {
    b.format_version = doc.at("format_version").get<int>();
    if (b.format_version != kBundleFormatVersion) {
      throw ValidationError("bundle: unsupported format version " + std::to_string(b.format_version));
    }
    b.manifest = doc.value("manifest", "");
    b.registry_hash = doc.at("registry_hash").get<std::string>();
    b.seed = doc.at("seed").get<std::uint64_t>();
    b.connected_fraction = doc.at("connected_fraction").get<double>();
    b.ranges_from_positives = doc.at("ranges_from_positives").get<bool>();
    b.base_columns = doc.at("base_columns").get<std::vector<std::string>>();
    b.combinations = parse_combinations(doc.at("combinations").dump());
    for (const auto& o : doc.at("roles")) {
      RoleModel r;
      r.role = o.at("role").get<std::string>();
      r.trained = o.at("trained").get<bool>();
      r.positives = o.at("positives").get<std::size_t>();
      r.negatives = o.at("negatives").get<std::size_t>();
      if (!r.trained) {
        r.untrained_reason = o.value("reason", "");
      } else {
        r.alpha = o.at("alpha").get<double>();
        r.beta = o.at("beta").get<double>();
        r.model = model_from_json(o.at("model"));
        r.preprocessor.combinations = b.combinations;
        r.preprocessor.standardization = standardization_from_json(o.at("standardization"), b.base_columns);
        r.preprocessor.ranges = ranges_from_json(o.at("ranges"), r.role);
        if (r.model.weights.size() != r.preprocessor.ranges.size()) {
          throw ValidationError("bundle: role '" + r.role + "' has mismatched weights and ranges");
        }
      }
      b.roles.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bundle: ") + e.what());
  }
  return b;
}

std::string report_to_json(const TrainReport& report) {
  ordered_json doc;
  doc["format"] = kReportFormat;
  doc["manifest"] = report.manifest;
  doc["best"] = ordered_json{{"alpha", report.best.alpha}, {"beta", report.best.beta}, {"loss", report.best.loss}};
  doc["grid_roles"] = report.grid_roles;
  auto grid = ordered_json::array();
  for (std::size_t c = 0; c < report.grid.size(); ++c) {
    const auto& cell = report.grid[c];
    ordered_json o{{"alpha", cell.alpha}, {"beta", cell.beta}, {"loss", cell.loss}};
    auto per_role = ordered_json::array();
    if (c < report.grid_per_role.size()) {
      for (double l : report.grid_per_role[c]) per_role.push_back(number_or_null(l));
    }
    o["per_role"] = std::move(per_role);
    grid.push_back(std::move(o));
  }
  doc["grid"] = std::move(grid);
  auto roles = ordered_json::array();
  for (const auto& e : report.evaluations) roles.push_back(evaluation_to_json(e));
  doc["roles"] = std::move(roles);
  return doc.dump(2) + "\n";
}

TrainReport report_from_json(std::string_view text) {
  const json doc = parse(text, "report");
  if (!doc.is_object() || doc.value("format", "") != kReportFormat) {
    throw ValidationError("report: not a rolefinder training report");
  }
  TrainReport r;
  try {
    r.manifest = doc.value("manifest", "");
    const auto& best = doc.at("best");
    r.best = {best.at("alpha").get<double>(), best.at("beta").get<double>(), best.at("loss").get<double>()};
    r.grid_roles = doc.at("grid_roles").get<std::vector<std::string>>();
    for (const auto& o : doc.at("grid")) {
      r.grid.push_back({o.at("alpha").get<double>(), o.at("beta").get<double>(), o.at("loss").get<double>()});
      std::vector<double> per_role;
      for (const auto& l : o.at("per_role")) per_role.push_back(number_or_nan(l));
      r.grid_per_role.push_back(std::move(per_role));
    }
    for (const auto& o : doc.at("roles")) {
      RoleEvaluation e;
      e.role = o.at("role").get<std::string>();
      e.trained = o.at("trained").get<bool>();
      e.positives = o.at("positives").get<std::size_t>();
      e.negatives = o.at("negatives").get<std::size_t>();
      if (e.trained) {
        e.folds = o.at("folds").get<std::size_t>();
        e.cv_loss = o.at("cv_loss").get<double>();
        e.cv_auc = o.at("cv_auc").get<double>();
      } else {
        e.note = o.value("note", "");
      }
      r.evaluations.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("report: ") + e.what());
  }
  return r;
}

std::string report_grid_csv(const TrainReport& report) {
  std::string out = "alpha,beta,weighted_logistic_loss,best\n";
  for (const auto& c : report.grid) {
    out += format_double(c.alpha) + ',' + format_double(c.beta) + ',' + format_double(c.loss) + ',' +
           (c == report.best ? "1" : "0") + '\n';
  }
  return out;
}

std::string report_grid_text(const TrainReport& report) {
  std::vector<double> alphas;
  std::vector<double> betas;
  for (const auto& c : report.grid) {
    if (std::find(alphas.begin(), alphas.end(), c.alpha) == alphas.end()) alphas.push_back(c.alpha);
    if (std::find(betas.begin(), betas.end(), c.beta) == betas.end()) betas.push_back(c.beta);
  }
  std::sort(alphas.begin(), alphas.end(), std::greater<>());
  std::sort(betas.begin(), betas.end());

  constexpr std::size_t kWidth = 9;
  std::string out = pad("alpha\\beta", 10, true);
  for (double b : betas) out += pad(format_double(b), kWidth);
  out += '\n';
  for (double a : alphas) {
    out += pad(format_double(a), 10, true);
    for (double b : betas) {
      auto it = std::find_if(report.grid.begin(), report.grid.end(),
                             [&](const GridCell& c) { return c.alpha == a && c.beta == b; });
      std::string cell = it == report.grid.end() ? "-" : fixed(it->loss, 4);
      if (it != report.grid.end() && *it == report.best) cell += '*';
      out += pad(cell, kWidth);
    }
    out += '\n';
  }
  out += "best: alpha=" + format_double(report.best.alpha) + " beta=" + format_double(report.best.beta) +
         " loss=" + fixed(report.best.loss, 4) + " (*)\n";
  return out;
}

std::string report_roles_text(const TrainReport& report) {
  std::string out = pad("role", 6, true) + pad("pos", 6) + pad("neg", 6) + pad("folds", 7) + pad("cv_loss", 10) +
                    pad("cv_auc", 9) + "  note\n";
  for (const auto& e : report.evaluations) {
    out += pad(e.role, 6, true) + pad(std::to_string(e.positives), 6) + pad(std::to_string(e.negatives), 6);
    if (e.trained) {
      out += pad(std::to_string(e.folds), 7) + pad(fixed(e.cv_loss, 4), 10) + pad(fixed(e.cv_auc, 3), 9) + '\n';
    } else {
      out += pad("-", 7) + pad("-", 10) + pad("-", 9) + "  untrained: " + e.note + '\n';
    }
  }
  return out;
}

std::string format_score_table(const ScoreMap& scores, std::span<const std::string> players,
                               std::span<const std::string> roles, const LabelSet& labels, bool csv) {
  auto lookup = [&](const std::string& player, const std::string& role) {
    auto p = scores.find(player);
    if (p == scores.end()) throw ValidationError("no scores for player '" + player + "'");
    auto r = p->second.find(role);
    if (r == p->second.end()) throw ValidationError("role '" + role + "' has no trained model");
    return r->second;
  };
  std::size_t name_width = 6;
  for (const auto& p : players) name_width = std::max(name_width, p.size() + 2);

  std::string out;
  if (csv) {
    out = "player_id";
    for (const auto& r : roles) out += ',' + r;
    out += ",labeled\n";
  } else {
    out = pad("Player", name_width, true);
    for (const auto& r : roles) out += pad(r, 6);
    out += "  Labeled\n";
  }
  for (const auto& p : players) {
    const bool labeled = labels.roles.contains(p);
    if (csv) {
      out += p;
      for (const auto& r : roles) out += ',' + format_double(lookup(p, r));
      out += labeled ? ",yes\n" : ",no\n";
    } else {
      out += pad(p, name_width, true);
      for (const auto& r : roles) out += pad(fixed(lookup(p, r), 2), 6);
      out += labeled ? "  yes\n" : "  no\n";
    }
  }
  return out;
}

}  // namespace rolefinder
