#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "manifest.hpp"
#include "rolefinder/diagnostics.hpp"
#include "rolefinder/errors.hpp"
#include "rolefinder/league_io.hpp"
#include "rolefinder/role_pipeline.hpp"
#include "rolefinder/synthgen.hpp"
#include "rolefinder_defaults.hpp"

#ifndef ROLEFINDER_VERSION
#define ROLEFINDER_VERSION "0.0.0"
#endif

namespace rolefinder::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kFeatureMetaFormat = "rolefinder-features/1";

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failure for " + path.string());
}

fs::path sidecar_path(const fs::path& csv) { return csv.parent_path() / (csv.filename().string() + ".json"); }

std::string join(const std::vector<std::string>& parts, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

struct Invocation {
  std::ostream& out;
  std::ostream& err;
  const CLI::App& app;
  const CLI::App& command;
  std::size_t jobs = 1;
  std::string started;

  RunManifest manifest(std::uint64_t seed) const {
    RunManifest m;
    m.command = command.get_name();
    m.tool_version = ROLEFINDER_VERSION;
    m.seed = seed;
    m.started = started;
    for (const auto* app_ptr : {&app, &command}) {
      const std::string prefix = app_ptr == &app ? "" : command.get_name() + ".";
      for (const auto* opt : app_ptr->get_options()) {
        if (opt == app_ptr->get_help_ptr() || opt == app_ptr->get_config_ptr() || opt == app_ptr->get_version_ptr()) {
          continue;
        }
        const std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
        std::string value = opt->count() > 0 ? join(opt->results()) : opt->get_default_str();
        if (value == "{}") value.clear();
        if (value.empty() && opt->get_type_size() == 0) value = "false";
        m.config.emplace_back(prefix + name, value);
      }
    }
    return m;
  }
};

void finish(RunManifest m, const fs::path& path) {
  m.finished = utc_timestamp();
  write_manifest(path, m);
}

LabelSet load_labels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return read_labels(in);
}

std::string labels_text(const LabelSet& labels) {
  std::ostringstream ss;
  write_labels(ss, labels);
  return ss.str();
}

RoleGraph load_graph(const std::string& path) {
  return path.empty() ? default_role_graph() : parse_role_graph(read_text(path));
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string spec;
  std::string out;
  std::uint64_t seed = 0;
};

void cmd_synth(const Invocation& inv, const SynthArgs& a, bool seed_given) {
  LeagueSpec spec = a.spec.empty() ? default_league_spec() : parse_league_spec(read_text(a.spec));
  if (seed_given) spec.seed = a.seed;
  auto m = inv.manifest(spec.seed);
  if (!a.spec.empty()) m.inputs.emplace_back(a.spec, hash_path(a.spec));

  const auto league = generate_league(spec, inv.jobs);
  const fs::path dir = a.out;
  write_league(dir, league.matches);
  write_text(dir / "labels.csv", labels_text(league.labeled));
  write_text(dir / "truth.csv", labels_text(league.truth));
  write_text(dir / "league.json", league_spec_to_json(spec));
  m.outputs = {kMetaFileName, "labels.csv", "truth.csv", "league.json"};
  finish(m, dir / "manifest.json");

  const auto s = summarize(league.matches);
  inv.out << "matches: " << s.matches << "\nevents: " << s.events << "\nplayers: " << s.players
          << "\nlabeled: " << league.labeled.roles.size() << "\nwritten: " << dir.string() << '\n';
}

// --- ingest ----------------------------------------------------------------

struct IngestArgs {
  std::vector<std::string> paths;
  bool strict = false;
  std::string out;
};

void cmd_ingest(const Invocation& inv, const IngestArgs& a) {
  std::vector<MatchRecord> matches;
  std::vector<std::string> errors;
  auto m = inv.manifest(0);
  for (const auto& p : a.paths) {
    auto part = load_league(p, ParseOptions{a.strict}, a.strict ? nullptr : &errors);
    for (auto& r : part) matches.push_back(std::move(r));
    m.inputs.emplace_back(p, hash_path(p));
  }
  for (const auto& e : errors) inv.err << "skipped " << e << '\n';
  const auto s = summarize(matches);
  inv.out << "matches: " << s.matches << "\nevents: " << s.events << "\nplayers: " << s.players << '\n';
  for (const auto& [competition, n] : s.matches_per_competition) {
    inv.out << "competition " << competition << ": " << n << " matches\n";
  }
  if (!errors.empty()) inv.out << "skipped matches: " << errors.size() << '\n';
  if (!a.out.empty()) {
    write_league(a.out, matches);
    m.outputs = {kMetaFileName};
    finish(m, fs::path(a.out) / "manifest.json");
  }
}

// --- features --------------------------------------------------------------

struct FeaturesArgs {
  std::string data;
  std::string registry;
  std::string combos;
  double min_minutes = 900.0;
  bool per_competition = false;
  bool strict = false;
  std::string out;
};

void cmd_features(const Invocation& inv, const FeaturesArgs& a) {
  auto m = inv.manifest(0);
  const auto matches = load_league(a.data, ParseOptions{a.strict});
  m.inputs.emplace_back(a.data, hash_path(a.data));
  const StatRegistry registry = a.registry.empty() ? default_registry() : parse_registry(read_text(a.registry));
  const CombinationSpec combos = a.combos.empty() ? default_combinations() : parse_combinations(read_text(a.combos));
  if (!a.registry.empty()) m.inputs.emplace_back(a.registry, hash_path(a.registry));
  if (!a.combos.empty()) m.inputs.emplace_back(a.combos, hash_path(a.combos));

  const auto tables = compute_features(matches, registry, combos, {a.min_minutes, a.per_competition, inv.jobs});
  const auto all = hconcat(tables.base, tables.keys);

  const fs::path out = a.out;
  std::ostringstream csv;
  write_csv(csv, all);
  write_text(out, csv.str());

  const fs::path manifest = manifest_path_for(out);
  ordered_json meta;
  meta["format"] = kFeatureMetaFormat;
  meta["manifest"] = manifest.filename().string();
  meta["registry_hash"] = registry_hash(registry);
  meta["min_minutes"] = a.min_minutes;
  meta["per_competition"] = a.per_competition;
  meta["groups"] = ordered_json{{"normalized", tables.normalized.columns()},
                                {"team", tables.team.columns()},
                                {"keys", tables.keys.columns()}};
  meta["combinations"] = ordered_json::parse(combinations_to_json(combos));
  write_text(sidecar_path(out), meta.dump(2) + "\n");
  m.outputs = {out.filename().string(), sidecar_path(out).filename().string()};
  finish(m, manifest);

  inv.out << "players: " << all.rows() << "\ncolumns: " << all.cols() << " (normalized "
          << tables.normalized.cols() << ", team " << tables.team.cols() << ", key " << tables.keys.cols()
          << ")\nwritten: " << out.string() << '\n';
}

struct FeatureFile {
  FeatureMatrix base;
  CombinationSpec combinations;
  std::string registry_hash;
};

FeatureFile load_features(const fs::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot read " + csv_path.string());
  const auto all = read_csv(in);
  const fs::path meta_path = sidecar_path(csv_path);
  if (!fs::exists(meta_path)) throw IoError("missing feature metadata " + meta_path.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_text(meta_path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(meta_path.string() + ": " + e.what());
  }
  if (!meta.is_object() || meta.value("format", "") != kFeatureMetaFormat) {
    throw ValidationError(meta_path.string() + ": not a feature metadata file");
  }
  FeatureFile f;
  try {
    auto columns = meta.at("groups").at("normalized").get<std::vector<std::string>>();
    for (auto& c : meta.at("groups").at("team").get<std::vector<std::string>>()) columns.push_back(c);
    for (const auto& c : columns) {
      if (!all.column_index(c)) throw ValidationError(csv_path.string() + ": column '" + c + "' missing");
    }
    f.base = all.select_columns(columns);
    f.combinations = parse_combinations(meta.at("combinations").dump());
    f.registry_hash = meta.value("registry_hash", "");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(meta_path.string() + ": " + e.what());
  }
  return f;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string features;
  std::string labels;
  std::string graph;
  std::vector<double> alpha_grid = PipelineConfig{}.alpha_grid;
  std::vector<double> beta_grid = PipelineConfig{}.beta_grid;
  std::uint64_t seed = 0;
  std::size_t folds = 10;
  std::size_t epochs = 100;
  double learning_rate = 0.01;
  std::size_t smote_neighbors = 5;
  double connected_fraction = kDefaultConnectedFraction;
  std::string ranges_from = "positives";
  std::vector<std::string> roles;
  std::string out;
  std::string report;
  std::string grid_csv;
  std::string format = "text";
};

void cmd_train(const Invocation& inv, const TrainArgs& a) {
  auto m = inv.manifest(a.seed);
  const auto features = load_features(a.features);
  const auto labels = load_labels(a.labels);
  const auto graph = load_graph(a.graph);
  m.inputs.emplace_back(a.features, hash_path(a.features));
  m.inputs.emplace_back(sidecar_path(a.features).string(), hash_path(sidecar_path(a.features)));
  m.inputs.emplace_back(a.labels, hash_path(a.labels));
  if (!a.graph.empty()) m.inputs.emplace_back(a.graph, hash_path(a.graph));

  PipelineConfig cfg;
  cfg.training.seed = a.seed;
  cfg.training.folds = a.folds;
  cfg.training.epochs = a.epochs;
  cfg.training.learning_rate = a.learning_rate;
  cfg.training.smote_neighbors = a.smote_neighbors;
  cfg.training.jobs = inv.jobs;
  cfg.alpha_grid = a.alpha_grid;
  cfg.beta_grid = a.beta_grid;
  cfg.connected_fraction = a.connected_fraction;
  cfg.ranges_from_positives = a.ranges_from == "positives";
  cfg.roles = a.roles;

  auto result = train_all(features.base, features.combinations, labels, graph, cfg, features.registry_hash);
  const fs::path out = a.out;
  const fs::path report = a.report.empty() ? fs::path(out.string() + ".report.json") : fs::path(a.report);
  const fs::path manifest = manifest_path_for(out);
  result.bundle.manifest = manifest.filename().string();
  result.report.manifest = manifest.filename().string();
  write_text(out, bundle_to_json(result.bundle));
  write_text(report, report_to_json(result.report));
  m.outputs = {out.filename().string(), report.filename().string()};
  if (!a.grid_csv.empty()) {
    write_text(a.grid_csv, report_grid_csv(result.report));
    m.outputs.push_back(fs::path(a.grid_csv).filename().string());
  }
  finish(m, manifest);

  if (a.format == "csv") {
    inv.out << report_grid_csv(result.report);
    return;
  }
  inv.out << report_grid_text(result.report) << '\n' << report_roles_text(result.report) << '\n';
  inv.out << "selected: alpha=" << format_double(result.report.best.alpha)
          << " beta=" << format_double(result.report.best.beta) << '\n';
}

// --- rank / score ----------------------------------------------------------

struct ScoreArgs {
  std::string bundle;
  std::string features;
  std::string labels;
  std::string role;
  std::size_t top_k = 4;
  std::string filter = "all";
  std::vector<std::string> columns;
  std::string format = "text";
  std::string out;
};

struct Scored {
  RoleModelBundle bundle;
  ScoreMap scores;
  LabelSet labels;
};

Scored score_inputs(const Invocation& inv, const ScoreArgs& a) {
  Scored s;
  s.bundle = bundle_from_json(read_text(a.bundle));
  std::ifstream in(a.features);
  if (!in) throw IoError("cannot read " + a.features);
  const auto features = read_csv(in);
  if (!a.labels.empty()) s.labels = load_labels(a.labels);
  s.scores = score_players(s.bundle, features, inv.jobs);
  return s;
}

void cmd_rank(const Invocation& inv, const ScoreArgs& a) {
  auto s = score_inputs(inv, a);
  const auto* model = s.bundle.find(a.role);
  if (!model) throw ValidationError("unknown role '" + a.role + "'");
  if (!model->trained) throw ValidationError("role '" + a.role + "' is not trained: " + model->untrained_reason);
  const auto filter = rank_filter_from_string(a.filter);
  if (filter != RankFilter::all && a.labels.empty()) {
    throw ValidationError("--filter " + a.filter + " needs --labels");
  }
  const auto ranked = rank_players(s.scores, a.role, a.top_k, filter, s.labels);
  std::vector<std::string> columns{a.role};
  for (const auto& c : a.columns) {
    if (c == "all") {
      columns = s.bundle.trained_roles();
      break;
    }
    if (c != a.role) columns.push_back(c);
  }
  std::vector<std::string> players;
  for (const auto& r : ranked) players.push_back(r.player);
  inv.out << format_score_table(s.scores, players, columns, s.labels, a.format == "csv");
}

void cmd_score(const Invocation& inv, const ScoreArgs& a) {
  auto s = score_inputs(inv, a);
  std::vector<std::string> players;
  for (const auto& [p, _] : s.scores) players.push_back(p);
  const auto roles = a.columns.empty() ? s.bundle.trained_roles() : a.columns;
  const auto table = format_score_table(s.scores, players, roles, s.labels, a.format == "csv" || !a.out.empty());
  if (a.out.empty()) {
    inv.out << table;
    return;
  }
  auto m = inv.manifest(s.bundle.seed);
  m.inputs = {{a.bundle, hash_path(a.bundle)}, {a.features, hash_path(a.features)}};
  if (!a.labels.empty()) m.inputs.emplace_back(a.labels, hash_path(a.labels));
  write_text(a.out, table);
  m.outputs = {fs::path(a.out).filename().string()};
  finish(m, manifest_path_for(a.out));
  inv.out << "scored " << players.size() << " players on " << roles.size() << " roles\nwritten: " << a.out << '\n';
}

// --- defaults --------------------------------------------------------------

void cmd_defaults(const Invocation& inv, const std::string& what, const std::string& out) {
  std::string_view text;
  if (what == "registry") {
    text = defaults::kRegistryJson;
  } else if (what == "combinations") {
    text = defaults::kCombinationsJson;
  } else if (what == "role-graph") {
    text = defaults::kRoleGraphJson;
  } else if (what == "league") {
    text = defaults::kLeagueJson;
  } else {
    throw ValidationError("unknown default '" + what + "' (registry, combinations, role-graph, league)");
  }
  if (out.empty()) {
    inv.out << text;
  } else {
    write_text(out, text);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rolefinder: player role classification from match event data", "rolefinder"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file (flags override it)");
  app.set_version_flag("--version", ROLEFINDER_VERSION);
  std::size_t jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic league with planted role archetypes");
  synth_cmd->add_option("--spec", synth.spec, "League spec JSON (default: shipped spec)");
  synth_cmd->add_option("--out", synth.out, "Output league directory")->required();
  auto* synth_seed = synth_cmd->add_option("--seed", synth.seed, "Override the spec's seed");

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate league directories and print counts");
  ingest_cmd->add_option("paths", ingest.paths, "League directories")->required();
  ingest_cmd->add_flag("--strict", ingest.strict, "Stop at the first error; reject unknown types");
  ingest_cmd->add_option("--out", ingest.out, "Write the validated, canonical league here");

  FeaturesArgs feat;
  auto* feat_cmd = app.add_subcommand("features", "Compute the per-player feature matrix");
  feat_cmd->add_option("--data", feat.data, "League directory")->required();
  feat_cmd->add_option("--registry", feat.registry, "Statistic registry JSON (default: shipped registry)");
  feat_cmd->add_option("--combos", feat.combos, "Key-feature combination JSON (default: shipped spec)");
  feat_cmd->add_option("--min-minutes", feat.min_minutes, "Drop players with fewer minutes");
  feat_cmd->add_flag("--per-competition", feat.per_competition, "Standardize key features per competition");
  feat_cmd->add_flag("--strict", feat.strict, "Reject unknown event types and subtypes");
  feat_cmd->add_option("--out", feat.out, "Output CSV")->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Grid-search, evaluate and fit every role model");
  train_cmd->add_option("--features", train.features, "Feature CSV from `features`")->required();
  train_cmd->add_option("--labels", train.labels, "Labels CSV (player_id,role)")->required();
  train_cmd->add_option("--graph", train.graph, "Role graph JSON (default: shipped graph)");
  train_cmd->add_option("--alpha-grid", train.alpha_grid, "L2 strengths")->delimiter(',');
  train_cmd->add_option("--beta-grid", train.beta_grid, "Optimal-range boundaries")->delimiter(',');
  train_cmd->add_option("--seed", train.seed, "Seed for every random component");
  train_cmd->add_option("--folds", train.folds, "Cross-validation folds");
  train_cmd->add_option("--epochs", train.epochs, "Maximum SGD epochs");
  train_cmd->add_option("--learning-rate", train.learning_rate, "Initial SGD step size");
  train_cmd->add_option("--smote-neighbors", train.smote_neighbors, "SMOTE neighbourhood size");
  train_cmd->add_option("--connected-fraction", train.connected_fraction, "Share of connected-role negatives");
  train_cmd->add_option("--ranges-from", train.ranges_from, "Rows the optimal ranges are fitted on")
      ->check(CLI::IsMember({"positives", "all"}));
  train_cmd->add_option("--roles", train.roles, "Roles to train (default: all)")->delimiter(',');
  train_cmd->add_option("--out", train.out, "Output model bundle")->required();
  train_cmd->add_option("--report", train.report, "Report JSON (default: <out>.report.json)");
  train_cmd->add_option("--grid-csv", train.grid_csv, "Also write the grid table as CSV");
  train_cmd->add_option("--format", train.format, "Stdout table format")->check(CLI::IsMember({"text", "csv"}));

  ScoreArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Rank players by one role's probability");
  rank_cmd->add_option("--bundle", rank.bundle, "Model bundle")->required();
  rank_cmd->add_option("--features", rank.features, "Feature CSV")->required();
  rank_cmd->add_option("--role", rank.role, "Role to rank by")->required();
  rank_cmd->add_option("--top-k", rank.top_k, "Rows to print");
  rank_cmd->add_option("--filter", rank.filter, "all, labeled, unlabeled or mixed")
      ->check(CLI::IsMember({"all", "labeled", "unlabeled", "mixed"}));
  rank_cmd->add_option("--labels", rank.labels, "Labels CSV (marks labeled players)");
  rank_cmd->add_option("--columns", rank.columns, "Extra role columns, or 'all'")->delimiter(',');
  rank_cmd->add_option("--format", rank.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Probability of every trained role for every player");
  score_cmd->add_option("--bundle", score.bundle, "Model bundle")->required();
  score_cmd->add_option("--features", score.features, "Feature CSV")->required();
  score_cmd->add_option("--labels", score.labels, "Labels CSV (marks labeled players)");
  score_cmd->add_option("--columns", score.columns, "Roles to include (default: all trained)")->delimiter(',');
  score_cmd->add_option("--format", score.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  score_cmd->add_option("--out", score.out, "Write CSV here instead of stdout");

  std::string default_what;
  std::string default_out;
  auto* defaults_cmd = app.add_subcommand("defaults", "Print a shipped data file");
  defaults_cmd->add_option("what", default_what, "registry, combinations, role-graph or league")->required();
  defaults_cmd->add_option("--out", default_out, "Write to this path instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const auto previous = set_warning_handler([&err](const std::string& msg) { err << "warning: " << msg << '\n'; });
  int code = kExitOk;
  try {
    const CLI::App* command = app.get_subcommands().front();
    Invocation inv{out, err, app, *command, jobs, utc_timestamp()};
    if (command == synth_cmd) {
      cmd_synth(inv, synth, synth_seed->count() > 0);
    } else if (command == ingest_cmd) {
      cmd_ingest(inv, ingest);
    } else if (command == feat_cmd) {
      cmd_features(inv, feat);
    } else if (command == train_cmd) {
      cmd_train(inv, train);
    } else if (command == rank_cmd) {
      cmd_rank(inv, rank);
    } else if (command == score_cmd) {
      cmd_score(inv, score);
    } else if (command == defaults_cmd) {
      cmd_defaults(inv, default_what, default_out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    code = kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    code = kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    code = kExitIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    code = kExitInternal;
  }
  set_warning_handler(previous);
  return code;
}

}  // namespace rolefinder::cli
