// JSON schemas for statistic registries and key-feature combination specs,
// and the shipped default set.

#include <json.hpp>

#include "rolefinder/errors.hpp"
#include "rolefinder/features.hpp"
#include "rolefinder_defaults.hpp"

namespace rolefinder {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kRegistryFormat = "rolefinder-registry/1";
constexpr std::string_view kCombinationFormat = "rolefinder-combinations/1";

json parse_document(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

void check_format(const json& doc, std::string_view expected, std::string_view what) {
  if (!doc.is_object()) throw ValidationError(std::string(what) + ": expected a JSON object");
  auto it = doc.find("format");
  if (it == doc.end() || !it->is_string() || it->get<std::string>() != expected) {
    throw ValidationError(std::string(what) + ": expected \"format\": \"" + std::string(expected) + "\"");
  }
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& ctx) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  if (!it->is_array()) throw ValidationError(ctx + ": '" + key + "' must be an array");
  for (const auto& v : *it) {
    if (!v.is_string()) throw ValidationError(ctx + ": '" + key + "' entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::size_t qualifier_slot(const std::string& name, const std::string& ctx) {
  auto q = qualifier_index(name);
  if (!q) throw ValidationError(ctx + ": unknown qualifier '" + name + "'");
  return *q;
}

StatDefinition parse_stat(const json& s) {
  if (!s.is_object() || !s.contains("name") || !s["name"].is_string()) {
    throw ValidationError("registry: every statistic needs a string 'name'");
  }
  StatDefinition def;
  def.name = s["name"].get<std::string>();
  const std::string ctx = "registry statistic '" + def.name + "'";
  for (const auto& t : string_list(s, "types", ctx)) {
    auto type = event_type_from_string(t);
    if (!type) throw ValidationError(ctx + ": unknown event type '" + t + "'");
    def.filter.types.push_back(*type);
  }
  for (const auto& t : string_list(s, "subtypes", ctx)) {
    auto sub = subtype_from_string(t);
    if (!sub) throw ValidationError(ctx + ": unknown subtype '" + t + "'");
    def.filter.subtypes.push_back(*sub);
  }
  for (const auto& q : string_list(s, "require", ctx)) def.filter.required.push_back(qualifier_slot(q, ctx));
  for (const auto& q : string_list(s, "exclude", ctx)) def.filter.excluded.push_back(qualifier_slot(q, ctx));
  for (const auto& z : string_list(s, "zones", ctx)) {
    auto zone = zone_from_string(z);
    if (!zone) throw ValidationError(ctx + ": unknown zone '" + z + "'");
    def.zones.insert(*zone);
  }
  const std::string anchor = s.value("anchor", "start");
  if (anchor == "start") {
    def.anchor = ZoneAnchor::start;
  } else if (anchor == "end") {
    def.anchor = ZoneAnchor::end;
  } else {
    throw ValidationError(ctx + ": anchor must be 'start' or 'end'");
  }
  const std::string kind = s.value("value", "count");
  if (kind == "count") {
    def.kind = ValueKind::count;
  } else if (kind == "qualifier_weighted") {
    def.kind = ValueKind::qualifier_weighted;
  } else if (kind == "quality_weighted") {
    def.kind = ValueKind::quality_weighted;
  } else {
    throw ValidationError(ctx + ": unknown value kind '" + kind + "'");
  }
  if (auto w = s.find("weights"); w != s.end()) {
    if (!w->is_object()) throw ValidationError(ctx + ": 'weights' must be an object");
    for (const auto& [q, v] : w->items()) {
      if (!v.is_number()) throw ValidationError(ctx + ": weight for '" + q + "' must be a number");
      def.qualifier_weights.emplace_back(qualifier_slot(q, ctx), v.get<double>());
    }
  }
  return def;
}

}  // namespace

StatRegistry parse_registry(std::string_view text) {
  const json doc = parse_document(text, "registry");
  check_format(doc, kRegistryFormat, "registry");
  auto stats = doc.find("stats");
  if (stats == doc.end() || !stats->is_array() || stats->empty()) {
    throw ValidationError("registry: 'stats' must be a non-empty array");
  }
  std::vector<StatDefinition> defs;
  for (const auto& s : *stats) defs.push_back(parse_stat(s));
  return StatRegistry(std::move(defs), string_list(doc, "team_metrics", "registry"));
}

std::string registry_to_json(const StatRegistry& registry) {
  ordered_json doc;
  doc["format"] = kRegistryFormat;
  auto stats = ordered_json::array();
  const auto names = qualifier_manifest();
  for (const auto& s : registry.stats()) {
    ordered_json o;
    o["name"] = s.name;
    if (!s.filter.types.empty()) {
      auto a = ordered_json::array();
      for (auto ty : s.filter.types) a.push_back(to_string(ty));
      o["types"] = a;
    }
    if (!s.filter.subtypes.empty()) {
      auto a = ordered_json::array();
      for (auto st : s.filter.subtypes) a.push_back(to_string(st));
      o["subtypes"] = a;
    }
    if (!s.filter.required.empty()) {
      auto a = ordered_json::array();
      for (auto q : s.filter.required) a.push_back(names[q]);
      o["require"] = a;
    }
    if (!s.filter.excluded.empty()) {
      auto a = ordered_json::array();
      for (auto q : s.filter.excluded) a.push_back(names[q]);
      o["exclude"] = a;
    }
    if (!s.zones.empty()) {
      auto a = ordered_json::array();
      for (auto z : s.zones.to_vector()) a.push_back(to_string(z));
      o["zones"] = a;
    }
    if (s.anchor == ZoneAnchor::end) o["anchor"] = "end";
    if (s.kind == ValueKind::qualifier_weighted) o["value"] = "qualifier_weighted";
    if (s.kind == ValueKind::quality_weighted) o["value"] = "quality_weighted";
    if (!s.qualifier_weights.empty()) {
      ordered_json w = ordered_json::object();
      for (const auto& [q, v] : s.qualifier_weights) w[names[q]] = v;
      o["weights"] = w;
    }
    stats.push_back(std::move(o));
  }
  doc["stats"] = std::move(stats);
  if (!registry.team_metrics().empty()) doc["team_metrics"] = registry.team_metrics();
  return doc.dump(2) + "\n";
}

const StatRegistry& default_registry() {
  static const StatRegistry registry = parse_registry(defaults::kRegistryJson);
  return registry;
}

CombinationSpec parse_combinations(std::string_view text) {
  const json doc = parse_document(text, "combination spec");
  check_format(doc, kCombinationFormat, "combination spec");
  auto keys = doc.find("keys");
  if (keys == doc.end() || !keys->is_array() || keys->empty()) {
    throw ValidationError("combination spec: 'keys' must be a non-empty array");
  }
  CombinationSpec spec;
  for (const auto& k : *keys) {
    if (!k.is_object() || !k.contains("name") || !k["name"].is_string() || !k.contains("inputs") ||
        !k["inputs"].is_array()) {
      throw ValidationError("combination spec: every key needs 'name' and an 'inputs' array");
    }
    KeyFeature kf;
    kf.name = k["name"].get<std::string>();
    for (const auto& in : k["inputs"]) {
      if (!in.is_object() || !in.contains("column") || !in["column"].is_string()) {
        throw ValidationError("combination spec: key '" + kf.name + "' has an input without 'column'");
      }
      const double w = in.value("weight", 1.0);
      kf.inputs.emplace_back(in["column"].get<std::string>(), w);
    }
    spec.keys.push_back(std::move(kf));
  }
  return spec;
}

std::string combinations_to_json(const CombinationSpec& spec) {
  ordered_json doc;
  doc["format"] = kCombinationFormat;
  auto keys = ordered_json::array();
  for (const auto& k : spec.keys) {
    ordered_json o;
    o["name"] = k.name;
    auto inputs = ordered_json::array();
    for (const auto& [column, weight] : k.inputs) {
      inputs.push_back(ordered_json{{"column", column}, {"weight", weight}});
    }
    o["inputs"] = std::move(inputs);
    keys.push_back(std::move(o));
  }
  doc["keys"] = std::move(keys);
  return doc.dump(2) + "\n";
}

const CombinationSpec& default_combinations() {
  static const CombinationSpec spec = parse_combinations(defaults::kCombinationsJson);
  return spec;
}

}  // namespace rolefinder
