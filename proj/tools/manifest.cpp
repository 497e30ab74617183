#include "manifest.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "rolefinder/errors.hpp"
#include "rolefinder/seed.hpp"

namespace rolefinder::cli {
namespace {

namespace fs = std::filesystem;

std::uint64_t hash_file(const fs::path& path, std::uint64_t h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a64({buf, static_cast<std::size_t>(in.gcount())}, h);
  }
  return h;
}

std::string hex(std::uint64_t h) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace

std::string hash_path(const fs::path& path) {
  std::uint64_t h = fnv1a64("");
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      h = fnv1a64(fs::relative(f, path).generic_string(), h);
      h = hash_file(f, h);
    }
  } else {
    h = hash_file(path, h);
  }
  return "fnv1a64:" + hex(h);
}

std::string utc_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json doc;
  doc["format"] = "rolefinder-manifest/1";
  doc["command"] = m.command;
  doc["tool_version"] = m.tool_version;
  doc["seed"] = m.seed;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.config) config[k] = v;
  doc["config"] = std::move(config);
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.inputs) inputs[k] = v;
  doc["inputs"] = std::move(inputs);
  doc["outputs"] = m.outputs;
  doc["started"] = m.started;
  doc["finished"] = m.finished;
  return doc.dump(2) + "\n";
}

void write_manifest(const fs::path& path, const RunManifest& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << manifest_to_json(m);
  if (!out) throw IoError("write failure for " + path.string());
}

fs::path manifest_path_for(const fs::path& artifact) {
  return artifact.parent_path() / (artifact.filename().string() + ".manifest.json");
}

}  // namespace rolefinder::cli
