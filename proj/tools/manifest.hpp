#pragma once

// Run manifests: the effective configuration, input hashes and timestamps of one
// command invocation, written next to the artifacts it produced.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace rolefinder::cli {

struct RunManifest {
  std::string command;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;  // option -> effective value
  std::vector<std::pair<std::string, std::string>> inputs;  // path -> content hash
  std::vector<std::string> outputs;
  std::string started;
  std::string finished;
};

// "fnv1a64:<16 hex digits>" over the file bytes; directories hash every regular
// file beneath them in path order, including relative names.
std::string hash_path(const std::filesystem::path& path);

// ISO-8601 UTC. Honours SOURCE_DATE_EPOCH for reproducible manifests.
std::string utc_timestamp();

std::string manifest_to_json(const RunManifest& manifest);
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

// `<artifact>.manifest.json`
std::filesystem::path manifest_path_for(const std::filesystem::path& artifact);

}  // namespace rolefinder::cli
