#pragma once

// Batch front end: configuration loading, the subcommand dispatcher and the
// provenance record written next to every run's outputs.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace weaklink::app {

using Json = nlohmann::json;

struct RunConfig {
  std::string command;
  Json document;                          // the full config, after overrides
  std::filesystem::path output_dir;
  std::filesystem::path base_dir;         // relative input paths resolve here
  std::uint64_t seed = 0;
};

/// Subcommand names in dispatch order.
const std::vector<std::string>& commands();

/// Reads a JSON config. Throws SchemaError for unreadable or malformed files.
Json load_document(const std::filesystem::path& path);

/// Applies `dotted.key=value`; the value is parsed as JSON when possible and
/// kept as a string otherwise.
void apply_override(Json& document, const std::string& assignment);

/// Validates the top level (command, seed, output_dir) and builds the config.
RunConfig make_config(Json document, const std::filesystem::path& base_dir);

/// FNV-1a over the canonical (sorted-key, compact) JSON of the config with
/// output_dir removed, so relocating outputs keeps the hash.
std::string config_hash(const RunConfig& config);

struct ResultBundle {
  std::string config_hash;
  std::vector<std::filesystem::path> outputs;  // in write order, provenance last
  Json summary;                                // the command's report block
};

/// Loads and validates every input, runs the command, then writes the
/// outputs and `provenance.json`. Module errors are rethrown with their
/// original kind, prefixed by the command and config block.
ResultBundle run(const RunConfig& config);

}  // namespace weaklink::app
