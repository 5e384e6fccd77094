#include "weaklink_app/app.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "detail.hpp"
#include "weaklink/constants.hpp"
#include "weaklink/error.hpp"
#include "weaklink/version.hpp"

namespace weaklink::app {
namespace {

struct Entry {
  const char* name;
  const char* block;
  detail::Command run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> all = {
      {"films-classify", "films", detail::films_classify},
      {"sns-fit", "sns", detail::sns_fit},
      {"shapiro-sim", "rcsj", detail::shapiro_sim},
      {"shapiro-detect", "shapiro_detect", detail::shapiro_detect},
      {"transmon", "transmon", detail::transmon},
      {"squash-fit", "squash", detail::squash_fit},
      {"circle-fit", "circle", detail::circle_fit},
      {"at-calibrate", "autler_townes", detail::at_calibrate},
      {"fraunhofer", "fraunhofer", detail::fraunhofer},
      {"iv-extract", "iv", detail::iv_extract},
      {"eth-invert", "eth", detail::eth_invert},
  };
  return all;
}

const char* const kModules[] = {"physcore", "films", "cpr",        "sns-fit", "rcsj-sim",
                                "transmon-spec", "mw-fit", "flux-pattern", "iv-features",
                                "cli-io"};

[[noreturn]] void rethrow(ErrorKind kind, const std::string& what) {
  switch (kind) {
    case ErrorKind::Domain: throw DomainError(what);
    case ErrorKind::ModelValidity: throw ModelValidityError(what);
    case ErrorKind::InsufficientData: throw InsufficientDataError(what);
    case ErrorKind::Schema: throw SchemaError(what);
    case ErrorKind::Convergence: throw ConvergenceError(what);
  }
  throw DomainError(what);
}

Json hashed_view(const Json& document) {
  Json copy = document;
  copy.erase("output_dir");
  return copy;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : registry()) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

Json load_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config file " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(fmt::format("config {}: {}", path.string(), e.what()));
  }
}

void apply_override(Json& document, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw SchemaError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &document;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw SchemaError("override '" + assignment + "' has an empty key segment");
    if (!node->is_object()) {
      throw SchemaError("override '" + assignment + "': '" + part + "' is below a non-object");
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = Json::object();
    start = dot + 1;
  }
}

RunConfig make_config(Json document, const std::filesystem::path& base_dir) {
  if (!document.is_object()) throw SchemaError("config: top level must be an object");
  RunConfig cfg;
  const detail::Block top(document, "config");
  cfg.command = top.text("command");
  if (std::find(commands().begin(), commands().end(), cfg.command) == commands().end()) {
    throw SchemaError("config.command: unknown subcommand '" + cfg.command + "'");
  }
  const long seed = top.integer("seed", 0);
  if (seed < 0) top.fail("seed", "must be non-negative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.output_dir = top.text("output_dir", "out/" + cfg.command);
  cfg.base_dir = base_dir;
  cfg.document = std::move(document);
  return cfg;
}

std::string config_hash(const RunConfig& config) {
  return io::fnv1a64_hex(hashed_view(config.document).dump());
}

ResultBundle run(const RunConfig& config) {
  const auto it = std::find_if(registry().begin(), registry().end(),
                               [&](const Entry& e) { return config.command == e.name; });
  if (it == registry().end()) throw SchemaError("unknown subcommand '" + config.command + "'");

  detail::Context ctx{config, config_hash(config), std::mt19937_64(config.seed), {}, {}, {}};
  try {
    it->run(ctx);
  } catch (const Error& e) {
    rethrow(e.kind(), fmt::format("{} [{}]: {}", it->name, it->block, e.what()));
  }

  ResultBundle bundle;
  bundle.config_hash = ctx.hash;
  bundle.summary = ctx.report;

  Json report = {{"command", config.command}, {"config_hash", ctx.hash}, {"result", ctx.report}};
  ctx.files.emplace_back("report.json", report.dump(2) + "\n");

  Json provenance;
  provenance["command"] = config.command;
  provenance["config_hash"] = ctx.hash;
  provenance["seed"] = config.seed;
  provenance["constants"] = kConstants.version;
  provenance["library_version"] = kVersion;
  for (const char* m : kModules) provenance["modules"][m] = kVersion;
  provenance["inputs"] = Json::array();
  for (const auto& [path, h] : ctx.inputs) {
    provenance["inputs"].push_back({{"path", path}, {"fnv1a64", h}});
  }
  provenance["outputs"] = Json::array();
  for (const auto& [name, content] : ctx.files) {
    provenance["outputs"].push_back({{"file", name}, {"fnv1a64", io::fnv1a64_hex(content)}});
  }
  provenance["config"] = hashed_view(config.document);

  std::filesystem::create_directories(config.output_dir);
  for (const auto& [name, content] : ctx.files) {
    const auto path = config.output_dir / name;
    io::write_text(path, content);
    bundle.outputs.push_back(path);
  }
  const auto prov_path = config.output_dir / "provenance.json";
  io::write_text(prov_path, provenance.dump(2) + "\n");
  bundle.outputs.push_back(prov_path);
  return bundle;
}

}  // namespace weaklink::app
