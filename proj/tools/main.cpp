#include <CLI11.hpp>

#include <iostream>

#include "weaklink/error.hpp"
#include "weaklink/version.hpp"
#include "weaklink_app/app.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  long long seed = -1;
  std::vector<std::string> sets;
};

void add_run_options(CLI::App* cmd, Options& o, bool config_required) {
  auto* c = cmd->add_option("-c,--config", o.config, "JSON run configuration");
  if (config_required) c->required();
  cmd->add_option("-o,--out", o.out, "Output directory (overrides output_dir)");
  cmd->add_option("-s,--seed", o.seed, "RNG seed for synthetic data (overrides seed)");
  cmd->add_option("--set", o.sets, "Override a config field: dotted.key=value")
      ->allow_extra_args(false);
}

int execute(const std::string& subcommand, const Options& o) {
  using namespace weaklink;
  namespace fs = std::filesystem;
  app::Json doc = o.config.empty() ? app::Json::object() : app::load_document(o.config);
  if (!doc.is_object()) throw SchemaError("config: top level must be an object");
  if (!subcommand.empty()) {
    if (doc.contains("command") && doc["command"] != subcommand) {
      throw SchemaError("config.command: '" + doc["command"].dump() +
                        "' does not match subcommand '" + subcommand + "'");
    }
    doc["command"] = subcommand;
  }
  for (const auto& s : o.sets) app::apply_override(doc, s);
  if (!o.out.empty()) doc["output_dir"] = o.out;
  if (o.seed >= 0) doc["seed"] = o.seed;

  const fs::path base = o.config.empty() ? fs::current_path()
                                         : fs::absolute(o.config).parent_path();
  const auto cfg = app::make_config(std::move(doc), base);
  const auto bundle = app::run(cfg);
  std::cout << "config_hash " << bundle.config_hash << "\n";
  for (const auto& p : bundle.outputs) std::cout << "wrote " << p.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"weaklink: Josephson weak-link analysis"};
  cli.require_subcommand(1);
  cli.set_version_flag("--version", std::string(weaklink::kVersion));

  Options opts;
  std::string chosen;
  auto* run = cli.add_subcommand("run", "Run the subcommand named by the config's 'command'");
  add_run_options(run, opts, true);
  run->callback([&] { chosen = ""; });
  for (const auto& name : weaklink::app::commands()) {
    auto* sub = cli.add_subcommand(name, "Run " + name);
    add_run_options(sub, opts, false);
    sub->callback([&chosen, name] { chosen = name; });
  }
  auto* list = cli.add_subcommand("list", "List subcommands");
  list->callback([] {
    for (const auto& n : weaklink::app::commands()) std::cout << n << "\n";
  });

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (list->parsed()) return 0;

  try {
    return execute(chosen, opts);
  } catch (const weaklink::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return weaklink::exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
