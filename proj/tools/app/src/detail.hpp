#pragma once

// Shared plumbing for the subcommands: typed access to config blocks with
// path-qualified diagnostics, input registration and the in-memory output set.

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "weaklink/cpr.hpp"
#include "weaklink/io.hpp"
#include "weaklink_app/app.hpp"

namespace weaklink::app::detail {

class Block {
 public:
  Block(const Json& json, std::string path);

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const;

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::string> texts(const std::string& key) const;

  /// Either an explicit array or {"start", "stop", "count"}.
  std::vector<double> grid(const std::string& key) const;

  Block child(const std::string& key) const;
  std::optional<Block> optional_child(const std::string& key) const;
  std::vector<Block> children(const std::string& key) const;

  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

 private:
  const Json& at(const std::string& key) const;

  const Json* json_;
  std::string path_;
};

/// Collected outputs of one run; nothing touches disk until the command
/// has finished without error.
struct Context {
  const RunConfig& config;
  std::string hash;
  std::mt19937_64 rng;
  std::vector<std::pair<std::string, std::string>> inputs;  // (as written, fnv1a64)
  std::vector<std::pair<std::string, std::string>> files;   // (name, content)
  Json report = Json::object();

  io::Table read(const std::string& relative, const std::string& schema);
  void csv(const std::string& name, const io::CsvDocument& doc);
};

cpr::CprModel parse_cpr(const Block& block);
Json describe_cpr(const cpr::CprModel& model);

using Command = void (*)(Context&);

void films_classify(Context& ctx);
void sns_fit(Context& ctx);
void shapiro_sim(Context& ctx);
void shapiro_detect(Context& ctx);
void transmon(Context& ctx);
void squash_fit(Context& ctx);
void circle_fit(Context& ctx);
void at_calibrate(Context& ctx);
void fraunhofer(Context& ctx);
void iv_extract(Context& ctx);
void eth_invert(Context& ctx);

}  // namespace weaklink::app::detail
