#include "detail.hpp"

#include <fmt/format.h>

#include <sstream>

#include "weaklink/constants.hpp"
#include "weaklink/error.hpp"

namespace weaklink::app::detail {

Block::Block(const Json& json, std::string path) : json_(&json), path_(std::move(path)) {
  if (!json.is_object()) throw SchemaError(path_ + ": expected an object");
}

bool Block::has(const std::string& key) const { return json_->contains(key); }

void Block::fail(const std::string& key, const std::string& what) const {
  throw SchemaError(fmt::format("{}.{}: {}", path_, key, what));
}

const Json& Block::at(const std::string& key) const {
  const auto it = json_->find(key);
  if (it == json_->end()) fail(key, "required field missing");
  return *it;
}

double Block::number(const std::string& key) const {
  const Json& v = at(key);
  if (!v.is_number()) fail(key, "expected a number");
  return v.get<double>();
}

double Block::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long Block::integer(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const Json& v = at(key);
  if (!v.is_number_integer()) fail(key, "expected an integer");
  return v.get<long>();
}

bool Block::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Json& v = at(key);
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

std::string Block::text(const std::string& key) const {
  const Json& v = at(key);
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

std::string Block::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

std::vector<double> Block::numbers(const std::string& key) const {
  const Json& v = at(key);
  if (!v.is_array()) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) fail(key, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> Block::texts(const std::string& key) const {
  const Json& v = at(key);
  if (!v.is_array()) fail(key, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) fail(key, "expected an array of strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

std::vector<double> Block::grid(const std::string& key) const {
  const Json& v = at(key);
  if (v.is_array()) return numbers(key);
  const Block g = child(key);
  const double a = g.number("start");
  const double b = g.number("stop");
  const long n = g.integer("count", 0);
  if (n < 1) g.fail("count", "must be a positive integer");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

Block Block::child(const std::string& key) const {
  const Json& v = at(key);
  if (!v.is_object()) fail(key, "expected an object");
  return Block(v, path_ + "." + key);
}

std::optional<Block> Block::optional_child(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return child(key);
}

std::vector<Block> Block::children(const std::string& key) const {
  const Json& v = at(key);
  if (!v.is_array()) fail(key, "expected an array of objects");
  std::vector<Block> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_object()) fail(key, "expected an array of objects");
    out.emplace_back(v[i], fmt::format("{}.{}[{}]", path_, key, i));
  }
  return out;
}

io::Table Context::read(const std::string& relative, const std::string& schema) {
  const std::filesystem::path p = std::filesystem::path(relative).is_absolute()
                                      ? std::filesystem::path(relative)
                                      : config.base_dir / relative;
  const std::string text = io::read_text(p);
  inputs.emplace_back(relative, io::fnv1a64_hex(text));
  std::istringstream in(text);
  return io::parse_csv(in, schema, relative);
}

void Context::csv(const std::string& name, const io::CsvDocument& doc) {
  files.emplace_back(name, io::render_csv(doc, hash));
}

cpr::CprModel parse_cpr(const Block& b) {
  const std::string model = b.text("model");
  if (model == "sinusoidal") return cpr::Sinusoidal{b.number("ic_a")};
  if (model == "harmonic_series") {
    cpr::HarmonicSeries h;
    for (const auto& t : b.children("terms")) {
      const long k = t.integer("k", 0);
      if (k < 1) t.fail("k", "must be a positive integer");
      h.terms.push_back({static_cast<int>(k), t.number("amplitude_a")});
    }
    return h;
  }
  const double delta = b.number("delta_mev") * units::meV;
  if (model == "resonant_level") {
    return cpr::ResonantLevel{b.number("eth_over_delta") * delta, delta, b.number("r_n_ohm")};
  }
  if (model == "single_channel") {
    return cpr::SingleChannel{b.number("transmission"), delta, b.number("r_n_ohm", 1.0)};
  }
  b.fail("model", "unknown CPR model '" + model +
                      "' (sinusoidal, harmonic_series, resonant_level, single_channel)");
}

Json describe_cpr(const cpr::CprModel& model) {
  Json j;
  j["model"] = cpr::model_name(model);
  const auto ic = cpr::critical_current(model);
  j["critical_current_a"] = ic.current;
  j["phase_at_max_rad"] = ic.phase;
  return j;
}

}  // namespace weaklink::app::detail
