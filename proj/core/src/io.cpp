#include "weaklink/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "weaklink/constants.hpp"
#include "weaklink/error.hpp"

namespace weaklink::io {
namespace {

enum class Kind { Temperature, Resistance, Current, Voltage, Frequency, Length, Plain, Dbm };

struct ColumnSpec {
  const char* name;
  Kind kind;
  bool required;
};

struct SchemaSpec {
  const char* id;
  std::vector<ColumnSpec> columns;
};

std::vector<ColumnSpec> plain(std::initializer_list<const char*> names) {
  std::vector<ColumnSpec> out;
  for (const char* n : names) out.push_back({n, Kind::Plain, true});
  return out;
}

const std::vector<SchemaSpec>& schemas() {
  static const std::vector<SchemaSpec> all = {
      {"rs_t", {{"temperature_K", Kind::Temperature, true}, {"rs_ohm_per_sq", Kind::Resistance, true}}},
      {"iv",
       {{"current_A", Kind::Current, true},
        {"voltage_V", Kind::Voltage, true},
        {"dvdi_ohm", Kind::Resistance, false}}},
      {"ic_t",
       {{"temperature_K", Kind::Temperature, true},
        {"ic_A", Kind::Current, true},
        {"sigma_A", Kind::Current, false}}},
      {"s21",
       {{"frequency_Hz", Kind::Frequency, true},
        {"re", Kind::Plain, true},
        {"im", Kind::Plain, true}}},
      {"shapiro",
       {{"power_dBm", Kind::Dbm, true},
        {"current_A", Kind::Current, true},
        {"voltage_V", Kind::Voltage, true},
        {"drive_A", Kind::Current, false},
        {"dvdi_ohm", Kind::Resistance, false}}},
      {"profile", {{"x_m", Kind::Length, true}, {"weight", Kind::Plain, true}}},
      {"sidebands",
       {{"applied_dBm", Kind::Dbm, true},
        {"frequency_Hz", Kind::Frequency, true},
        {"branch", Kind::Plain, true}}},
      // Result tables written by the command-line tool.
      {"rs_classes",
       plain({"thickness_nm", "phase_code", "slope_ohm_per_sq_K", "t_lo_K", "t_hi_K",
              "window_edge_rs_ohm_per_sq", "window_points"})},
      {"steps",
       plain({"q_num", "q_den", "exists", "voltage_V", "span_A", "points", "i_lo_A", "i_hi_A",
              "drive_A"})},
      {"transmon_levels",
       plain({"n_cut", "f01_Hz", "f12_Hz", "f23_Hz", "anharmonicity_Hz", "convergence_shift_Hz"})},
      {"rabi", plain({"power_dBm", "amplitude_sqrtW", "rabi_Hz"})},
      {"at_branches", plain({"applied_dBm", "device_dBm", "lower_Hz", "upper_Hz"})},
      {"pattern", plain({"B_mT", "ic_over_ic0"})},
      {"iv_features",
       plain({"curve", "ic_A", "ic_negative_A", "r_n_ohm", "icrn_V", "rule_code", "hysteretic",
              "insulating", "v_c_V", "r_low_ohm"})},
      {"eth", plain({"ab_fraction", "eth_over_delta", "eth_meV"})},
  };
  return all;
}

std::optional<double> unit_scale(Kind kind, const std::string& unit) {
  static const std::map<Kind, std::map<std::string, double>> table = {
      {Kind::Temperature, {{"K", 1.0}, {"mK", 1e-3}}},
      {Kind::Resistance,
       {{"ohm", 1.0}, {"Ohm", 1.0}, {"kohm", 1e3}, {"kOhm", 1e3}, {"Mohm", 1e6}, {"MOhm", 1e6}}},
      {Kind::Current, {{"A", 1.0}, {"mA", 1e-3}, {"uA", 1e-6}, {"nA", 1e-9}, {"pA", 1e-12}}},
      {Kind::Voltage, {{"V", 1.0}, {"mV", 1e-3}, {"uV", 1e-6}, {"nV", 1e-9}}},
      {Kind::Frequency, {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}}},
      {Kind::Length, {{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}}},
      {Kind::Plain, {{"1", 1.0}, {"", 1.0}}},
      {Kind::Dbm, {{"dBm", 1.0}}},
  };
  const auto& units = table.at(kind);
  const auto it = units.find(unit);
  if (it == units.end()) return std::nullopt;
  return it->second;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw SchemaError(where + ": cannot parse number '" + text + "'");
  }
  if (!std::isfinite(v)) throw SchemaError(where + ": non-finite value '" + text + "'");
  return v;
}

[[noreturn]] void row_error(const Table& t, std::size_t row, const std::string& what) {
  throw SchemaError(fmt::format("{}:{}: {}", t.source, t.lines.at(row), what));
}

void require_increasing(const Table& t, const std::string& column) {
  const auto& v = t.col(column);
  for (std::size_t r = 1; r < v.size(); ++r) {
    if (!(v[r] > v[r - 1])) {
      row_error(t, r, fmt::format("{} not strictly increasing ({} after {})", column,
                                  format_number(v[r]), format_number(v[r - 1])));
    }
  }
}

}  // namespace

const std::vector<double>& Table::col(const std::string& column) const {
  const auto it = data.find(column);
  if (it == data.end()) throw SchemaError(source + ": missing column '" + column + "'");
  return it->second;
}

const std::string& Table::require_meta(const std::string& key) const {
  const auto it = meta.find(key);
  if (it == meta.end()) {
    throw SchemaError(source + ": header line '# " + key + ":' is required for schema " + schema);
  }
  return it->second;
}

double Table::meta_number(const std::string& key) const {
  return parse_number(require_meta(key), source + ": header " + key);
}

const std::vector<std::string>& schema_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& s : schemas()) out.emplace_back(s.id);
    return out;
  }();
  return ids;
}

Table parse_csv(std::istream& in, const std::string& expected_schema, const std::string& source) {
  const auto spec_it = std::find_if(schemas().begin(), schemas().end(),
                                    [&](const SchemaSpec& s) { return expected_schema == s.id; });
  if (spec_it == schemas().end()) {
    throw SchemaError("unknown schema id '" + expected_schema + "'");
  }
  const SchemaSpec& spec = *spec_it;

  Table t;
  t.source = source;
  std::map<std::string, std::string> unit_override;
  std::vector<double> scale;
  std::vector<const ColumnSpec*> column_spec;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    const std::string where = fmt::format("{}:{}", source, line_no);
    if (text.empty()) continue;
    if (text.front() == '#') {
      if (header_seen) throw SchemaError(where + ": header line after the column row");
      const std::string body = trim(std::string_view(text).substr(1));
      const auto colon = body.find(':');
      if (colon == std::string::npos) continue;  // free-form comment
      const std::string key = trim(std::string_view(body).substr(0, colon));
      const std::string value = trim(std::string_view(body).substr(colon + 1));
      if (key == "schema") {
        t.schema = value;
      } else if (key.rfind("unit.", 0) == 0) {
        unit_override[key.substr(5)] = value;
      } else {
        t.meta[key] = value;
      }
      continue;
    }
    if (!header_seen) {
      if (t.schema.empty()) {
        throw SchemaError(where + ": missing '# schema:' header before the column row");
      }
      if (t.schema != expected_schema) {
        throw SchemaError(where + ": schema mismatch: file declares '" + t.schema +
                          "', expected '" + expected_schema + "'");
      }
      t.columns = split(text);
      for (const auto& name : t.columns) {
        const auto c = std::find_if(spec.columns.begin(), spec.columns.end(),
                                    [&](const ColumnSpec& cs) { return name == cs.name; });
        if (c == spec.columns.end()) {
          throw SchemaError(where + ": unknown column '" + name + "' for schema " + spec.id);
        }
        if (t.data.count(name)) throw SchemaError(where + ": duplicate column '" + name + "'");
        t.data[name] = {};
        column_spec.push_back(&*c);
        double s = 1.0;
        if (const auto u = unit_override.find(name); u != unit_override.end()) {
          const auto f = unit_scale(c->kind, u->second);
          if (!f) {
            throw SchemaError(where + ": unit mismatch: '" + u->second +
                              "' is not a valid unit for column " + name);
          }
          s = *f;
        }
        scale.push_back(s);
      }
      for (const auto& [name, unit] : unit_override) {
        if (!t.data.count(name)) {
          throw SchemaError(where + ": unit given for absent column '" + name + "'");
        }
      }
      for (const auto& c : spec.columns) {
        if (c.required && !t.data.count(c.name)) {
          throw SchemaError(where + ": missing required column '" + std::string(c.name) + "'");
        }
      }
      header_seen = true;
      continue;
    }
    const auto cells = split(text);
    if (cells.size() != t.columns.size()) {
      throw SchemaError(fmt::format("{}: expected {} fields, found {}", where, t.columns.size(),
                                    cells.size()));
    }
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const double v = parse_number(cells[k], where + " column " + t.columns[k]);
      t.data[t.columns[k]].push_back(scale[k] == 1.0 ? v : v * scale[k]);
    }
    t.lines.push_back(line_no);
  }
  if (!header_seen) {
    if (t.schema.empty()) throw SchemaError(source + ": missing '# schema:' header");
    throw SchemaError(source + ": no column row");
  }
  if (t.rows() == 0) throw SchemaError(source + ": no data rows");
  return t;
}

Table read_csv(const std::filesystem::path& path, const std::string& expected_schema) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open input file " + path.string());
  return parse_csv(in, expected_schema, path.string());
}

films::RsTSeries to_rs_series(const Table& t) {
  films::RsTSeries s;
  s.thickness = t.meta_number("thickness_nm") * 1e-9;
  s.label = t.meta.count("label") ? t.meta.at("label") : t.source;
  require_increasing(t, "temperature_K");
  const auto& temp = t.col("temperature_K");
  const auto& rs = t.col("rs_ohm_per_sq");
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (!(rs[r] > 0.0)) row_error(t, r, "rs_ohm_per_sq must be positive");
    s.points.push_back({temp[r], rs[r]});
  }
  return s;
}

iv::IVCurve to_iv_curve(const Table& t) {
  iv::IVCurve c;
  c.current = t.col("current_A");
  c.voltage = t.col("voltage_V");
  if (t.has("dvdi_ohm")) c.dvdi = t.col("dvdi_ohm");
  c.label = t.meta.count("label") ? t.meta.at("label") : t.source;
  if (const auto it = t.meta.find("sweep_dir"); it != t.meta.end()) {
    c.sweep = iv::parse_sweep(it->second);
  }
  const int sign = c.sweep == iv::Sweep::Up ? 1 : c.sweep == iv::Sweep::Down ? -1 : 0;
  for (std::size_t r = 1; sign != 0 && r < c.current.size(); ++r) {
    if (!(sign * (c.current[r] - c.current[r - 1]) > 0.0)) {
      row_error(t, r, fmt::format("current_A not monotone for a '{}' sweep", iv::to_string(c.sweep)));
    }
  }
  return c;
}

sns::IcTSeries to_ic_series(const Table& t) {
  sns::IcTSeries s;
  s.label = t.meta.count("label") ? t.meta.at("label") : t.source;
  if (t.meta.count("r_n_ohm")) s.r_n = t.meta_number("r_n_ohm");
  require_increasing(t, "temperature_K");
  const auto& temp = t.col("temperature_K");
  const auto& ic = t.col("ic_A");
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (!(ic[r] >= 0.0)) row_error(t, r, "ic_A must be non-negative");
    sns::IcTPoint p;
    p.temperature = temp[r];
    p.ic = ic[r];
    if (t.has("sigma_A")) {
      p.sigma = t.col("sigma_A")[r];
      if (!(p.sigma >= 0.0)) row_error(t, r, "sigma_A must be non-negative");
    }
    s.points.push_back(p);
  }
  return s;
}

mw::ComplexTrace to_trace(const Table& t) {
  mw::ComplexTrace tr;
  tr.power_dbm = t.meta_number("power_dBm");
  tr.label = t.meta.count("label") ? t.meta.at("label") : t.source;
  require_increasing(t, "frequency_Hz");
  tr.frequency = t.col("frequency_Hz");
  const auto& re = t.col("re");
  const auto& im = t.col("im");
  for (std::size_t r = 0; r < t.rows(); ++r) tr.s21.emplace_back(re[r], im[r]);
  return tr;
}

flux::Sampled to_profile(const Table& t) {
  require_increasing(t, "x_m");
  flux::Sampled s;
  s.position = t.col("x_m");
  s.weight = t.col("weight");
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (!(s.weight[r] >= 0.0)) row_error(t, r, "weight must be non-negative");
  }
  return s;
}

std::vector<mw::Sideband> to_sidebands(const Table& t) {
  std::vector<mw::Sideband> out;
  const auto& p = t.col("applied_dBm");
  const auto& f = t.col("frequency_Hz");
  const auto& b = t.col("branch");
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (b[r] != -1.0 && b[r] != 1.0) row_error(t, r, "branch must be -1 or +1");
    out.push_back({p[r], f[r], b[r] < 0.0 ? -1 : 1});
  }
  return out;
}

ShapiroTable to_shapiro(const Table& t) {
  ShapiroTable s;
  s.power_dbm = t.col("power_dBm");
  s.current = t.col("current_A");
  s.voltage = t.col("voltage_V");
  if (t.has("drive_A")) s.drive = t.col("drive_A");
  // Within one power block the bias must increase.
  for (std::size_t r = 1; r < t.rows(); ++r) {
    if (s.power_dbm[r] == s.power_dbm[r - 1] && !(s.current[r] > s.current[r - 1])) {
      row_error(t, r, "current_A not strictly increasing within a power block");
    }
  }
  return s;
}

rcsj::ShapiroMap to_shapiro_map(const ShapiroTable& t) {
  rcsj::ShapiroMap map;
  const std::size_t n = t.power_dbm.size();
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start;
    while (end < n && t.power_dbm[end] == t.power_dbm[start]) ++end;
    std::vector<double> grid(t.current.begin() + static_cast<std::ptrdiff_t>(start),
                             t.current.begin() + static_cast<std::ptrdiff_t>(end));
    if (map.i_dc.empty()) {
      map.i_dc = grid;
    } else if (grid != map.i_dc) {
      throw SchemaError(fmt::format("shapiro table: power block at {} dBm has a different current grid",
                                    format_number(t.power_dbm[start])));
    }
    map.drive.push_back(t.drive.empty() ? std::sqrt(mw::dbm_to_watt(t.power_dbm[start]))
                                        : t.drive[start]);
    std::vector<double> row(t.voltage.begin() + static_cast<std::ptrdiff_t>(start),
                            t.voltage.begin() + static_cast<std::ptrdiff_t>(end));
    map.voltage.insert(map.voltage.end(), row.begin(), row.end());
    const auto d = rcsj::differential_resistance(grid, row);
    map.dvdi.insert(map.dvdi.end(), d.begin(), d.end());
    start = end;
  }
  return map;
}

double drive_power_dbm(double amplitude, double resistance) {
  return mw::watt_to_dbm(std::max(0.5 * amplitude * amplitude * resistance, 1e-30));
}

double charging_energy(double c_sigma) {
  if (!(c_sigma > 0.0) || !std::isfinite(c_sigma)) {
    throw DomainError(fmt::format("C_sigma must be positive and finite, got {}", c_sigma));
  }
  return kConstants.e * kConstants.e / (2.0 * c_sigma);
}

double total_capacitance(double e_c) {
  if (!(e_c > 0.0) || !std::isfinite(e_c)) {
    throw DomainError(fmt::format("E_C must be positive and finite, got {}", e_c));
  }
  return kConstants.e * kConstants.e / (2.0 * e_c);
}

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

std::string render_csv(const CsvDocument& doc, const std::string& config_hash) {
  std::string out = "# schema: " + doc.schema + "\n# config_hash: " + config_hash + "\n";
  for (const auto& [k, v] : doc.meta) out += "# " + k + ": " + v + "\n";
  for (std::size_t c = 0; c < doc.columns.size(); ++c) {
    if (c) out += ",";
    out += doc.columns[c];
  }
  out += "\n";
  const std::size_t rows = doc.values.empty() ? 0 : doc.values.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < doc.values.size(); ++c) {
      if (c) out += ",";
      out += format_number(doc.values[c].at(r));
    }
    out += "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError("cannot write output file " + path.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace weaklink::io
