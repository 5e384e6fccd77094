#pragma once

// CSV ingestion and emission. Every file starts with `# schema: <id>` and may
// carry further `# key: value` header lines; `# unit.<column>: <unit>`
// overrides the unit implied by a column name. Values are converted to SI on
// ingest and written back with 17 significant digits.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weaklink/films.hpp"
#include "weaklink/flux.hpp"
#include "weaklink/iv.hpp"
#include "weaklink/mwfit.hpp"
#include "weaklink/rcsj.hpp"
#include "weaklink/sns.hpp"

namespace weaklink::io {

struct Table {
  std::string schema;
  std::string source;
  std::map<std::string, std::string> meta;  // header lines other than schema/unit
  std::vector<std::string> columns;         // file order
  std::map<std::string, std::vector<double>> data;  // SI values per column
  std::vector<std::size_t> lines;           // 1-based file line of each row

  bool has(const std::string& column) const { return data.count(column) != 0; }
  const std::vector<double>& col(const std::string& column) const;
  std::size_t rows() const { return lines.size(); }
  /// Header value; throws SchemaError naming the key when absent.
  const std::string& require_meta(const std::string& key) const;
  double meta_number(const std::string& key) const;
};

/// Known schema ids. Inputs: rs_t, iv, ic_t, s21, shapiro, profile,
/// sidebands. Result tables: rs_classes, steps, transmon_levels, rabi,
/// at_branches, pattern, iv_features, eth.
const std::vector<std::string>& schema_ids();

/// Throws SchemaError for an unknown or mismatched schema, unknown or missing
/// columns, unit mismatches, unparseable or non-finite values; messages carry
/// the source name and line number.
Table parse_csv(std::istream& in, const std::string& expected_schema,
                const std::string& source = "<stream>");
Table read_csv(const std::filesystem::path& path, const std::string& expected_schema);

// Typed views. Monotonicity violations raise SchemaError naming the first
// offending line.
films::RsTSeries to_rs_series(const Table& t);
iv::IVCurve to_iv_curve(const Table& t);
sns::IcTSeries to_ic_series(const Table& t);
mw::ComplexTrace to_trace(const Table& t);
flux::Sampled to_profile(const Table& t);
/// Rows of a sidebands table; branch must be -1 or +1.
std::vector<mw::Sideband> to_sidebands(const Table& t);

struct ShapiroTable {
  std::vector<double> power_dbm;
  std::vector<double> current;
  std::vector<double> voltage;
  std::vector<double> drive;  // A; empty when the file has no drive_A column
};

ShapiroTable to_shapiro(const Table& t);

/// Regroups a shapiro table into a map; rows must be grouped by power with an
/// identical strictly increasing current grid per group. Drive values come
/// from drive_A when present, otherwise from sqrt(P) in sqrt(W).
rcsj::ShapiroMap to_shapiro_map(const ShapiroTable& t);

/// Nominal drive power of a current amplitude into R: P = I^2 R / 2, floored
/// at 1e-30 W so that a zero drive row stays finite in dBm.
double drive_power_dbm(double amplitude, double resistance);

/// E_C = e^2 / 2 C_sigma, in joules; the only place capacitance enters.
double charging_energy(double c_sigma);
double total_capacitance(double e_c);

// ---- emission

std::string format_number(double value);

struct CsvDocument {
  std::string schema;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // one vector per column
};

/// Renders the document; the config hash is always the second header line.
std::string render_csv(const CsvDocument& doc, const std::string& config_hash);

/// Writes `content` atomically enough for a single-owner output directory.
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// 64-bit FNV-1a over the bytes, as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace weaklink::io
