#pragma once

// RF-driven resistively (and capacitively) shunted junction with an
// arbitrary current-phase relation: mean-voltage points, Shapiro maps and
// integer / fractional step detection.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "weaklink/cpr.hpp"

namespace weaklink::rcsj {

struct RcsjConfig {
  cpr::CprModel cpr = cpr::Sinusoidal{1e-6};
  double resistance = 1.0;   // Ohm
  double beta_c = 0.0;       // Stewart-McCumber parameter, 0 = overdamped
  double f_rf = 1e9;         // Hz
  int transient_periods = 200;
  int average_periods = 800;
  double rel_tol = 1e-8;

  /// Throws DomainError unless R > 0, beta_c >= 0, periods >= 1,
  /// 0 < rel_tol <= 1e-6 and the CPR is valid.
  void validate() const;
};

/// Scales of the dimensionless problem tau = t 2 e R I_c* / hbar.
struct Normalization {
  double critical_current = 0.0;  // I_c* = max of the CPR, A
  double voltage = 0.0;           // I_c* R, V
  double drive_frequency = 0.0;   // Omega = 2 pi f_RF hbar / (2 e R I_c*)
};

Normalization normalization(const RcsjConfig& config);

/// Shapiro voltage q h f / 2e.
double shapiro_voltage(double f_rf, double q = 1.0);

struct PointDiagnostics {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t josephson_periods = 0;  // whole periods used when i_rf == 0
};

/// Time-averaged DC voltage at bias (i_dc, i_rf) in amperes. Drives are
/// averaged over `average_periods` whole drive periods after
/// `transient_periods`; without RF the average runs over whole Josephson
/// periods inside the same window. Throws ConvergenceError on step underflow.
double simulate_point(const RcsjConfig& config, double i_dc, double i_rf,
                      PointDiagnostics* diagnostics = nullptr);

struct ShapiroMap {
  std::vector<double> i_dc;     // A, monotone
  std::vector<double> drive;    // A, monotone
  std::vector<double> voltage;  // V, row-major [drive][i_dc]
  std::vector<double> dvdi;     // Ohm, centered differences along i_dc

  std::size_t index(std::size_t drive_index, std::size_t current_index) const {
    return drive_index * i_dc.size() + current_index;
  }
  double v(std::size_t drive_index, std::size_t current_index) const {
    return voltage[index(drive_index, current_index)];
  }
};

/// Centered (one-sided at the ends) dV/dI of a single I-V trace.
std::vector<double> differential_resistance(std::span<const double> current,
                                            std::span<const double> voltage);

/// Simulates every grid point. Points are independent; `threads` > 1 splits
/// rows across workers and writes into pre-sized storage, so the map is
/// identical for any thread count.
ShapiroMap shapiro_map(const RcsjConfig& config, std::span<const double> i_dc_grid,
                       std::span<const double> drive_grid, unsigned threads = 1);

struct Rational {
  long num = 1;
  long den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  /// Parses "p/q" or an integer. Throws DomainError.
  static Rational parse(const std::string& text);
};

struct StepPolicy {
  double tolerance_fraction = 0.002;  // of h f_RF / 2e
  std::size_t min_points = 3;
};

struct Step {
  Rational q;
  double voltage = 0.0;  // mean V over the plateau
  double span = 0.0;     // current width of the plateau, A
  std::size_t points = 0;
  double i_lo = 0.0;
  double i_hi = 0.0;
  double drive = 0.0;    // drive amplitude of the row holding the widest plateau
  bool exists = false;
};

struct StepReport {
  std::vector<Step> steps;  // one per requested fraction, in request order
  StepPolicy policy;
  double unit_voltage = 0.0;  // h f_RF / 2e
};

/// Widest contiguous run of an I-V trace with |V - q h f/2e| below the
/// tolerance, per fraction q.
StepReport detect_steps(std::span<const double> current, std::span<const double> voltage,
                        double f_rf, std::span<const Rational> fractions,
                        const StepPolicy& policy = {});

/// Same, maximized over every drive row of a map.
StepReport detect_steps(const ShapiroMap& map, double f_rf, std::span<const Rational> fractions,
                        const StepPolicy& policy = {});

}  // namespace weaklink::rcsj
