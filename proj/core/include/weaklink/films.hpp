#pragma once

// Superconductor-insulator classification of R_s(T) film data and the
// critical thickness of a thickness family.

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace weaklink::films {

struct RsPoint {
  double temperature = 0.0;  // K
  double rs = 0.0;           // Ohm per square
};

struct RsTSeries {
  double thickness = 0.0;  // m
  std::vector<RsPoint> points;
  std::string label;

  /// Throws DomainError unless T is strictly increasing and R_s > 0.
  void validate() const;
};

enum class Phase { Superconducting, Insulating, Flat };

const char* to_string(Phase phase) noexcept;

struct PhaseClass {
  Phase phase = Phase::Flat;
  double slope = 0.0;  // dR_s/dT over the window, Ohm/sq/K
  double t_lo = 0.0;
  double t_hi = 0.0;
  double window_edge_rs = 0.0;  // R_s at the hottest point inside the window
  std::size_t window_points = 0;
};

struct ClassifyOptions {
  double window_fraction = 0.25;  // lowest fraction of the T range
  double tolerance = 1.0;         // Ohm/sq/K
  std::size_t min_points = 5;
};

/// Least-squares slope of R_s(T) inside the low-temperature window,
/// thresholded into the three phases. Throws InsufficientDataError when the
/// window holds fewer than min_points samples.
PhaseClass classify_phase(const RsTSeries& series, const ClassifyOptions& options = {});

struct CriticalThickness {
  double d_c = 0.0;                 // m
  double rs_at_dc = 0.0;            // Ohm/sq
  double insulating_thickness = 0.0;
  double superconducting_thickness = 0.0;
  std::vector<PhaseClass> classes;  // input order
};

/// Bracketing midpoint between the thickest insulating and the thinnest
/// superconducting member. R_s at d_c interpolates log(window-edge R_s)
/// linearly in thickness. Throws DomainError("no transition") when the family
/// lacks either phase.
CriticalThickness critical_thickness(std::span<const RsTSeries> family,
                                     const ClassifyOptions& options = {});

struct MbConsistency {
  double rms_relative_deviation = 0.0;
  std::vector<double> per_point;
};

/// Relative deviation of measured L_K from hbar R_N / (pi Delta), per pair
/// (R_N [Ohm], L_K [H]).
MbConsistency mb_consistency(std::span<const std::pair<double, double>> pairs, double delta0);

}  // namespace weaklink::films
