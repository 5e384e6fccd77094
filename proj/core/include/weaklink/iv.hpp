#pragma once

// Feature extraction from I-V curves: critical current (slope-threshold rule
// with a curvature-onset fallback), normal-state resistance from the
// high-bias branch, hysteresis between sweeps, and the blockade features of
// insulating links.

#include <optional>
#include <string>
#include <vector>

namespace weaklink::iv {

enum class Sweep { Unknown, Up, Down };

const char* to_string(Sweep s);
Sweep parse_sweep(const std::string& s);

struct IVCurve {
  std::vector<double> current;  // A
  std::vector<double> voltage;  // V
  std::vector<double> dvdi;     // Ohm, optional (empty when absent)
  Sweep sweep = Sweep::Unknown;
  std::string label;

  void validate() const;
};

struct FeatureRules {
  double slope_fraction = 0.01;      // dV/dI threshold as a fraction of R_N
  double curvature_fraction = 0.1;   // fallback: fraction of the peak |d2V/dI2|
  double top_fraction = 0.2;         // high-bias window for the R_N fit
  double hysteresis_fraction = 0.05; // relative I_c difference between sweeps
  double r_floor = 0.0;              // insulating chord-resistance floor; 0 means 10 R_N
};

enum class IcRule { SlopeThreshold, CurvatureOnset, None };

const char* to_string(IcRule r);

struct InsulatingFeatures {
  double v_c = 0.0;     // V
  double r_low = 0.0;   // Ohm
  double r_floor = 0.0; // Ohm, rule used
  bool exceeds_100_mohm = false;
  std::optional<double> gap_voltage;  // 2 Delta / e when a gap was supplied
  std::optional<bool> above_gap_voltage;
};

struct IVFeatures {
  double ic = 0.0;           // A, positive branch when present
  double ic_negative = 0.0;  // A, magnitude on the negative branch (0 when absent)
  double r_n = 0.0;          // Ohm
  double icrn = 0.0;         // V, exactly ic * r_n
  IcRule rule = IcRule::None;
  bool insulating = false;
  std::optional<InsulatingFeatures> insulator;
  bool hysteretic = false;
  std::optional<double> ic_other_sweep;
  // Extraction metadata.
  double r_n_window_lo = 0.0;  // |I| range of the R_N fit, A
  double r_n_window_hi = 0.0;
  double r_n_r_squared = 0.0;
  FeatureRules rules;
};

/// Throws DomainError when there is no linear high-bias branch or no
/// supercurrent feature. Insulating curves are routed to extract_insulating
/// and reported with `insulating = true`.
IVFeatures extract_features(const IVCurve& curve, const FeatureRules& rules = {});

/// Up/down sweep pair: features of `up`, hysteresis flagged when the two
/// critical currents differ by more than rules.hysteresis_fraction.
IVFeatures extract_features(const IVCurve& up, const IVCurve& down,
                            const FeatureRules& rules = {});

/// V_c is the smallest |V| at which the chord resistance |V/I| drops below
/// r_floor; R_low is the slope resistance over |V| < V_c / 2. Throws
/// ModelValidityError when there is no blockade region.
InsulatingFeatures extract_insulating(const IVCurve& curve, double r_floor,
                                      std::optional<double> gap = std::nullopt);

}  // namespace weaklink::iv
