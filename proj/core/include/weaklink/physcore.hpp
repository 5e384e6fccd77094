#pragma once

// Gap profiles and the closed-form superconductivity relations consumed by
// the rest of the library. All quantities are SI (J, K, Ohm, H, V, m).

#include <utility>

#include "weaklink/constants.hpp"

namespace weaklink::phys {

enum class Coupling {
  StrongPhenomenological,  // Delta0 * sqrt(1 - T^2/Tc^2)
  WeakNearTc,              // 3.06 k_B sqrt(Tc (Tc - T)), only near Tc
};

const char* to_string(Coupling coupling) noexcept;

struct TemperatureWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// Temperature-dependent superconducting gap.
class GapModel {
 public:
  /// Delta0 defaults to 1.96 k_B Tc.
  static GapModel strong_phenomenological(double tc);
  static GapModel strong_phenomenological(double tc, double delta0);
  /// Valid for T in [lower_fraction * Tc, Tc].
  static GapModel weak_near_tc(double tc, double lower_fraction = 0.9);

  double tc() const noexcept { return tc_; }
  Coupling coupling() const noexcept { return coupling_; }
  /// Zero-temperature gap. For WeakNearTc this is the BCS weak-coupling
  /// value 1.764 k_B Tc, reported only; delta() never uses it.
  double delta0() const noexcept { return delta0_; }
  TemperatureWindow validity() const noexcept { return validity_; }

  /// Delta(T). Throws DomainError outside validity().
  double delta(double temperature) const;

 private:
  GapModel(double tc, Coupling coupling, double delta0, TemperatureWindow validity);

  double tc_;
  Coupling coupling_;
  double delta0_;
  TemperatureWindow validity_;
};

inline double delta_of_T(const GapModel& model, double temperature) {
  return model.delta(temperature);
}

enum class MbDirection { RnToLk, LkToRn };

/// Kinetic sheet inductance L_K = hbar R_N / (pi Delta) and its inverse.
double mattis_bardeen(double value, MbDirection direction, double delta0);

struct AbProduct {
  double icrn = 0.0;  // V
  bool above_tc = false;
};

/// Ambegaokar-Baratoff product (pi Delta(T) / 2e) tanh(Delta(T) / 2 k_B T).
/// Temperatures above Tc return zero with above_tc set.
AbProduct ab_icrn(const GapModel& model, double temperature);

struct DiffusionScales {
  double diffusion = 0.0;        // D, m^2/s
  double fermi_velocity = 0.0;   // v_F, m/s
  double length = 0.0;           // link length l, m
  double temperature = 0.0;      // K
  double thermal_length = 0.0;   // l_T = sqrt(hbar D / 2 pi k_B T)
  double thouless_energy = 0.0;  // E_Th = hbar D / l^2, J
  double mean_free_path = 0.0;   // l_e = 3 D / v_F
};

DiffusionScales diffusion_scales(double diffusion, double fermi_velocity, double length,
                                 double temperature);

double thouless_energy(double diffusion, double length);
double thermal_length(double diffusion, double temperature);

}  // namespace weaklink::phys
