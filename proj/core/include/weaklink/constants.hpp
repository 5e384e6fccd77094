#pragma once

// CODATA-2018 values. Since the 2019 SI redefinition h, e and k_B are exact;
// every derived constant is computed from them so that the identities
// Phi0 * 2e == h and R_Q * 4e^2 == h hold to rounding.

#include <numbers>

namespace weaklink {

struct Constants {
  double h = 6.62607015e-34;       // J s
  double e = 1.602176634e-19;      // C
  double k_B = 1.380649e-23;       // J/K
  double hbar = h / (2.0 * std::numbers::pi);
  double phi0 = h / (2.0 * e);     // Wb
  double r_q = h / (4.0 * e * e);  // Ohm, superconducting resistance quantum
  const char* version = "CODATA-2018";
};

inline constexpr Constants kConstants{};

namespace units {

// Interface-layer units expressed in SI.
inline constexpr double meV = 1e-3 * kConstants.e;  // J
inline constexpr double ueV = 1e-6 * kConstants.e;  // J
inline constexpr double mV = 1e-3;
inline constexpr double uV = 1e-6;
inline constexpr double nA = 1e-9;
inline constexpr double uA = 1e-6;
inline constexpr double kHz = 1e3;
inline constexpr double MHz = 1e6;
inline constexpr double GHz = 1e9;
inline constexpr double nm = 1e-9;
inline constexpr double um = 1e-6;
inline constexpr double mT = 1e-3;
inline constexpr double pH = 1e-12;
inline constexpr double nH = 1e-9;
inline constexpr double cm2_per_s = 1e-4;  // m^2/s

/// Energy of a frequency, E = h f.
constexpr double energy_of_frequency(double f) { return kConstants.h * f; }
constexpr double frequency_of_energy(double E) { return E / kConstants.h; }

}  // namespace units
}  // namespace weaklink
