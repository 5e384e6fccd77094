#pragma once

// Current-phase relations of a weak link, their critical currents, Fourier
// content and the energy-phase coefficients handed to the transmon solver.

#include <utility>
#include <variant>
#include <vector>

namespace weaklink::cpr {

struct Sinusoidal {
  double critical_current = 0.0;  // A
};

/// Single resonant level averaged over configurations:
///   I R_N = (E_Th/e) {ln(4 Delta/E_Th) + [asin(sin(phi/2))]^2 / pi} sin(phi)
/// Requires E_Th < Delta.
struct ResonantLevel {
  double thouless_energy = 0.0;  // J
  double delta = 0.0;            // J
  double r_n = 0.0;              // Ohm
};

struct Harmonic {
  int k = 1;
  double amplitude = 0.0;  // A for currents, J for energies
};

/// I(phi) = sum_k I_k sin(k phi).
struct HarmonicSeries {
  std::vector<Harmonic> terms;
};

/// Zero-temperature single channel of transmission tau:
///   I = (e Delta / 2 hbar) tau sin(phi) / sqrt(1 - tau sin^2(phi/2)).
/// prefactor_r_n only scales reported I_c R_N products.
struct SingleChannel {
  double transmission = 1.0;
  double delta = 0.0;           // J
  double prefactor_r_n = 1.0;   // Ohm
};

using CprModel = std::variant<Sinusoidal, ResonantLevel, HarmonicSeries, SingleChannel>;

const char* model_name(const CprModel& model) noexcept;

/// Throws ModelValidityError (E_Th >= Delta) or DomainError on bad fields.
void validate(const CprModel& model);

/// Reduces phi into [-pi, pi]; the CPR is extended by odd 2 pi periodicity.
double reduce_phase(double phi) noexcept;

/// Supercurrent I(phi) in amperes.
double cpr_current(const CprModel& model, double phi);

struct CriticalCurrent {
  double current = 0.0;  // A
  double phase = 0.0;    // rad, in [0, pi]
};

/// Maximum of I(phi) on [0, pi]: 2048-node grid plus golden-section refinement.
CriticalCurrent critical_current(const CprModel& model);

/// I_c R_N reported for the model: R_N for ResonantLevel, prefactor_r_n for
/// SingleChannel. Sinusoidal and HarmonicSeries have no intrinsic R_N and
/// throw DomainError.
double icrn_product(const CprModel& model);

/// Dimensionless forward map x = E_Th/Delta -> (e I_c R_N / Delta) (2 / pi),
/// i.e. I_c R_N as a fraction of the zero-temperature Ambegaokar-Baratoff value.
double resonant_level_ab_fraction(double eth_over_delta);

/// Inverts resonant_level_ab_fraction by bisection on E_Th/Delta in
/// (1e-6, 0.99). Returns E_Th in joules. Throws DomainError if no root.
double eth_from_icrn(double ab_fraction, double delta);

struct HarmonicDecomposition {
  std::vector<Harmonic> terms;  // k = 1..K, amplitudes in A
  double residual = 0.0;        // max |I - sum| on a 512-node check grid, A
};

/// I_k = (1/pi) int_{-pi}^{pi} I(phi) sin(k phi) dphi by adaptive quadrature
/// with absolute tolerance 1e-12 max|I|.
HarmonicDecomposition harmonics(const CprModel& model, int max_harmonic);

/// E(phi) = sum_k E_k (1 - cos k phi) with E_k = (hbar/2e) I_k / k.
std::vector<Harmonic> energy_phase(const CprModel& model, int max_harmonic);

}  // namespace weaklink::cpr
