#pragma once

// Transmon spectrum by charge-basis diagonalization for sinusoidal and
// generalized energy-phase potentials, Josephson-energy extraction and a
// scalar stray-inductance participation correction.

#include <optional>
#include <vector>

#include "weaklink/cpr.hpp"

namespace weaklink::transmon {

struct TransmonParams {
  double e_c = 0.0;  // J, convention alpha ~ -E_C
  /// E(phi) = sum_k E_k (1 - cos k phi); E_k in joules.
  std::vector<cpr::Harmonic> potential;
  double n_g = 0.0;
  int n_cut = 0;        // 0 selects the default cutoff
  double l_stray = 0.0; // H

  /// Sum_k E_k, the barrier-scale used for the cutoff rule.
  double potential_scale() const;
  /// Effective E_J = sum_k k^2 E_k (curvature at phi = 0).
  double effective_josephson_energy() const;
  int default_cutoff() const;
  int minimum_cutoff() const;
  void validate() const;
};

TransmonParams sinusoidal_transmon(double e_c, double e_j, double n_g = 0.0);

struct Spectrum {
  double f01 = 0.0;  // Hz
  double f12 = 0.0;
  double f23 = 0.0;
  double anharmonicity = 0.0;  // f12 - f01, Hz
  int n_cut = 0;
  double convergence_shift = 0.0;  // max |shift| of f01, f12, f23 on doubling n_cut, Hz
  std::optional<double> f01_asymptotic;  // (sqrt(8 E_J E_C) - E_C)/h, single harmonic only
  std::optional<double> anharmonicity_with_stray;  // alpha p^2 when l_stray > 0
};

/// Lowest four levels of H = 4 E_C (n - n_g)^2 + sum_k E_k (1 - cos k phi)
/// on n in [-n_cut, n_cut]. Throws ConvergenceError when doubling the cutoff
/// moves a transition by >= 1 kHz.
Spectrum diagonalize(const TransmonParams& params);

/// Levels only, without the cutoff-doubling check.
Spectrum diagonalize_at_cutoff(const TransmonParams& params, int n_cut);

enum class EjMethod { Asymptotic, Numerical };

struct EjEstimate {
  double e_j = 0.0;      // J
  double l_j = 0.0;      // H, (Phi0 / 2 pi)^2 / E_J
  double ratio = 0.0;    // E_J / E_C
  double f01_check = 0.0;  // f01 of the sinusoidal transmon at the estimate
};

/// Inverts h f_q = sqrt(8 E_J E_C) - E_C (Asymptotic) or the numerical
/// f01 (Numerical, bisection to 1 kHz) for E_J. Throws DomainError when no
/// root exists for E_J/E_C in [10, 1e4].
EjEstimate extract_ej(double f_q, double e_c, EjMethod method);

double josephson_inductance(double e_j);

struct StrayParticipation {
  double participation = 1.0;  // L_J / (L_J + L_S)
  double alpha_ratio = 1.0;    // participation^exponent
};

StrayParticipation stray_participation(double l_j, double l_s, double exponent = 2.0);

}  // namespace weaklink::transmon
