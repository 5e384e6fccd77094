#pragma once

// Microwave spectroscopy: the two-level saturation ("squash") lineshape and
// its joint fit, Autler-Townes sideband calibration, notch-resonator circle
// fit and a small-Kerr estimator.

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weaklink/numeric.hpp"

namespace weaklink::mw {

using Complex = std::complex<double>;

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);
/// sqrt(P) in sqrt(W); only ratios matter for the Rabi linearity check.
double drive_amplitude(double dbm);

struct ComplexTrace {
  std::vector<double> frequency;  // Hz, strictly increasing
  std::vector<Complex> s21;
  double power_dbm = 0.0;
  std::string label;

  void validate() const;
};

/// Subtracts a caller-designated reference (typically a high-power trace).
/// Grids must match exactly (SchemaError otherwise).
ComplexTrace subtract_background(const ComplexTrace& trace, const ComplexTrace& reference);

struct SquashParams {
  double f_q = 0.0;      // Hz
  double kappa_t = 0.0;  // Hz
  double kappa_c = 0.0;  // Hz
  double rabi = 0.0;     // Omega_R, Hz

  void validate() const;
};

/// delta S21 = (k_c/k_t)(1 + 2i D/k_t) / (1 + (2D/k_t)^2 + 2 (W_R/k_t)^2), D = f - f_q.
Complex squash_response(const SquashParams& params, double frequency);

ComplexTrace squash_model(const SquashParams& params, std::span<const double> frequencies,
                          double power_dbm = 0.0);

struct SquashFit {
  double f_q = 0.0;
  double kappa_t = 0.0;
  double kappa_c = 0.0;
  std::vector<double> rabi;       // per trace, Hz
  std::vector<double> amplitude;  // per trace, sqrt(W)
  numeric::LinearFit rabi_vs_amplitude;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Joint least squares on (Re, Im) of background-subtracted traces with
/// shared (f_q, k_t, k_c) and per-trace Omega_R. Throws
/// InsufficientDataError (< 2 traces or repeated powers), SchemaError
/// (mismatched grids), ConvergenceError.
SquashFit fit_squash(std::span<const ComplexTrace> traces,
                     std::optional<SquashParams> guess = std::nullopt);

struct AutlerTownesBranches {
  double lower = 0.0;  // Hz
  double upper = 0.0;  // Hz
  double device_power_dbm = 0.0;
};

/// Device-referred power: applied power plus (negative) attenuation in dB.
double device_power_dbm(double applied_dbm, double attenuation_db);

/// f = f_q +/- sqrt(4 kappa P_d / h f01) with P_d in watts, kappa in s^-1.
AutlerTownesBranches autler_townes(double f_q, double f01, double kappa, double applied_dbm,
                                   double attenuation_db);

struct Sideband {
  double applied_dbm = 0.0;
  double frequency = 0.0;  // Hz
  int branch = -1;         // -1 lower, +1 upper
};

struct AttenuationFit {
  double attenuation_db = 0.0;
  double sigma_db = 0.0;
  double rms_residual = 0.0;  // Hz
  int iterations = 0;
};

/// Least-squares attenuation so the model branches match measured sidebands.
/// Throws InsufficientDataError with fewer than 3 sidebands.
AttenuationFit fit_attenuation(double f_q, double f01, double kappa,
                               std::span<const Sideband> sidebands,
                               double initial_attenuation_db = -120.0);

struct NotchResonance {
  double f_r = 0.0;
  double q_loaded = 0.0;
  double q_coupling_abs = 0.0;
  double phi0 = 0.0;  // rad
  double q_internal = 0.0;
  double amplitude = 1.0;  // background a
  double phase = 0.0;      // background alpha
  double delay = 0.0;      // s
  double circle_rms = 0.0; // rms geometric residual of the normalized circle
};

/// a e^{i alpha} e^{-2 pi i f tau} [1 - (Q_l/|Q_c|) e^{i phi0} / (1 + 2i Q_l (f/f_r - 1))]
Complex notch_model(const NotchResonance& r, double frequency);

/// Cable-delay removal, algebraic + geometric circle fit, phase-vs-f
/// arctangent fit for f_r and Q_l, then Q_i from
/// 1/Q_i = 1/Q_l - cos(phi0)/|Q_c|. Throws DomainError for a vanishing circle
/// (no resonance) or Q_i <= 0 (impedance mismatch, message reports phi0).
NotchResonance circle_fit(const ComplexTrace& trace);

struct KerrEstimate {
  double alpha = 0.0;      // Hz per photon
  double intercept = 0.0;  // Hz
  double r_squared = 0.0;
};

/// OLS of f_r against the photon number nbar(P). The calibration must be
/// strictly increasing in P (DomainError otherwise).
KerrEstimate kerr_shift(std::span<const std::pair<double, double>> power_and_frequency,
                        const std::function<double(double)>& nbar_of_power);

}  // namespace weaklink::mw
