#pragma once

// Diffusive (S-N-S) weak link: Matsubara-sum critical current, I_c(T)
// curves, one-parameter fits of the diffusion coefficient, and the
// near-Tc Ambegaokar-Baratoff slope used as the tunnel-junction benchmark.

#include <span>
#include <string>
#include <vector>

#include "weaklink/physcore.hpp"

namespace weaklink::sns {

struct DiffusiveJunction {
  double length = 0.0;     // m
  double diffusion = 0.0;  // m^2/s
  double r_n = 0.0;        // Ohm
  phys::GapModel gap = phys::GapModel::strong_phenomenological(12.0);

  void validate() const;
  double thouless_energy() const;  // hbar D / l^2
};

struct MatsubaraOptions {
  double relative_threshold = 1e-12;  // stop once a term is below this share
  std::size_t max_terms = 1'000'000;
};

struct DubosResult {
  double icrn = 0.0;        // V
  std::size_t terms = 0;
  bool valid = true;        // k_B T > E_Th
};

/// I_c R_N = (64 pi k_B T / e) sum_n (l/l_wn) Delta^2 exp(-l/l_wn)
///           / (w_n + W_n + sqrt(2 (W_n^2 + w_n W_n)))^2
/// with w_n = (2n+1) pi k_B T, W_n = sqrt(Delta^2 + w_n^2),
/// l_wn = sqrt(hbar D / 2 w_n). Throws ConvergenceError at the term cap.
DubosResult dubos_icrn(const DiffusiveJunction& junction, double temperature,
                       const MatsubaraOptions& options = {});

/// Long-junction zero-temperature product e I_c(0) R_N = 10.82 E_Th.
double zero_temperature_icrn(const DiffusiveJunction& junction);

struct IcTPoint {
  double temperature = 0.0;  // K
  double ic = 0.0;           // A
  double sigma = 0.0;        // A, 0 when not measured
  bool zero_t_extension = false;  // true for the 10.82 E_Th point
  bool valid = true;              // k_B T > E_Th for Matsubara points
};

struct IcTSeries {
  std::vector<IcTPoint> points;
  std::string label;
  double r_n = 0.0;  // Ohm

  /// Throws DomainError unless T strictly increases and I_c >= 0.
  void validate() const;
};

/// Evaluates dubos_icrn / R_N on a grid inside (0, Tc). With include_zero_t
/// the T = 0 extension point is prepended and flagged.
IcTSeries ic_curve(const DiffusiveJunction& junction, std::span<const double> temperatures,
                   bool include_zero_t = false);

struct DiffusionFit {
  double diffusion = 0.0;        // m^2/s
  double diffusion_sigma = 0.0;  // 1-sigma from the log-D variance
  double log_d_variance = 0.0;
  double cost = 0.0;             // 0.5 sum (residual/sigma)^2
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_trace;
  double thouless_energy = 0.0;  // at the fitted D
  bool validity_ok = false;      // k_B T_min > E_Th(D_fit)
  std::size_t points_used = 0;
};

/// Damped least squares over log D. sigma_i = max(measured sigma_i,
/// 1% max I_c). Zero-temperature points flagged as extensions are modelled
/// by zero_temperature_icrn. Throws InsufficientDataError (< 4 points),
/// ModelValidityError (no point inside (0, Tc)), ConvergenceError.
DiffusionFit fit_diffusion(const IcTSeries& data, const DiffusiveJunction& junction_template);

struct AbSlope {
  double voltage_per_kelvin = 0.0;  // d(I_c R_N)/dT, V/K
  double current_per_kelvin = 0.0;  // dI_c/dT, A/K
};

/// Analytic near-Tc slope -pi 3.06^2 k_B / 4e of the Ambegaokar-Baratoff
/// product. Requires a WeakNearTc gap (DomainError otherwise).
AbSlope ab_slope_near_tc(const phys::GapModel& gap, double r_n);

}  // namespace weaklink::sns
