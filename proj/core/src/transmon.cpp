#include "weaklink/transmon.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weaklink/constants.hpp"
#include "weaklink/error.hpp"
#include "weaklink/numeric.hpp"

namespace weaklink::transmon {
namespace {

constexpr double kCutoffShiftLimit = 1e3;  // Hz
constexpr double kMinRatio = 10.0;
constexpr double kMaxRatio = 1e4;

}  // namespace

double TransmonParams::potential_scale() const {
  double sum = 0.0;
  for (const auto& t : potential) sum += t.amplitude;
  return sum;
}

double TransmonParams::effective_josephson_energy() const {
  double sum = 0.0;
  for (const auto& t : potential) sum += static_cast<double>(t.k) * t.k * t.amplitude;
  return sum;
}

int TransmonParams::minimum_cutoff() const {
  const double ratio = std::max(potential_scale(), 0.0) / e_c;
  return 4 * static_cast<int>(std::ceil(std::pow(ratio, 0.25)));
}

int TransmonParams::default_cutoff() const {
  const double ratio = std::max(effective_josephson_energy(), 0.0) / e_c;
  const int rule = static_cast<int>(std::ceil(8.0 * std::pow(ratio, 0.25)));
  return std::max({20, rule, minimum_cutoff()});
}

void TransmonParams::validate() const {
  if (!(e_c > 0.0)) throw DomainError("transmon: E_C must be positive");
  if (potential.empty()) throw DomainError("transmon: potential has no terms");
  for (const auto& t : potential) {
    if (t.k < 1) throw DomainError("transmon: harmonic index must be >= 1");
  }
  if (n_cut != 0 && n_cut < minimum_cutoff()) {
    throw DomainError(fmt::format("transmon: n_cut = {} below the minimum {} for this potential",
                                  n_cut, minimum_cutoff()));
  }
}

TransmonParams sinusoidal_transmon(double e_c, double e_j, double n_g) {
  TransmonParams p;
  p.e_c = e_c;
  p.potential = {{1, e_j}};
  p.n_g = n_g;
  return p;
}

Spectrum diagonalize_at_cutoff(const TransmonParams& params, int n_cut) {
  const int dim = 2 * n_cut + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  const double offset = params.potential_scale();
  for (int i = 0; i < dim; ++i) {
    const double n = static_cast<double>(i - n_cut) - params.n_g;
    h(i, i) = 4.0 * params.e_c * n * n + offset;
  }
  for (const auto& t : params.potential) {
    for (int i = 0; i + t.k < dim; ++i) {
      h(i, i + t.k) -= 0.5 * t.amplitude;
      h(i + t.k, i) -= 0.5 * t.amplitude;
    }
  }
  // Scale to O(1) before solving; E_C is ~1e-25 J.
  const double scale = params.e_c;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h / scale, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("transmon: eigenvalue solver failed");
  }
  const Eigen::VectorXd levels = solver.eigenvalues() * (scale / kConstants.h);  // Hz, ascending
  Spectrum s;
  s.n_cut = n_cut;
  s.f01 = levels[1] - levels[0];
  s.f12 = levels[2] - levels[1];
  s.f23 = levels[3] - levels[2];
  s.anharmonicity = s.f12 - s.f01;
  if (params.potential.size() == 1 && params.potential.front().k == 1) {
    const double e_j = params.potential.front().amplitude;
    s.f01_asymptotic = (std::sqrt(8.0 * e_j * params.e_c) - params.e_c) / kConstants.h;
  }
  if (params.l_stray > 0.0) {
    const double l_j = josephson_inductance(params.effective_josephson_energy());
    s.anharmonicity_with_stray =
        s.anharmonicity * stray_participation(l_j, params.l_stray).alpha_ratio;
  }
  return s;
}

Spectrum diagonalize(const TransmonParams& params) {
  params.validate();
  const int n_cut = params.n_cut != 0 ? params.n_cut : params.default_cutoff();
  Spectrum s = diagonalize_at_cutoff(params, n_cut);
  const Spectrum doubled = diagonalize_at_cutoff(params, 2 * n_cut);
  s.convergence_shift = std::max({std::abs(doubled.f01 - s.f01), std::abs(doubled.f12 - s.f12),
                                  std::abs(doubled.f23 - s.f23)});
  if (!(s.convergence_shift < kCutoffShiftLimit)) {
    throw ConvergenceError(fmt::format(
        "transmon: cutoff n_cut = {} not converged (shift {} Hz on doubling)", n_cut,
        s.convergence_shift));
  }
  return s;
}

double josephson_inductance(double e_j) {
  if (!(e_j > 0.0)) throw DomainError("josephson_inductance: E_J must be positive");
  const double reduced_flux = kConstants.phi0 / (2.0 * std::numbers::pi);
  return reduced_flux * reduced_flux / e_j;
}

EjEstimate extract_ej(double f_q, double e_c, EjMethod method) {
  if (!(f_q > 0.0)) throw DomainError("extract_ej: f_q must be positive");
  if (!(e_c > 0.0)) throw DomainError("extract_ej: E_C must be positive");
  const double hf = kConstants.h * f_q;

  double e_j = 0.0;
  if (method == EjMethod::Asymptotic) {
    const double root = hf + e_c;
    e_j = root * root / (8.0 * e_c);
  } else {
    auto f01 = [&](double ratio) {
      const auto p = sinusoidal_transmon(e_c, ratio * e_c);
      return diagonalize_at_cutoff(p, p.default_cutoff()).f01;
    };
    if (f01(kMinRatio) > f_q || f01(kMaxRatio) < f_q) {
      throw DomainError(fmt::format(
          "extract_ej: f_q = {} Hz has no root for E_J/E_C in [{}, {}]", f_q, kMinRatio,
          kMaxRatio));
    }
    // f01 grows monotonically with E_J/E_C; bisect until it matches f_q to 1 kHz.
    double lo = kMinRatio;
    double hi = kMaxRatio;
    double ratio = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      ratio = 0.5 * (lo + hi);
      const double f = f01(ratio);
      if (std::abs(f - f_q) < kCutoffShiftLimit) break;
      (f < f_q ? lo : hi) = ratio;
    }
    e_j = ratio * e_c;
  }
  if (e_j / e_c < kMinRatio || e_j / e_c > kMaxRatio) {
    throw DomainError(fmt::format("extract_ej: E_J/E_C = {} outside [{}, {}]", e_j / e_c,
                                  kMinRatio, kMaxRatio));
  }
  EjEstimate out;
  out.e_j = e_j;
  out.l_j = josephson_inductance(e_j);
  out.ratio = e_j / e_c;
  const auto p = sinusoidal_transmon(e_c, e_j);
  out.f01_check = diagonalize_at_cutoff(p, p.default_cutoff()).f01;
  return out;
}

StrayParticipation stray_participation(double l_j, double l_s, double exponent) {
  if (!(l_j > 0.0)) throw DomainError("stray_participation: L_J must be positive");
  if (!(l_s >= 0.0)) throw DomainError("stray_participation: L_S must be non-negative");
  StrayParticipation s;
  s.participation = l_j / (l_j + l_s);
  s.alpha_ratio = std::pow(s.participation, exponent);
  return s;
}

}  // namespace weaklink::transmon
