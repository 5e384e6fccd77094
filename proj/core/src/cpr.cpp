#include "weaklink/cpr.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weaklink/constants.hpp"
#include "weaklink/error.hpp"
#include "weaklink/numeric.hpp"

namespace weaklink::cpr {
namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double resonant_level_current(const ResonantLevel& m, double phi) {
  const double branch = std::asin(std::sin(0.5 * phi));
  const double bracket =
      std::log(4.0 * m.delta / m.thouless_energy) + branch * branch / kPi;
  return m.thouless_energy / (kConstants.e * m.r_n) * bracket * std::sin(phi);
}

double single_channel_current(const SingleChannel& m, double phi) {
  const double s = std::sin(0.5 * phi);
  const double denom = std::sqrt(std::max(0.0, 1.0 - m.transmission * s * s));
  if (denom == 0.0) return 0.0;  // tau = 1 at phi = pi: odd-symmetric value
  const double scale = kConstants.e * m.delta / (2.0 * kConstants.hbar);
  return scale * m.transmission * std::sin(phi) / denom;
}

}  // namespace

const char* model_name(const CprModel& model) noexcept {
  return std::visit(Overloaded{
                        [](const Sinusoidal&) { return "sinusoidal"; },
                        [](const ResonantLevel&) { return "resonant_level"; },
                        [](const HarmonicSeries&) { return "harmonic_series"; },
                        [](const SingleChannel&) { return "single_channel"; },
                    },
                    model);
}

void validate(const CprModel& model) {
  std::visit(Overloaded{
                 [](const Sinusoidal& m) {
                   if (!(m.critical_current > 0.0)) {
                     throw DomainError("sinusoidal CPR: I_c must be positive");
                   }
                 },
                 [](const ResonantLevel& m) {
                   if (!(m.thouless_energy > 0.0) || !(m.delta > 0.0) || !(m.r_n > 0.0)) {
                     throw DomainError("resonant-level CPR: E_Th, Delta and R_N must be positive");
                   }
                   if (!(m.thouless_energy < m.delta)) {
                     throw ModelValidityError(fmt::format(
                         "resonant-level CPR requires E_Th < Delta (E_Th/Delta = {})",
                         m.thouless_energy / m.delta));
                   }
                 },
                 [](const HarmonicSeries& m) {
                   if (m.terms.empty()) throw DomainError("harmonic-series CPR has no terms");
                   for (const auto& t : m.terms) {
                     if (t.k < 1) throw DomainError("harmonic-series CPR: k must be >= 1");
                   }
                 },
                 [](const SingleChannel& m) {
                   if (!(m.transmission > 0.0 && m.transmission <= 1.0)) {
                     throw DomainError(fmt::format(
                         "single-channel CPR: transmission {} not in (0, 1]", m.transmission));
                   }
                   if (!(m.delta > 0.0) || !(m.prefactor_r_n > 0.0)) {
                     throw DomainError("single-channel CPR: Delta and R_N must be positive");
                   }
                 },
             },
             model);
}

double reduce_phase(double phi) noexcept {
  if (phi >= -kPi && phi <= kPi) return phi;
  double r = std::remainder(phi, 2.0 * kPi);
  return r;
}

double cpr_current(const CprModel& model, double phi) {
  phi = reduce_phase(phi);
  return std::visit(Overloaded{
                        [&](const Sinusoidal& m) { return m.critical_current * std::sin(phi); },
                        [&](const ResonantLevel& m) {
                          if (!(m.thouless_energy < m.delta)) validate(model);
                          return resonant_level_current(m, phi);
                        },
                        [&](const HarmonicSeries& m) {
                          double sum = 0.0;
                          for (const auto& t : m.terms) sum += t.amplitude * std::sin(t.k * phi);
                          return sum;
                        },
                        [&](const SingleChannel& m) { return single_channel_current(m, phi); },
                    },
                    model);
}

CriticalCurrent critical_current(const CprModel& model) {
  validate(model);
  if (const auto* s = std::get_if<Sinusoidal>(&model)) {
    return {s->critical_current, 0.5 * kPi};
  }
  auto f = [&](double phi) { return cpr_current(model, phi); };
  const auto best = numeric::grid_golden_max(f, 0.0, kPi, 2048, 1e-12);
  return {best.value, best.x};
}

double icrn_product(const CprModel& model) {
  const double ic = critical_current(model).current;
  if (const auto* m = std::get_if<ResonantLevel>(&model)) return ic * m->r_n;
  if (const auto* m = std::get_if<SingleChannel>(&model)) return ic * m->prefactor_r_n;
  throw DomainError(fmt::format("{} CPR carries no normal-state resistance", model_name(model)));
}

double resonant_level_ab_fraction(double eth_over_delta) {
  // Delta = 1 J and R_N = 1/e Ohm make e I R_N / Delta equal to the current.
  const ResonantLevel m{eth_over_delta, 1.0, 1.0 / kConstants.e};
  const double ic = critical_current(CprModel{m}).current;
  return ic * 2.0 / kPi;
}

double eth_from_icrn(double ab_fraction, double delta) {
  if (!(ab_fraction > 0.0 && ab_fraction < 1.0)) {
    throw DomainError(fmt::format("eth_from_icrn: fraction {} not in (0, 1)", ab_fraction));
  }
  if (!(delta > 0.0)) throw DomainError("eth_from_icrn: Delta must be positive");
  constexpr double kLo = 1e-6;
  constexpr double kHi = 0.99;
  auto g = [&](double x) { return resonant_level_ab_fraction(x) - ab_fraction; };
  if (g(kLo) > 0.0 || g(kHi) < 0.0) {
    throw DomainError(fmt::format(
        "eth_from_icrn: fraction {} has no root for E_Th/Delta in ({}, {})", ab_fraction, kLo,
        kHi));
  }
  return numeric::bisect(g, kLo, kHi, 1e-13) * delta;
}

HarmonicDecomposition harmonics(const CprModel& model, int max_harmonic) {
  if (max_harmonic < 1) throw DomainError("harmonics: K must be >= 1");
  validate(model);

  // max|I| over a period; odd symmetry makes [0, pi] sufficient.
  double max_abs = 0.0;
  constexpr int kScan = 4096;
  for (int i = 0; i <= kScan; ++i) {
    max_abs = std::max(max_abs, std::abs(cpr_current(model, kPi * i / kScan)));
  }
  const double tolerance = 1e-12 * max_abs;

  HarmonicDecomposition out;
  out.terms.reserve(static_cast<std::size_t>(max_harmonic));
  for (int k = 1; k <= max_harmonic; ++k) {
    // I(phi) sin(k phi) is even, so (1/pi) int_{-pi}^{pi} = (2/pi) int_0^pi.
    auto integrand = [&](double phi) { return cpr_current(model, phi) * std::sin(k * phi); };
    const auto q = numeric::integrate_gauss_kronrod(integrand, 0.0, kPi, 0.5 * kPi * tolerance);
    out.terms.push_back({k, 2.0 / kPi * q.value});
  }

  constexpr int kCheck = 512;
  for (int i = 0; i < kCheck; ++i) {
    const double phi = -kPi + 2.0 * kPi * (i + 0.5) / kCheck;
    double recon = 0.0;
    for (const auto& t : out.terms) recon += t.amplitude * std::sin(t.k * phi);
    out.residual = std::max(out.residual, std::abs(cpr_current(model, phi) - recon));
  }
  return out;
}

std::vector<Harmonic> energy_phase(const CprModel& model, int max_harmonic) {
  const auto decomposition = harmonics(model, max_harmonic);
  std::vector<Harmonic> energies;
  energies.reserve(decomposition.terms.size());
  const double flux_scale = kConstants.hbar / (2.0 * kConstants.e);
  for (const auto& t : decomposition.terms) {
    energies.push_back({t.k, flux_scale * t.amplitude / t.k});
  }
  return energies;
}

}  // namespace weaklink::cpr
