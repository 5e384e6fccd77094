#include "weaklink/physcore.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weaklink/error.hpp"

namespace weaklink::phys {
namespace {

constexpr double kStrongRatio = 1.96;   // Delta0 / k_B Tc
constexpr double kBcsRatio = 1.764;     // weak-coupling Delta0 / k_B Tc
constexpr double kNearTcPrefactor = 3.06;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(fmt::format("{} must be positive and finite (got {})", what, v));
  }
}

}  // namespace

const char* to_string(Coupling coupling) noexcept {
  switch (coupling) {
    case Coupling::StrongPhenomenological:
      return "strong_phenomenological";
    case Coupling::WeakNearTc:
      return "weak_near_tc";
  }
  return "unknown";
}

GapModel::GapModel(double tc, Coupling coupling, double delta0, TemperatureWindow validity)
    : tc_(tc), coupling_(coupling), delta0_(delta0), validity_(validity) {}

GapModel GapModel::strong_phenomenological(double tc) {
  require_positive(tc, "Tc");
  return strong_phenomenological(tc, kStrongRatio * kConstants.k_B * tc);
}

GapModel GapModel::strong_phenomenological(double tc, double delta0) {
  require_positive(tc, "Tc");
  require_positive(delta0, "Delta0");
  return GapModel(tc, Coupling::StrongPhenomenological, delta0, {0.0, tc});
}

GapModel GapModel::weak_near_tc(double tc, double lower_fraction) {
  require_positive(tc, "Tc");
  if (!(lower_fraction >= 0.0 && lower_fraction < 1.0)) {
    throw DomainError(fmt::format("weak_near_tc: lower fraction {} not in [0, 1)", lower_fraction));
  }
  return GapModel(tc, Coupling::WeakNearTc, kBcsRatio * kConstants.k_B * tc,
                  {lower_fraction * tc, tc});
}

double GapModel::delta(double temperature) const {
  if (!(temperature >= validity_.lo && temperature <= validity_.hi)) {
    throw DomainError(fmt::format("{} gap: T = {} K outside validity window [{}, {}] K",
                                  to_string(coupling_), temperature, validity_.lo,
                                  validity_.hi));
  }
  switch (coupling_) {
    case Coupling::StrongPhenomenological: {
      const double t = temperature / tc_;
      return delta0_ * std::sqrt(std::max(0.0, 1.0 - t * t));
    }
    case Coupling::WeakNearTc:
      return kNearTcPrefactor * kConstants.k_B * std::sqrt(tc_ * (tc_ - temperature));
  }
  return 0.0;
}

double mattis_bardeen(double value, MbDirection direction, double delta0) {
  require_positive(value, direction == MbDirection::RnToLk ? "R_N" : "L_K");
  require_positive(delta0, "Delta");
  const double scale = kConstants.hbar / (std::numbers::pi * delta0);  // H per Ohm
  return direction == MbDirection::RnToLk ? value * scale : value / scale;
}

AbProduct ab_icrn(const GapModel& model, double temperature) {
  if (!(temperature >= 0.0)) {
    throw DomainError(fmt::format("ab_icrn: negative temperature {}", temperature));
  }
  if (temperature >= model.tc()) {
    return {0.0, temperature > model.tc()};
  }
  const double delta = model.delta(temperature);
  const double prefactor = std::numbers::pi * delta / (2.0 * kConstants.e);
  if (temperature == 0.0) return {prefactor, false};
  return {prefactor * std::tanh(delta / (2.0 * kConstants.k_B * temperature)), false};
}

double thouless_energy(double diffusion, double length) {
  require_positive(diffusion, "D");
  require_positive(length, "l");
  return kConstants.hbar * diffusion / (length * length);
}

double thermal_length(double diffusion, double temperature) {
  require_positive(diffusion, "D");
  require_positive(temperature, "T");
  return std::sqrt(kConstants.hbar * diffusion /
                   (2.0 * std::numbers::pi * kConstants.k_B * temperature));
}

DiffusionScales diffusion_scales(double diffusion, double fermi_velocity, double length,
                                 double temperature) {
  require_positive(fermi_velocity, "v_F");
  DiffusionScales s;
  s.diffusion = diffusion;
  s.fermi_velocity = fermi_velocity;
  s.length = length;
  s.temperature = temperature;
  s.thermal_length = thermal_length(diffusion, temperature);
  s.thouless_energy = thouless_energy(diffusion, length);
  s.mean_free_path = 3.0 * diffusion / fermi_velocity;
  return s;
}

}  // namespace weaklink::phys
