#include "weaklink/films.hpp"

#include <fmt/format.h>

#include <cmath>
#include <optional>

#include "weaklink/error.hpp"
#include "weaklink/numeric.hpp"
#include "weaklink/physcore.hpp"

namespace weaklink::films {

const char* to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::Superconducting:
      return "superconducting";
    case Phase::Insulating:
      return "insulating";
    case Phase::Flat:
      return "flat";
  }
  return "unknown";
}

void RsTSeries::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].rs > 0.0) || !std::isfinite(points[i].rs)) {
      throw DomainError(fmt::format("R_s(T) series '{}': point {} has non-positive R_s", label, i));
    }
    if (i > 0 && !(points[i].temperature > points[i - 1].temperature)) {
      throw DomainError(
          fmt::format("R_s(T) series '{}': temperature not increasing at point {}", label, i));
    }
  }
}

PhaseClass classify_phase(const RsTSeries& series, const ClassifyOptions& options) {
  series.validate();
  if (series.points.empty()) {
    throw InsufficientDataError(fmt::format("R_s(T) series '{}' is empty", series.label));
  }
  const double t_min = series.points.front().temperature;
  const double t_max = series.points.back().temperature;
  const double t_hi = t_min + options.window_fraction * (t_max - t_min);

  std::vector<double> ts;
  std::vector<double> rs;
  for (const auto& p : series.points) {
    if (p.temperature > t_hi) break;
    ts.push_back(p.temperature);
    rs.push_back(p.rs);
  }
  if (ts.size() < options.min_points) {
    throw InsufficientDataError(fmt::format(
        "R_s(T) series '{}': {} points in low-T window [{}, {}] K, need {}", series.label,
        ts.size(), t_min, t_hi, options.min_points));
  }

  PhaseClass out;
  out.slope = numeric::ordinary_least_squares(ts, rs).slope;
  out.t_lo = t_min;
  out.t_hi = t_hi;
  out.window_edge_rs = rs.back();
  out.window_points = ts.size();
  if (out.slope > options.tolerance) {
    out.phase = Phase::Superconducting;
  } else if (out.slope < -options.tolerance) {
    out.phase = Phase::Insulating;
  } else {
    out.phase = Phase::Flat;
  }
  return out;
}

CriticalThickness critical_thickness(std::span<const RsTSeries> family,
                                     const ClassifyOptions& options) {
  CriticalThickness out;
  out.classes.reserve(family.size());
  std::optional<std::size_t> thickest_insulator;
  std::optional<std::size_t> thinnest_superconductor;
  for (std::size_t i = 0; i < family.size(); ++i) {
    out.classes.push_back(classify_phase(family[i], options));
    const double d = family[i].thickness;
    if (out.classes.back().phase == Phase::Insulating) {
      if (!thickest_insulator || d > family[*thickest_insulator].thickness) thickest_insulator = i;
    } else if (out.classes.back().phase == Phase::Superconducting) {
      if (!thinnest_superconductor || d < family[*thinnest_superconductor].thickness) {
        thinnest_superconductor = i;
      }
    }
  }
  if (!thickest_insulator || !thinnest_superconductor) {
    throw DomainError("critical_thickness: no transition, family lacks an insulating or a "
                      "superconducting member");
  }
  const double d_i = family[*thickest_insulator].thickness;
  const double d_s = family[*thinnest_superconductor].thickness;
  if (!(d_i < d_s)) {
    throw DomainError(fmt::format(
        "critical_thickness: thickest insulator ({} m) is not thinner than thinnest "
        "superconductor ({} m)",
        d_i, d_s));
  }
  out.insulating_thickness = d_i;
  out.superconducting_thickness = d_s;
  out.d_c = 0.5 * (d_i + d_s);
  const double log_i = std::log(out.classes[*thickest_insulator].window_edge_rs);
  const double log_s = std::log(out.classes[*thinnest_superconductor].window_edge_rs);
  const double w = (out.d_c - d_i) / (d_s - d_i);
  out.rs_at_dc = std::exp(log_i + w * (log_s - log_i));
  return out;
}

MbConsistency mb_consistency(std::span<const std::pair<double, double>> pairs, double delta0) {
  MbConsistency out;
  out.per_point.reserve(pairs.size());
  double sum_sq = 0.0;
  for (const auto& [r_n, l_k] : pairs) {
    if (!(l_k > 0.0)) throw DomainError("mb_consistency: L_K must be positive");
    const double expected = phys::mattis_bardeen(r_n, phys::MbDirection::RnToLk, delta0);
    const double dev = (l_k - expected) / expected;
    out.per_point.push_back(dev);
    sum_sq += dev * dev;
  }
  if (!pairs.empty()) {
    out.rms_relative_deviation = std::sqrt(sum_sq / static_cast<double>(pairs.size()));
  }
  return out;
}

}  // namespace weaklink::films
