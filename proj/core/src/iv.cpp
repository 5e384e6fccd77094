#include "weaklink/iv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "weaklink/constants.hpp"
#include "weaklink/error.hpp"
#include "weaklink/numeric.hpp"

namespace weaklink::iv {
namespace {

struct Point {
  double i;
  double v;
  double dvdi;  // NaN when not supplied
};

std::vector<Point> sorted_by(const IVCurve& c, bool by_voltage) {
  std::vector<Point> pts(c.current.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    pts[k] = {c.current[k], c.voltage[k], c.dvdi.empty() ? std::nan("") : c.dvdi[k]};
  }
  std::sort(pts.begin(), pts.end(), [by_voltage](const Point& a, const Point& b) {
    if (by_voltage) return a.v != b.v ? a.v < b.v : a.i < b.i;
    return a.i != b.i ? a.i < b.i : a.v < b.v;
  });
  return pts;
}

// One side of the curve, ordered outward from zero bias, with |I| as abscissa.
std::vector<Point> side(const std::vector<Point>& pts, int sign) {
  std::vector<Point> out;
  for (const auto& p : pts) {
    if (sign > 0 ? p.i >= 0.0 : p.i <= 0.0) out.push_back({std::abs(p.i), sign * p.v, p.dvdi});
  }
  std::sort(out.begin(), out.end(), [](const Point& a, const Point& b) {
    return a.i != b.i ? a.i < b.i : a.v < b.v;
  });
  return out;
}

struct SideFit {
  double slope = 0.0;
  double r_squared = 0.0;
  std::size_t count = 0;
  double lo = 0.0;
  double hi = 0.0;
};

std::optional<SideFit> high_bias_fit(const std::vector<Point>& s, double top_fraction) {
  if (s.empty()) return std::nullopt;
  const double imax = s.back().i;
  if (!(imax > 0.0)) return std::nullopt;
  const double cut = (1.0 - top_fraction) * imax;
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : s) {
    if (p.i >= cut) {
      x.push_back(p.i);
      y.push_back(p.v);
    }
  }
  if (x.size() < 3) return std::nullopt;
  const auto fit = numeric::ordinary_least_squares(x, y);
  return SideFit{fit.slope, fit.r_squared, x.size(), cut, imax};
}

// Rules return a negative value when they do not fire.
constexpr double kNone = -1.0;

// Largest |I| of the contiguous low-slope run that starts at zero bias.
double slope_rule(const std::vector<Point>& s, double threshold) {
  if (s.size() < 2) return kNone;
  const bool supplied = !std::isnan(s.front().dvdi);
  double ic = kNone;
  if (supplied) {
    for (const auto& p : s) {
      if (!(std::abs(p.dvdi) < threshold)) break;
      ic = p.i;
    }
    return ic;
  }
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double di = s[k + 1].i - s[k].i;
    if (di <= 0.0) continue;
    if (!(std::abs((s[k + 1].v - s[k].v) / di) < threshold)) break;
    ic = s[k + 1].i;
  }
  return ic;
}

// First |I| where |d2V/dI2| exceeds `fraction` of its peak on this side.
// `significance` is the smallest peak |d2V/dI2| that counts as a knee.
double curvature_rule(const std::vector<Point>& s, double fraction, double significance) {
  if (s.size() < 3) return kNone;
  std::vector<double> d2(s.size(), 0.0);
  double peak = 0.0;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double h0 = s[k].i - s[k - 1].i;
    const double h1 = s[k + 1].i - s[k].i;
    if (h0 <= 0.0 || h1 <= 0.0) continue;
    d2[k] = 2.0 *
            (h0 * s[k + 1].v - (h0 + h1) * s[k].v + h1 * s[k - 1].v) /
            (h0 * h1 * (h0 + h1));
    peak = std::max(peak, std::abs(d2[k]));
  }
  if (!(peak > significance)) return kNone;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    if (std::abs(d2[k]) > fraction * peak) return s[k].i;
  }
  return kNone;
}

}  // namespace

const char* to_string(Sweep s) {
  switch (s) {
    case Sweep::Up: return "up";
    case Sweep::Down: return "down";
    case Sweep::Unknown: break;
  }
  return "unknown";
}

Sweep parse_sweep(const std::string& s) {
  if (s == "up") return Sweep::Up;
  if (s == "down") return Sweep::Down;
  if (s.empty() || s == "unknown") return Sweep::Unknown;
  throw SchemaError("sweep direction must be 'up', 'down' or 'unknown', got '" + s + "'");
}

const char* to_string(IcRule r) {
  switch (r) {
    case IcRule::SlopeThreshold: return "slope_threshold";
    case IcRule::CurvatureOnset: return "curvature_onset";
    case IcRule::None: break;
  }
  return "none";
}

void IVCurve::validate() const {
  if (current.size() != voltage.size() || (!dvdi.empty() && dvdi.size() != current.size())) {
    throw SchemaError("I-V curve '" + label + "': column lengths differ");
  }
  if (current.size() < 5) {
    throw InsufficientDataError("I-V curve '" + label + "': need at least 5 points");
  }
  for (std::size_t k = 0; k < current.size(); ++k) {
    if (!std::isfinite(current[k]) || !std::isfinite(voltage[k]) ||
        (!dvdi.empty() && !std::isfinite(dvdi[k]))) {
      throw SchemaError(fmt::format("I-V curve '{}': non-finite value at point {}", label, k));
    }
  }
}

IVFeatures extract_features(const IVCurve& curve, const FeatureRules& rules) {
  curve.validate();
  const auto pts = sorted_by(curve, false);
  const auto pos = side(pts, +1);
  const auto neg = side(pts, -1);
  const bool has_pos = !pos.empty() && pos.back().i > 0.0;
  const bool has_neg = !neg.empty() && neg.back().i > 0.0;

  IVFeatures out;
  out.rules = rules;

  const auto fit_pos = has_pos ? high_bias_fit(pos, rules.top_fraction) : std::nullopt;
  const auto fit_neg = has_neg ? high_bias_fit(neg, rules.top_fraction) : std::nullopt;
  if (!fit_pos && !fit_neg) {
    throw DomainError("I-V curve '" + curve.label + "': no high-bias branch to fit R_N");
  }
  double weight = 0.0;
  for (const auto& f : {fit_pos, fit_neg}) {
    if (!f) continue;
    const double w = static_cast<double>(f->count);
    out.r_n += w * f->slope;
    out.r_n_r_squared += w * f->r_squared;
    out.r_n_window_lo = out.r_n_window_lo == 0.0 ? f->lo : std::min(out.r_n_window_lo, f->lo);
    out.r_n_window_hi = std::max(out.r_n_window_hi, f->hi);
    weight += w;
  }
  out.r_n /= weight;
  out.r_n_r_squared /= weight;
  if (!(out.r_n > 0.0) || out.r_n_r_squared < 0.99) {
    throw DomainError(fmt::format(
        "I-V curve '{}': no linear high-bias branch (slope {:.6g} Ohm, R^2 {:.6g})", curve.label,
        out.r_n, out.r_n_r_squared));
  }

  // Insulating links: low-bias resistance far above the high-bias slope.
  {
    const auto by_v = sorted_by(curve, true);
    double vmax = 0.0;
    for (const auto& p : by_v) vmax = std::max(vmax, std::abs(p.v));
    std::vector<double> v;
    std::vector<double> i;
    for (const auto& p : by_v) {
      if (std::abs(p.v) <= 0.1 * vmax) {
        v.push_back(p.v);
        i.push_back(p.i);
      }
    }
    if (v.size() >= 3 && vmax > 0.0) {
      bool spread = false;
      for (double x : v) spread = spread || x != v.front();
      if (spread) {
        const double g_low = numeric::ordinary_least_squares(v, i).slope;
        if (g_low * out.r_n < 0.1) {
          out.insulating = true;
          const double floor = rules.r_floor > 0.0 ? rules.r_floor : 10.0 * out.r_n;
          out.insulator = extract_insulating(curve, floor);
          out.ic = 0.0;
          out.icrn = out.ic * out.r_n;
          return out;
        }
      }
    }
  }

  const double threshold = rules.slope_fraction * out.r_n;
  double ic_pos = has_pos ? slope_rule(pos, threshold) : kNone;
  double ic_neg = has_neg ? slope_rule(neg, threshold) : kNone;
  out.rule = IcRule::SlopeThreshold;
  if (ic_pos < 0.0 && ic_neg < 0.0) {
    // A knee must bend the slope by at least 1% of R_N across the sweep.
    double imax = 0.0;
    for (const auto& p : pos) imax = std::max(imax, std::abs(p.i));
    for (const auto& p : neg) imax = std::max(imax, std::abs(p.i));
    const double significance = 0.01 * out.r_n / imax;
    ic_pos = has_pos ? curvature_rule(pos, rules.curvature_fraction, significance) : kNone;
    ic_neg = has_neg ? curvature_rule(neg, rules.curvature_fraction, significance) : kNone;
    out.rule = IcRule::CurvatureOnset;
  }
  if (ic_pos < 0.0 && ic_neg < 0.0) {
    throw DomainError("I-V curve '" + curve.label +
                      "': no supercurrent feature (neither the slope nor the curvature rule fires)");
  }
  out.ic_negative = std::max(ic_neg, 0.0);
  out.ic = ic_pos >= 0.0 ? ic_pos : ic_neg;
  out.icrn = out.ic * out.r_n;
  return out;
}

IVFeatures extract_features(const IVCurve& up, const IVCurve& down, const FeatureRules& rules) {
  IVFeatures a = extract_features(up, rules);
  const IVFeatures b = extract_features(down, rules);
  a.ic_other_sweep = b.ic;
  const double scale = std::max(a.ic, b.ic);
  a.hysteretic = scale > 0.0 && std::abs(a.ic - b.ic) / scale > rules.hysteresis_fraction;
  return a;
}

InsulatingFeatures extract_insulating(const IVCurve& curve, double r_floor,
                                      std::optional<double> gap) {
  curve.validate();
  if (!(r_floor > 0.0)) throw DomainError("extract_insulating: r_floor must be positive");
  const auto pts = sorted_by(curve, true);

  // Walk outward from zero voltage on each side.
  auto onset = [&](int sign) -> std::optional<double> {
    std::vector<Point> s;
    for (const auto& p : pts) {
      if (sign * p.v > 0.0) s.push_back({sign * p.i, std::abs(p.v), p.dvdi});
    }
    std::sort(s.begin(), s.end(), [](const Point& a, const Point& b) { return a.v < b.v; });
    if (s.empty()) return std::nullopt;
    bool blockade = false;
    for (const auto& p : s) {
      const bool blocked = std::abs(p.i) * r_floor < p.v;
      if (!blocked) return blockade ? std::optional<double>(p.v) : std::optional<double>(0.0);
      blockade = true;
    }
    return std::nullopt;
  };
  const auto vp = onset(+1);
  const auto vn = onset(-1);
  std::optional<double> v_c;
  for (const auto& v : {vp, vn}) {
    if (v && *v > 0.0) v_c = v_c ? std::min(*v_c, *v) : *v;
  }
  if ((vp && *vp == 0.0) || (vn && *vn == 0.0) || !v_c) {
    throw ModelValidityError("I-V curve '" + curve.label +
                             "' is not insulating: no blockade region below the chord floor " +
                             fmt::format("{:.6g} Ohm", r_floor));
  }

  InsulatingFeatures out;
  out.v_c = *v_c;
  out.r_floor = r_floor;
  std::vector<double> i;
  std::vector<double> v;
  for (const auto& p : pts) {
    if (std::abs(p.v) < 0.5 * out.v_c) {
      i.push_back(p.i);
      v.push_back(p.v);
    }
  }
  if (i.size() < 2) {
    throw InsufficientDataError("I-V curve '" + curve.label +
                                "': fewer than 2 points inside the blockade region");
  }
  const double g = numeric::ordinary_least_squares(v, i).slope;
  out.r_low = g > 0.0 ? 1.0 / g : std::numeric_limits<double>::infinity();
  out.exceeds_100_mohm = out.r_low > 100e6;
  if (gap) {
    out.gap_voltage = 2.0 * *gap / kConstants.e;
    out.above_gap_voltage = out.v_c > *out.gap_voltage;
  }
  return out;
}

}  // namespace weaklink::iv
