#pragma once

// Synthetic data shared by the unit and acceptance suites.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "weaklink/constants.hpp"
#include "weaklink/films.hpp"
#include "weaklink/iv.hpp"
#include "weaklink/mwfit.hpp"

namespace synth {

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

/// Monotone R_s(T) member crossing R_Q at d_c for every T: thicker films
/// gain resistance with T, thinner ones lose it.
inline weaklink::films::RsTSeries film(double thickness_nm, double dc_nm = 2.75) {
  weaklink::films::RsTSeries s;
  s.thickness = thickness_nm * 1e-9;
  s.label = "d=" + std::to_string(thickness_nm);
  for (double t : linspace(2.0, 20.0, 73)) {
    const double g = 1.0 / (1.0 + t / 5.0);
    s.points.push_back({t, weaklink::kConstants.r_q * std::exp(-(thickness_nm - dc_nm) / 0.3 * g)});
  }
  return s;
}

inline std::vector<weaklink::films::RsTSeries> film_family(std::size_t n = 30) {
  std::vector<weaklink::films::RsTSeries> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(film(1.5 + 0.1 * static_cast<double>(i)));
  return out;
}

/// Overdamped RSJ I-V: V = R sign(I) sqrt(I^2 - Ic^2) above Ic.
inline weaklink::iv::IVCurve rsj_curve(double ic, double rn, double imax_over_ic = 10.0,
                                       std::size_t n = 2001) {
  weaklink::iv::IVCurve c;
  for (double i : linspace(-imax_over_ic * ic, imax_over_ic * ic, n)) {
    c.current.push_back(i);
    c.voltage.push_back(std::abs(i) > ic ? std::copysign(rn * std::sqrt(i * i - ic * ic), i) : 0.0);
  }
  c.sweep = weaklink::iv::Sweep::Up;
  c.label = "rsj";
  return c;
}

/// Voltage-biased blockade curve: leak r_low below v_c, r_high slope above.
inline weaklink::iv::IVCurve blockade_curve(double v_c, double r_low, double r_high,
                                            double vmax, std::size_t n = 801) {
  weaklink::iv::IVCurve c;
  for (double v : linspace(-vmax, vmax, n)) {
    const double excess = std::max(std::abs(v) - v_c, 0.0);
    c.voltage.push_back(v);
    c.current.push_back(v / r_low + std::copysign(excess / r_high, v));
  }
  c.label = "blockade";
  return c;
}

/// Multiplicative complex Gaussian noise of relative size `rel`.
inline void add_relative_noise(weaklink::mw::ComplexTrace& t, double rel, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, rel);
  for (auto& z : t.s21) z *= std::complex<double>(1.0 + n(rng), n(rng));
}

/// Additive complex Gaussian noise of absolute size `sigma`.
inline void add_absolute_noise(weaklink::mw::ComplexTrace& t, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, sigma);
  for (auto& z : t.s21) z += std::complex<double>(n(rng), n(rng));
}

inline weaklink::mw::NotchResonance notch(double f_r, double q_i, double q_c, double phi0,
                                          double delay) {
  weaklink::mw::NotchResonance r;
  r.f_r = f_r;
  r.q_coupling_abs = q_c;
  r.phi0 = phi0;
  r.q_internal = q_i;
  r.q_loaded = 1.0 / (1.0 / q_i + std::cos(phi0) / q_c);
  r.amplitude = 0.8;
  r.phase = 0.7;
  r.delay = delay;
  return r;
}

/// Notch trace spanning `linewidths` loaded linewidths around f_r.
inline weaklink::mw::ComplexTrace notch_trace(const weaklink::mw::NotchResonance& r,
                                              double linewidths = 10.0, std::size_t n = 801) {
  weaklink::mw::ComplexTrace t;
  const double half = 0.5 * linewidths * r.f_r / r.q_loaded;
  t.frequency = linspace(r.f_r - half, r.f_r + half, n);
  for (double f : t.frequency) t.s21.push_back(weaklink::mw::notch_model(r, f));
  t.label = "notch";
  return t;
}

}  // namespace synth
