#include "weaklink/mwfit.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "weaklink/constants.hpp"
#include "weaklink/error.hpp"

namespace weaklink::mw {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> unwrap(std::vector<double> phase) {
  for (std::size_t i = 1; i < phase.size(); ++i) {
    double d = phase[i] - phase[i - 1];
    d = std::remainder(d, 2.0 * kPi);
    phase[i] = phase[i - 1] + d;
  }
  return phase;
}

struct Circle {
  Complex center;
  double radius = 0.0;
  double rms = 0.0;
};

double circle_rms(std::span<const Complex> z, Complex c, double r) {
  double s = 0.0;
  for (const auto& p : z) {
    const double d = std::abs(p - c) - r;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(z.size()));
}

// Kasa algebraic fit: x^2 + y^2 + D x + E y + F = 0.
Circle algebraic_circle(std::span<const Complex> z) {
  const auto n = static_cast<Eigen::Index>(z.size());
  // Centre the cloud first so the normal equations stay well conditioned.
  Complex mean{0.0, 0.0};
  for (const auto& p : z) mean += p;
  mean /= static_cast<double>(z.size());
  double scale = 0.0;
  for (const auto& p : z) scale = std::max(scale, std::abs(p - mean));
  if (scale == 0.0) return {mean, 0.0, 0.0};

  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex p = (z[static_cast<std::size_t>(i)] - mean) / scale;
    a(i, 0) = p.real();
    a(i, 1) = p.imag();
    a(i, 2) = 1.0;
    b(i) = -std::norm(p);
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
  const Complex c{-0.5 * sol(0), -0.5 * sol(1)};
  const double r2 = std::norm(c) - sol(2);
  Circle out;
  out.center = mean + c * scale;
  out.radius = r2 > 0.0 ? std::sqrt(r2) * scale : 0.0;
  out.rms = circle_rms(z, out.center, out.radius);
  return out;
}

Circle geometric_circle(std::span<const Complex> z) {
  Circle start = algebraic_circle(z);
  if (start.radius == 0.0) return start;
  const double s = start.radius;
  Eigen::VectorXd p0(3);
  p0 << 0.0, 0.0, 1.0;
  auto res = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    const Complex c = start.center + Complex{p(0), p(1)} * s;
    for (std::size_t i = 0; i < z.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) = (std::abs(z[i] - c) - p(2) * s) / s;
    }
  };
  const auto fit = numeric::levenberg_marquardt(res, z.size(), p0);
  Circle out;
  out.center = start.center + Complex{fit.parameters(0), fit.parameters(1)} * s;
  out.radius = std::abs(fit.parameters(2)) * s;
  out.rms = circle_rms(z, out.center, out.radius);
  return out;
}

std::vector<Complex> remove_delay(const ComplexTrace& t, double tau) {
  std::vector<Complex> z(t.s21.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = t.s21[i] * std::polar(1.0, 2.0 * kPi * t.frequency[i] * tau);
  }
  return z;
}

// Abscissa where the monotone-ish sequence y crosses `level`, by linear
// interpolation at the first crossing.
double crossing(std::span<const double> x, std::span<const double> y, double level) {
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double a = y[i - 1] - level;
    const double b = y[i] - level;
    if (a == 0.0) return x[i - 1];
    if ((a < 0.0) != (b < 0.0)) return x[i - 1] + (x[i] - x[i - 1]) * a / (a - b);
  }
  throw DomainError("circle_fit: no resonance (phase never crosses its midpoint)");
}

}  // namespace

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }
double drive_amplitude(double dbm) { return std::sqrt(dbm_to_watt(dbm)); }

void ComplexTrace::validate() const {
  if (frequency.size() != s21.size()) {
    throw SchemaError(fmt::format("trace '{}': {} frequencies vs {} S21 values", label,
                                  frequency.size(), s21.size()));
  }
  for (std::size_t i = 0; i < frequency.size(); ++i) {
    if (!std::isfinite(frequency[i]) || !std::isfinite(s21[i].real()) ||
        !std::isfinite(s21[i].imag())) {
      throw SchemaError(fmt::format("trace '{}': non-finite value at point {}", label, i));
    }
    if (i > 0 && !(frequency[i] > frequency[i - 1])) {
      throw SchemaError(
          fmt::format("trace '{}': frequency not strictly increasing at point {}", label, i));
    }
  }
}

ComplexTrace subtract_background(const ComplexTrace& trace, const ComplexTrace& reference) {
  if (trace.frequency != reference.frequency) {
    throw SchemaError("subtract_background: trace '" + trace.label + "' and reference '" +
                      reference.label + "' have different frequency grids");
  }
  ComplexTrace out = trace;
  for (std::size_t i = 0; i < out.s21.size(); ++i) out.s21[i] -= reference.s21[i];
  return out;
}

void SquashParams::validate() const {
  if (!(kappa_c > 0.0) || !(kappa_t >= kappa_c)) {
    throw DomainError(fmt::format("squash parameters need kappa_t >= kappa_c > 0 (got {} and {})",
                                  kappa_t, kappa_c));
  }
  if (!(rabi >= 0.0)) throw DomainError("squash parameters need Omega_R >= 0");
}

Complex squash_response(const SquashParams& p, double f) {
  const double x = 2.0 * (f - p.f_q) / p.kappa_t;
  const double s = p.rabi / p.kappa_t;
  return (p.kappa_c / p.kappa_t) * Complex{1.0, x} / (1.0 + x * x + 2.0 * s * s);
}

ComplexTrace squash_model(const SquashParams& params, std::span<const double> frequencies,
                          double power_dbm) {
  params.validate();
  ComplexTrace t;
  t.frequency.assign(frequencies.begin(), frequencies.end());
  t.s21.reserve(frequencies.size());
  for (double f : frequencies) t.s21.push_back(squash_response(params, f));
  t.power_dbm = power_dbm;
  return t;
}

SquashFit fit_squash(std::span<const ComplexTrace> traces, std::optional<SquashParams> guess) {
  if (traces.size() < 2) {
    throw InsufficientDataError("fit_squash: need at least 2 traces at distinct powers");
  }
  std::set<double> powers;
  for (const auto& t : traces) {
    t.validate();
    if (t.frequency != traces.front().frequency) {
      throw SchemaError("fit_squash: trace '" + t.label + "' has a different frequency grid");
    }
    powers.insert(t.power_dbm);
  }
  if (powers.size() != traces.size()) {
    throw InsufficientDataError("fit_squash: traces must be at distinct powers");
  }

  // Order by power; the weakest trace seeds the shared parameters.
  std::vector<std::size_t> order(traces.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return traces[a].power_dbm < traces[b].power_dbm; });

  const auto& f = traces.front().frequency;
  SquashParams g;
  std::vector<double> depth(traces.size());
  for (std::size_t k = 0; k < traces.size(); ++k) {
    double d = 0.0;
    for (const auto& z : traces[k].s21) d = std::max(d, z.real());
    depth[k] = d;
  }
  if (guess) {
    g = *guess;
  } else {
    const auto& weak = traces[order.front()];
    std::size_t peak = 0;
    for (std::size_t i = 0; i < weak.s21.size(); ++i) {
      if (weak.s21[i].real() > weak.s21[peak].real()) peak = i;
    }
    const double half = 0.5 * weak.s21[peak].real();
    std::size_t lo = peak;
    std::size_t hi = peak;
    while (lo > 0 && weak.s21[lo].real() > half) --lo;
    while (hi + 1 < f.size() && weak.s21[hi].real() > half) ++hi;
    g.f_q = f[peak];
    g.kappa_t = std::max(f[hi] - f[lo], 2.0 * (f[1] - f[0]));
    g.kappa_c = std::max(weak.s21[peak].real() * g.kappa_t, 1e-12 * g.kappa_t);
  }
  const double k0 = g.kappa_t;
  const double dmax = depth[order.front()];

  // Parameters: (f_q - f0)/k0, ln k_t/k0, ln k_c/k0, Omega_k/k0.
  const std::size_t m = traces.size();
  Eigen::VectorXd p0(3 + static_cast<Eigen::Index>(m));
  p0(0) = 0.0;
  p0(1) = 0.0;
  p0(2) = std::log(g.kappa_c / k0);
  for (std::size_t k = 0; k < m; ++k) {
    double s2 = dmax > 0.0 && depth[k] > 0.0 ? 0.5 * (dmax / depth[k] - 1.0) : 0.0;
    if (guess) s2 = std::pow(guess->rabi / k0, 2);
    p0(3 + static_cast<Eigen::Index>(k)) = std::sqrt(std::max(s2, 0.01));
  }

  auto unpack = [&](const Eigen::VectorXd& p, std::size_t k) {
    SquashParams q;
    q.f_q = g.f_q + p(0) * k0;
    q.kappa_t = k0 * std::exp(p(1));
    q.kappa_c = k0 * std::exp(p(2));
    q.rabi = std::abs(p(3 + static_cast<Eigen::Index>(k))) * k0;
    return q;
  };
  double scale = 0.0;
  for (double d : depth) scale = std::max(scale, d);
  if (!(scale > 0.0)) scale = 1.0;
  const std::size_t n = f.size();
  auto residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (std::size_t k = 0; k < m; ++k) {
      const SquashParams q = unpack(p, k);
      for (std::size_t i = 0; i < n; ++i) {
        const Complex d = (squash_response(q, f[i]) - traces[k].s21[i]) / scale;
        const auto base = static_cast<Eigen::Index>(2 * (k * n + i));
        r(base) = d.real();
        r(base + 1) = d.imag();
      }
    }
  };
  const auto lm = numeric::levenberg_marquardt(residuals, 2 * n * m, p0);
  if (!lm.converged) {
    throw ConvergenceError("fit_squash: least squares did not converge; " +
                           numeric::describe_cost_trace(lm.cost_trace));
  }

  SquashFit out;
  const SquashParams first = unpack(lm.parameters, 0);
  out.f_q = first.f_q;
  out.kappa_t = first.kappa_t;
  out.kappa_c = first.kappa_c;
  for (std::size_t k = 0; k < m; ++k) {
    out.rabi.push_back(unpack(lm.parameters, k).rabi);
    out.amplitude.push_back(drive_amplitude(traces[k].power_dbm));
  }
  out.rabi_vs_amplitude = numeric::ordinary_least_squares(out.amplitude, out.rabi);
  out.cost = lm.cost * scale * scale;
  out.iterations = lm.iterations;
  out.converged = lm.converged;
  return out;
}

double device_power_dbm(double applied_dbm, double attenuation_db) {
  return applied_dbm + attenuation_db;
}

AutlerTownesBranches autler_townes(double f_q, double f01, double kappa, double applied_dbm,
                                   double attenuation_db) {
  if (!(f01 > 0.0) || !(kappa >= 0.0)) {
    throw DomainError("autler_townes: need f01 > 0 and kappa >= 0");
  }
  AutlerTownesBranches b;
  b.device_power_dbm = device_power_dbm(applied_dbm, attenuation_db);
  const double split =
      std::sqrt(4.0 * kappa * dbm_to_watt(b.device_power_dbm) / (kConstants.h * f01));
  b.lower = f_q - split;
  b.upper = f_q + split;
  return b;
}

AttenuationFit fit_attenuation(double f_q, double f01, double kappa,
                               std::span<const Sideband> sidebands,
                               double initial_attenuation_db) {
  if (sidebands.size() < 3) {
    throw InsufficientDataError(
        fmt::format("fit_attenuation: need >= 3 sideband points, got {}", sidebands.size()));
  }
  double fscale = 0.0;
  for (const auto& s : sidebands) fscale = std::max(fscale, std::abs(s.frequency - f_q));
  if (!(fscale > 0.0)) fscale = 1.0;
  auto res = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < sidebands.size(); ++i) {
      const auto b = autler_townes(f_q, f01, kappa, sidebands[i].applied_dbm, p(0));
      const double model = sidebands[i].branch < 0 ? b.lower : b.upper;
      r(static_cast<Eigen::Index>(i)) = (model - sidebands[i].frequency) / fscale;
    }
  };
  Eigen::VectorXd p0(1);
  p0(0) = initial_attenuation_db;
  const auto lm = numeric::levenberg_marquardt(res, sidebands.size(), p0);
  if (!lm.converged) {
    throw ConvergenceError("fit_attenuation: did not converge; " +
                           numeric::describe_cost_trace(lm.cost_trace));
  }
  AttenuationFit out;
  out.attenuation_db = lm.parameters(0);
  out.sigma_db = std::sqrt(std::max(lm.covariance(0, 0), 0.0));
  out.rms_residual = std::sqrt(2.0 * lm.cost / static_cast<double>(sidebands.size())) * fscale;
  out.iterations = lm.iterations;
  return out;
}

Complex notch_model(const NotchResonance& r, double f) {
  const Complex env = r.amplitude * std::polar(1.0, r.phase - 2.0 * kPi * f * r.delay);
  const Complex res = (r.q_loaded / r.q_coupling_abs) * std::polar(1.0, r.phi0) /
                      Complex{1.0, 2.0 * r.q_loaded * (f / r.f_r - 1.0)};
  return env * (1.0 - res);
}

NotchResonance circle_fit(const ComplexTrace& trace) {
  trace.validate();
  const std::size_t n = trace.frequency.size();
  if (n < 20) throw InsufficientDataError("circle_fit: need at least 20 points");
  const auto& f = trace.frequency;
  const double span = f.back() - f.front();

  // Initial delay from the off-resonant tails (outer 10% on each side).
  std::vector<double> phase(n);
  for (std::size_t i = 0; i < n; ++i) phase[i] = std::arg(trace.s21[i]);
  phase = unwrap(std::move(phase));
  const std::size_t tail = std::max<std::size_t>(n / 10, 3);
  std::vector<double> tx;
  std::vector<double> ty;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < tail || i >= n - tail) {
      tx.push_back(f[i] - f.front());
      ty.push_back(phase[i]);
    }
  }
  const double tau0 = -numeric::ordinary_least_squares(tx, ty).slope / (2.0 * kPi);

  // The tails still carry the resonance's own phase swing, so refine the
  // delay by making the corrected locus as circular as possible.
  const double window = 1.0 / (2.0 * kPi * span);
  auto roundness = [&](double tau) {
    const auto z = remove_delay(trace, tau);
    const Circle c = algebraic_circle(z);
    return c.radius > 0.0 ? -c.rms / c.radius : -1e300;
  };
  const double tau =
      numeric::grid_golden_max(roundness, tau0 - window, tau0 + window, 129, 1e-6 * window).x;

  const auto z = remove_delay(trace, tau);
  const Circle circle = geometric_circle(z);

  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = std::arg(z[i] - circle.center);
  theta = unwrap(std::move(theta));
  const double mid = 0.5 * (theta.front() + theta.back());
  const double fr0 = crossing(f, theta, mid);
  const double f_hi = crossing(f, theta, mid - 0.5 * kPi);
  const double f_lo = crossing(f, theta, mid + 0.5 * kPi);
  const double width0 = std::max(std::abs(f_hi - f_lo), 1e-3 * (f[1] - f[0]));
  const double ql0 = fr0 / width0;

  // Parameters: theta0, ln(Q_l/Q_l0), (f_r - f_r0)/width0.
  auto phase_res = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    const double ql = ql0 * std::exp(p(1));
    const double fr = fr0 + p(2) * width0;
    for (std::size_t i = 0; i < n; ++i) {
      const double model = p(0) + 2.0 * std::atan(2.0 * ql * (1.0 - f[i] / fr));
      r(static_cast<Eigen::Index>(i)) = model - theta[i];
    }
  };
  Eigen::VectorXd p0(3);
  p0 << mid, 0.0, 0.0;
  const auto lm = numeric::levenberg_marquardt(phase_res, n, p0);
  if (!lm.converged) {
    throw ConvergenceError("circle_fit: phase fit did not converge; " +
                           numeric::describe_cost_trace(lm.cost_trace));
  }

  NotchResonance out;
  out.delay = tau;
  out.q_loaded = ql0 * std::exp(lm.parameters(1));
  out.f_r = fr0 + lm.parameters(2) * width0;
  const double theta0 = lm.parameters(0);
  const Complex off = circle.center + circle.radius * std::polar(1.0, theta0 + kPi);
  out.amplitude = std::abs(off);
  out.phase = std::arg(off);
  const Complex c_norm = circle.center / off;
  const double r_norm = circle.radius / out.amplitude;
  out.circle_rms = circle.rms / out.amplitude;
  if (!(r_norm > 3.0 * out.circle_rms) || r_norm < 1e-9) {
    throw DomainError(fmt::format(
        "circle_fit: no resonance (circle radius {:.3g} consistent with zero, rms {:.3g})",
        r_norm, out.circle_rms));
  }
  out.phi0 = -std::asin(std::clamp(c_norm.imag() / r_norm, -1.0, 1.0));
  out.q_coupling_abs = out.q_loaded / (2.0 * r_norm);
  const double inv_qi = 1.0 / out.q_loaded - std::cos(out.phi0) / out.q_coupling_abs;
  if (!(inv_qi > 0.0)) {
    throw DomainError(fmt::format(
        "circle_fit: impedance mismatch gives Q_i <= 0 (phi0 = {:.6g} rad, Q_l = {:.6g}, "
        "|Q_c| = {:.6g})",
        out.phi0, out.q_loaded, out.q_coupling_abs));
  }
  out.q_internal = 1.0 / inv_qi;
  return out;
}

KerrEstimate kerr_shift(std::span<const std::pair<double, double>> series,
                        const std::function<double(double)>& nbar_of_power) {
  if (series.size() < 2) throw InsufficientDataError("kerr_shift: need >= 2 points");
  std::vector<std::pair<double, double>> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> nbar;
  std::vector<double> fr;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double nb = nbar_of_power(sorted[i].first);
    if (!std::isfinite(nb) || (i > 0 && !(nb > nbar.back()))) {
      throw DomainError(fmt::format(
          "kerr_shift: photon-number calibration is not strictly increasing at P = {} dBm",
          sorted[i].first));
    }
    nbar.push_back(nb);
    fr.push_back(sorted[i].second);
  }
  const auto fit = numeric::ordinary_least_squares(nbar, fr);
  return {fit.slope, fit.intercept, fit.r_squared};
}

}  // namespace weaklink::mw
