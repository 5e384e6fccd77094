#include "weaklink/sns.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weaklink/constants.hpp"
#include "weaklink/error.hpp"
#include "weaklink/numeric.hpp"

namespace weaklink::sns {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLongJunctionZeroT = 10.82;
constexpr double kNearTcPrefactor = 3.06;

}  // namespace

void DiffusiveJunction::validate() const {
  if (!(length > 0.0) || !(diffusion > 0.0) || !(r_n > 0.0)) {
    throw DomainError(fmt::format(
        "diffusive junction needs positive l, D and R_N (l = {}, D = {}, R_N = {})", length,
        diffusion, r_n));
  }
}

double DiffusiveJunction::thouless_energy() const {
  return phys::thouless_energy(diffusion, length);
}

DubosResult dubos_icrn(const DiffusiveJunction& junction, double temperature,
                       const MatsubaraOptions& options) {
  junction.validate();
  const double tc = junction.gap.tc();
  if (!(temperature > 0.0 && temperature < tc)) {
    throw DomainError(fmt::format("dubos_icrn: T = {} K outside (0, Tc = {} K)", temperature, tc));
  }
  const double kt = kConstants.k_B * temperature;
  const double delta = junction.gap.delta(temperature);
  const double delta_sq = delta * delta;
  const double l = junction.length;
  const double hbar_d = kConstants.hbar * junction.diffusion;

  DubosResult out;
  out.valid = kt > junction.thouless_energy();

  double sum = 0.0;
  std::size_t n = 0;
  for (; n < options.max_terms; ++n) {
    const double omega = (2.0 * static_cast<double>(n) + 1.0) * kPi * kt;
    const double big_omega = std::sqrt(delta_sq + omega * omega);
    const double l_omega = std::sqrt(hbar_d / (2.0 * omega));
    const double ratio = l / l_omega;
    const double denom =
        omega + big_omega + std::sqrt(2.0 * (big_omega * big_omega + omega * big_omega));
    const double term = ratio * delta_sq * std::exp(-ratio) / (denom * denom);
    sum += term;
    if (term < options.relative_threshold * sum || sum == 0.0) {
      ++n;
      break;
    }
  }
  out.terms = n;
  out.icrn = 64.0 * kPi * kt / kConstants.e * sum;
  if (n >= options.max_terms) {
    throw ConvergenceError(fmt::format(
        "dubos_icrn: Matsubara sum not converged after {} terms at T = {} K (partial I_cR_N = "
        "{} V)",
        n, temperature, out.icrn));
  }
  return out;
}

double zero_temperature_icrn(const DiffusiveJunction& junction) {
  junction.validate();
  return kLongJunctionZeroT * junction.thouless_energy() / kConstants.e;
}

void IcTSeries::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].ic >= 0.0) || !std::isfinite(points[i].ic)) {
      throw DomainError(fmt::format("I_c(T) series '{}': negative I_c at point {}", label, i));
    }
    if (i > 0 && !(points[i].temperature > points[i - 1].temperature)) {
      throw DomainError(
          fmt::format("I_c(T) series '{}': temperature not increasing at point {}", label, i));
    }
  }
}

IcTSeries ic_curve(const DiffusiveJunction& junction, std::span<const double> temperatures,
                   bool include_zero_t) {
  junction.validate();
  IcTSeries out;
  out.r_n = junction.r_n;
  out.label = "dubos";
  if (include_zero_t) {
    IcTPoint p;
    p.temperature = 0.0;
    p.ic = zero_temperature_icrn(junction) / junction.r_n;
    p.zero_t_extension = true;
    out.points.push_back(p);
  }
  for (const double t : temperatures) {
    const auto r = dubos_icrn(junction, t);
    IcTPoint p;
    p.temperature = t;
    p.ic = r.icrn / junction.r_n;
    p.valid = r.valid;
    out.points.push_back(p);
  }
  return out;
}

DiffusionFit fit_diffusion(const IcTSeries& data, const DiffusiveJunction& junction_template) {
  junction_template.validate();
  const double tc = junction_template.gap.tc();

  std::vector<IcTPoint> points;
  for (const auto& p : data.points) {
    if (p.zero_t_extension || (p.temperature > 0.0 && p.temperature < tc)) points.push_back(p);
  }
  const bool any_matsubara = std::any_of(points.begin(), points.end(),
                                         [](const IcTPoint& p) { return !p.zero_t_extension; });
  if (!data.points.empty() && !any_matsubara) {
    throw ModelValidityError(fmt::format(
        "fit_diffusion: no data point inside the model window (0, {}) K", tc));
  }
  if (points.size() < 4) {
    throw InsufficientDataError(
        fmt::format("fit_diffusion: {} usable points, need >= 4", points.size()));
  }
  // Sorted evaluation order makes the result independent of input order.
  std::sort(points.begin(), points.end(), [](const IcTPoint& a, const IcTPoint& b) {
    if (a.temperature != b.temperature) return a.temperature < b.temperature;
    return a.ic < b.ic;
  });

  double max_ic = 0.0;
  for (const auto& p : points) max_ic = std::max(max_ic, p.ic);
  std::vector<double> sigma(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    sigma[i] = std::max(points[i].sigma, 0.01 * max_ic);
    if (!(sigma[i] > 0.0)) sigma[i] = 1.0;
  }

  DiffusiveJunction trial = junction_template;
  if (data.r_n > 0.0) trial.r_n = data.r_n;

  auto residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    trial.diffusion = std::exp(p[0]);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double model = points[i].zero_t_extension
                               ? zero_temperature_icrn(trial) / trial.r_n
                               : dubos_icrn(trial, points[i].temperature).icrn / trial.r_n;
      r[static_cast<Eigen::Index>(i)] = (model - points[i].ic) / sigma[i];
    }
  };

  Eigen::VectorXd initial(1);
  initial[0] = std::log(junction_template.diffusion);
  const auto ls = numeric::levenberg_marquardt(residuals, points.size(), initial);
  if (!ls.converged) {
    throw ConvergenceError("fit_diffusion did not converge; " +
                           numeric::describe_cost_trace(ls.cost_trace));
  }

  DiffusionFit fit;
  fit.diffusion = std::exp(ls.parameters[0]);
  fit.log_d_variance = ls.covariance(0, 0);
  fit.diffusion_sigma = fit.diffusion * std::sqrt(std::max(0.0, fit.log_d_variance));
  fit.cost = ls.cost;
  fit.iterations = ls.iterations;
  fit.converged = ls.converged;
  fit.cost_trace = ls.cost_trace;
  fit.points_used = points.size();
  trial.diffusion = fit.diffusion;
  fit.thouless_energy = trial.thouless_energy();
  double t_min = tc;
  for (const auto& p : points) {
    if (!p.zero_t_extension) t_min = std::min(t_min, p.temperature);
  }
  fit.validity_ok = kConstants.k_B * t_min > fit.thouless_energy;
  return fit;
}

AbSlope ab_slope_near_tc(const phys::GapModel& gap, double r_n) {
  if (gap.coupling() != phys::Coupling::WeakNearTc) {
    throw DomainError("ab_slope_near_tc requires the weak-coupling near-Tc gap");
  }
  if (!(r_n > 0.0)) throw DomainError("ab_slope_near_tc: R_N must be positive");
  AbSlope s;
  s.voltage_per_kelvin =
      -kPi * kNearTcPrefactor * kNearTcPrefactor * kConstants.k_B / (4.0 * kConstants.e);
  s.current_per_kelvin = s.voltage_per_kelvin / r_n;
  return s;
}

}  // namespace weaklink::sns
