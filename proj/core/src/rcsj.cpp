#include "weaklink/rcsj.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

#include "weaklink/constants.hpp"
#include "weaklink/error.hpp"
#include "weaklink/numeric/dopri5.hpp"

namespace weaklink::rcsj {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Bias {
  double dc = 0.0;
  double rf = 0.0;
  double omega = 0.0;
};

// Tracks the unwrapped phase Phi = phi + 2 pi winding and, for autonomous
// runs, the first times Phi reaches each new level Phi_start +/- 2 pi k.
struct PhaseTracker {
  std::int64_t winding = 0;
  bool counting = false;
  double start_time = 0.0;
  double start_phase = 0.0;
  std::int64_t up = 0;
  std::int64_t down = 0;
  double last_up_time = 0.0;
  double last_down_time = 0.0;

  double unwrapped(double phi) const { return phi + kTwoPi * static_cast<double>(winding); }

  void begin(double t, double phi) {
    counting = true;
    start_time = t;
    start_phase = unwrapped(phi);
    up = down = 0;
  }
};

// Cubic Hermite interpolant on one accepted step, solved for Phi(t) = level.
double hermite_crossing(double t0, double p0, double d0, double t1, double p1, double d1,
                        double level) {
  const double h = t1 - t0;
  auto value = [&](double s) {
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * p1 +
           (s3 - s2) * h * d1 - level;
  };
  double lo = 0.0;
  double hi = 1.0;
  const bool rising = value(hi) > value(lo);
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((value(mid) < 0.0) == rising) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return t0 + 0.5 * (lo + hi) * h;
}

template <std::size_t N, class Current>
double run(const RcsjConfig& config, const Normalization& norm, const Bias& bias,
           Current&& current, PointDiagnostics* diagnostics) {
  const double beta = config.beta_c;
  auto rhs = [&](double t, const numeric::State<N>& y) {
    const double drive = bias.dc + (bias.rf != 0.0 ? bias.rf * std::sin(bias.omega * t) : 0.0);
    numeric::State<N> dy;
    if constexpr (N == 1) {
      dy[0] = drive - current(y[0]);
    } else {
      dy[0] = y[1];
      dy[1] = (drive - current(y[0]) - y[1]) / beta;
    }
    return dy;
  };

  const double period = kTwoPi / norm.drive_frequency;
  numeric::StepControl control;
  control.rel_tol = config.rel_tol;
  control.abs_tol = config.rel_tol;
  control.max_step = period / 8.0;
  numeric::Dopri5<N, decltype(rhs)> solver(rhs, control);
  numeric::State<N> y0{};
  solver.reset(0.0, y0, std::min(1e-2, period / 64.0));

  PhaseTracker tracker;
  auto wrap = [&](numeric::State<N>& y) {
    if (y[0] > kPi || y[0] < -kPi) {
      const double k = std::round(y[0] / kTwoPi);
      y[0] -= kTwoPi * k;
      tracker.winding += static_cast<std::int64_t>(k);
    }
  };
  auto ignore = [](double, const numeric::State<N>&, const numeric::State<N>&, double,
                   const numeric::State<N>&, const numeric::State<N>&) {};

  const double t_transient = period * config.transient_periods;
  const double t_end = t_transient + period * config.average_periods;
  solver.advance_to(t_transient, ignore, wrap);

  const bool autonomous = bias.rf == 0.0;
  tracker.begin(solver.time(), solver.state()[0]);

  auto count_crossings = [&](double t0, const numeric::State<N>& ya, const numeric::State<N>& fa,
                             double t1, const numeric::State<N>& yb,
                             const numeric::State<N>& fb) {
    const double p0 = tracker.unwrapped(ya[0]);
    const double p1 = tracker.unwrapped(yb[0]);  // yb is not yet wrapped
    const double d0 = fa[0];
    const double d1 = fb[0];
    while (p1 >= tracker.start_phase + kTwoPi * static_cast<double>(tracker.up + 1)) {
      const double level = tracker.start_phase + kTwoPi * static_cast<double>(tracker.up + 1);
      if (!(p0 < level)) break;
      tracker.last_up_time = hermite_crossing(t0, p0, d0, t1, p1, d1, level);
      ++tracker.up;
    }
    while (p1 <= tracker.start_phase - kTwoPi * static_cast<double>(tracker.down + 1)) {
      const double level = tracker.start_phase - kTwoPi * static_cast<double>(tracker.down + 1);
      if (!(p0 > level)) break;
      tracker.last_down_time = hermite_crossing(t0, p0, d0, t1, p1, d1, level);
      ++tracker.down;
    }
  };

  if (autonomous) {
    solver.advance_to(t_end, count_crossings, wrap);
  } else {
    solver.advance_to(t_end, ignore, wrap);
  }

  double mean_rate = 0.0;
  std::size_t periods = 0;
  if (autonomous && tracker.up >= 1 && tracker.up >= tracker.down) {
    mean_rate = kTwoPi * static_cast<double>(tracker.up) /
                (tracker.last_up_time - tracker.start_time);
    periods = static_cast<std::size_t>(tracker.up);
  } else if (autonomous && tracker.down >= 1) {
    mean_rate = -kTwoPi * static_cast<double>(tracker.down) /
                (tracker.last_down_time - tracker.start_time);
    periods = static_cast<std::size_t>(tracker.down);
  } else {
    mean_rate = (tracker.unwrapped(solver.state()[0]) - tracker.start_phase) /
                (solver.time() - tracker.start_time);
  }

  if (diagnostics != nullptr) {
    diagnostics->accepted_steps = solver.accepted_steps();
    diagnostics->rejected_steps = solver.rejected_steps();
    diagnostics->josephson_periods = periods;
  }
  return mean_rate * norm.voltage;
}

template <std::size_t N>
double dispatch(const RcsjConfig& config, const Normalization& norm, const Bias& bias,
                PointDiagnostics* diagnostics) {
  const double inv_ic = 1.0 / norm.critical_current;
  if (const auto* s = std::get_if<cpr::Sinusoidal>(&config.cpr)) {
    const double scale = s->critical_current * inv_ic;
    return run<N>(config, norm, bias, [scale](double phi) { return scale * std::sin(phi); },
                  diagnostics);
  }
  if (const auto* h = std::get_if<cpr::HarmonicSeries>(&config.cpr)) {
    std::vector<cpr::Harmonic> terms = h->terms;
    for (auto& t : terms) t.amplitude *= inv_ic;
    return run<N>(
        config, norm, bias,
        [&terms](double phi) {
          double sum = 0.0;
          for (const auto& t : terms) sum += t.amplitude * std::sin(t.k * phi);
          return sum;
        },
        diagnostics);
  }
  const cpr::CprModel& model = config.cpr;
  return run<N>(
      config, norm, bias,
      [&model, inv_ic](double phi) { return cpr::cpr_current(model, phi) * inv_ic; },
      diagnostics);
}

}  // namespace

void RcsjConfig::validate() const {
  cpr::validate(cpr);
  if (!(resistance > 0.0)) throw DomainError("RCSJ: R must be positive");
  if (!(beta_c >= 0.0)) throw DomainError("RCSJ: beta_c must be >= 0");
  if (!(f_rf > 0.0)) throw DomainError("RCSJ: f_RF must be positive");
  if (transient_periods < 0) throw DomainError("RCSJ: transient_periods must be >= 0");
  if (average_periods < 1) throw DomainError("RCSJ: average_periods must be >= 1");
  if (!(rel_tol > 0.0 && rel_tol <= 1e-6)) {
    throw DomainError(fmt::format("RCSJ: rel_tol {} not in (0, 1e-6]", rel_tol));
  }
}

Normalization normalization(const RcsjConfig& config) {
  config.validate();
  Normalization n;
  n.critical_current = cpr::critical_current(config.cpr).current;
  if (!(n.critical_current > 0.0)) throw DomainError("RCSJ: CPR has no positive critical current");
  n.voltage = n.critical_current * config.resistance;
  n.drive_frequency = kTwoPi * config.f_rf * kConstants.hbar / (2.0 * kConstants.e * n.voltage);
  return n;
}

double shapiro_voltage(double f_rf, double q) {
  return q * kConstants.h * f_rf / (2.0 * kConstants.e);
}

double simulate_point(const RcsjConfig& config, double i_dc, double i_rf,
                      PointDiagnostics* diagnostics) {
  const Normalization norm = normalization(config);
  const Bias bias{i_dc / norm.critical_current, i_rf / norm.critical_current,
                  norm.drive_frequency};
  if (config.beta_c == 0.0) return dispatch<1>(config, norm, bias, diagnostics);
  return dispatch<2>(config, norm, bias, diagnostics);
}

std::vector<double> differential_resistance(std::span<const double> current,
                                            std::span<const double> voltage) {
  const std::size_t n = current.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t a = j == 0 ? 0 : j - 1;
    const std::size_t b = j + 1 == n ? n - 1 : j + 1;
    out[j] = (voltage[b] - voltage[a]) / (current[b] - current[a]);
  }
  return out;
}

ShapiroMap shapiro_map(const RcsjConfig& config, std::span<const double> i_dc_grid,
                       std::span<const double> drive_grid, unsigned threads) {
  config.validate();
  auto monotone = [](std::span<const double> g) {
    for (std::size_t i = 1; i < g.size(); ++i) {
      if (!(g[i] > g[i - 1])) return false;
    }
    return true;
  };
  if (!monotone(i_dc_grid) || !monotone(drive_grid)) {
    throw DomainError("shapiro_map: grids must be strictly increasing");
  }

  ShapiroMap map;
  map.i_dc.assign(i_dc_grid.begin(), i_dc_grid.end());
  map.drive.assign(drive_grid.begin(), drive_grid.end());
  map.voltage.assign(map.i_dc.size() * map.drive.size(), 0.0);

  auto compute_row = [&](std::size_t row) {
    for (std::size_t j = 0; j < map.i_dc.size(); ++j) {
      map.voltage[map.index(row, j)] = simulate_point(config, map.i_dc[j], map.drive[row]);
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, map.drive.size()));
  if (workers == 1) {
    for (std::size_t row = 0; row < map.drive.size(); ++row) compute_row(row);
  } else {
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t row = w; row < map.drive.size(); row += workers) compute_row(row);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  map.dvdi.assign(map.voltage.size(), 0.0);
  for (std::size_t row = 0; row < map.drive.size(); ++row) {
    const std::span<const double> v(&map.voltage[map.index(row, 0)], map.i_dc.size());
    const auto d = differential_resistance(map.i_dc, v);
    std::copy(d.begin(), d.end(), map.dvdi.begin() + static_cast<std::ptrdiff_t>(map.index(row, 0)));
  }
  return map;
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::parse(const std::string& text) {
  try {
    const auto slash = text.find('/');
    std::size_t used = 0;
    Rational r;
    if (slash == std::string::npos) {
      r.num = std::stol(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      r.den = 1;
    } else {
      const std::string a = text.substr(0, slash);
      const std::string b = text.substr(slash + 1);
      r.num = std::stol(a, &used);
      if (used != a.size()) throw std::invalid_argument(text);
      r.den = std::stol(b, &used);
      if (used != b.size()) throw std::invalid_argument(text);
    }
    if (r.den <= 0) throw std::invalid_argument(text);
    const long g = std::gcd(r.num, r.den);
    if (g > 1) {
      r.num /= g;
      r.den /= g;
    }
    return r;
  } catch (const std::logic_error&) {
    throw DomainError("cannot parse step fraction '" + text + "'");
  }
}

StepReport detect_steps(std::span<const double> current, std::span<const double> voltage,
                        double f_rf, std::span<const Rational> fractions,
                        const StepPolicy& policy) {
  if (fractions.empty()) throw DomainError("detect_steps: no fractions requested");
  if (current.size() != voltage.size()) {
    throw DomainError("detect_steps: current and voltage lengths differ");
  }
  StepReport report;
  report.policy = policy;
  report.unit_voltage = shapiro_voltage(f_rf);
  const double band = policy.tolerance_fraction * report.unit_voltage;

  for (const Rational& q : fractions) {
    Step best;
    best.q = q;
    const double target = q.value() * report.unit_voltage;
    std::size_t j = 0;
    while (j < voltage.size()) {
      if (std::abs(voltage[j] - target) >= band) {
        ++j;
        continue;
      }
      std::size_t k = j;
      double sum = 0.0;
      while (k < voltage.size() && std::abs(voltage[k] - target) < band) sum += voltage[k++];
      const std::size_t count = k - j;
      if (count > best.points) {
        best.points = count;
        best.voltage = sum / static_cast<double>(count);
        best.i_lo = current[j];
        best.i_hi = current[k - 1];
        best.span = std::abs(best.i_hi - best.i_lo);
      }
      j = k;
    }
    best.exists = best.points >= policy.min_points;
    report.steps.push_back(best);
  }
  return report;
}

StepReport detect_steps(const ShapiroMap& map, double f_rf, std::span<const Rational> fractions,
                        const StepPolicy& policy) {
  StepReport merged;
  for (std::size_t row = 0; row < map.drive.size(); ++row) {
    const std::span<const double> v(&map.voltage[map.index(row, 0)], map.i_dc.size());
    StepReport r = detect_steps(map.i_dc, v, f_rf, fractions, policy);
    if (row == 0) {
      merged = r;
      for (auto& s : merged.steps) s.drive = map.drive[row];
      continue;
    }
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
      if (r.steps[i].points > merged.steps[i].points) {
        merged.steps[i] = r.steps[i];
        merged.steps[i].drive = map.drive[row];
      }
    }
  }
  if (map.drive.empty()) return detect_steps(std::span<const double>{}, std::span<const double>{},
                                             f_rf, fractions, policy);
  return merged;
}

}  // namespace weaklink::rcsj
