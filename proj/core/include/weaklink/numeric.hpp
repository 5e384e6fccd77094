#pragma once

// Small numerical kernels shared by the model modules: bracketing root
// finders, grid + golden-section maximization, adaptive Gauss-Kronrod
// quadrature with an absolute tolerance, ordinary least squares and a damped
// (Levenberg-Marquardt) nonlinear least-squares driver.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "weaklink/error.hpp"

namespace weaklink::numeric {

/// Bisection on a sign change of `f` in [lo, hi]. Throws DomainError when the
/// bracket does not contain a sign change.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol, int max_iterations = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw DomainError("bisect: no sign change in bracket [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
  }
  for (int it = 0; it < max_iterations && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Extremum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal `f` on [lo, hi].
template <class F>
Extremum golden_section_max(F&& f, double lo, double hi, double xtol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > xtol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

/// Global maximum of `f` on [lo, hi]: dense grid scan followed by
/// golden-section refinement between the neighbours of the best node.
template <class F>
Extremum grid_golden_max(F&& f, double lo, double hi, std::size_t nodes = 2048,
                         double xtol = 1e-12) {
  const double step = (hi - lo) / static_cast<double>(nodes - 1);
  std::size_t best = 0;
  double best_value = f(lo);
  for (std::size_t i = 1; i < nodes; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double a = lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
  const double b = lo + step * static_cast<double>(best + 1 >= nodes ? nodes - 1 : best + 1);
  Extremum refined = golden_section_max(f, a, b, xtol);
  if (refined.value < best_value) {
    refined = {lo + step * static_cast<double>(best), best_value};
  }
  return refined;
}

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t intervals = 0;
};

/// Adaptive 7/15-point Gauss-Kronrod quadrature with interval bisection.
/// Terminates when the summed Kronrod-Gauss error is below `abs_tol`.
QuadratureResult integrate_gauss_kronrod(const std::function<double(double)>& f, double a,
                                         double b, double abs_tol, int max_depth = 40);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y);

struct LeastSquaresOptions {
  int max_iterations = 200;
  double relative_cost_tolerance = 1e-10;
  double initial_damping = 1e-3;
  double jacobian_step = 1e-7;  // relative central-difference step
};

struct LeastSquaresResult {
  Eigen::VectorXd parameters;
  /// (J^T J)^-1 scaled by the reduced chi-square at the solution.
  Eigen::MatrixXd covariance;
  double cost = 0.0;  // 0.5 * sum r^2
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_trace;
};

using ResidualFunction = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Damped Gauss-Newton (Levenberg-Marquardt). Converged when an accepted step
/// changes the cost by less than `relative_cost_tolerance` relative, or the
/// cost is exactly zero. Does not throw on non-convergence.
LeastSquaresResult levenberg_marquardt(const ResidualFunction& residuals,
                                       std::size_t residual_count,
                                       const Eigen::VectorXd& initial,
                                       const LeastSquaresOptions& options = {});

/// Formats the tail of a cost trace for diagnostics.
std::string describe_cost_trace(const std::vector<double>& trace, std::size_t tail = 5);

}  // namespace weaklink::numeric
