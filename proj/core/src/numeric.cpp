#include "weaklink/numeric.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>

namespace weaklink::numeric {
namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a;
  double b;
  double value;
  double error;
  int depth;
};

Interval gauss_kronrod_15(const std::function<double(double)>& f, double a, double b,
                          int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half), depth};
}

}  // namespace

QuadratureResult integrate_gauss_kronrod(const std::function<double(double)>& f, double a,
                                         double b, double abs_tol, int max_depth) {
  std::vector<Interval> intervals{gauss_kronrod_15(f, a, b, 0)};
  constexpr std::size_t kMaxIntervals = 20000;

  auto totals = [&] {
    double value = 0.0;
    double error = 0.0;
    for (const auto& iv : intervals) {
      value += iv.value;
      error += iv.error;
    }
    return std::pair{value, error};
  };

  auto [value, error] = totals();
  while (error > abs_tol && intervals.size() < kMaxIntervals) {
    // Split the interval with the largest error; ties resolve to the lowest
    // index so the refinement sequence is reproducible.
    std::size_t worst = intervals.size();
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      if (intervals[i].depth >= max_depth) continue;
      if (worst == intervals.size() || intervals[i].error > intervals[worst].error) {
        worst = i;
      }
    }
    if (worst == intervals.size()) break;
    const Interval parent = intervals[worst];
    const double mid = 0.5 * (parent.a + parent.b);
    intervals[worst] = gauss_kronrod_15(f, parent.a, mid, parent.depth + 1);
    intervals.push_back(gauss_kronrod_15(f, mid, parent.b, parent.depth + 1));
    std::tie(value, error) = totals();
  }
  return {value, error, intervals.size()};
}

LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) {
    throw InsufficientDataError("ordinary_least_squares: need >= 2 paired points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) {
    throw DomainError("ordinary_least_squares: abscissae are all equal");
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.slope_stderr =
      n > 2 ? std::sqrt(ss_res / static_cast<double>(n - 2) / sxx) : 0.0;
  return fit;
}

LeastSquaresResult levenberg_marquardt(const ResidualFunction& residuals,
                                       std::size_t residual_count,
                                       const Eigen::VectorXd& initial,
                                       const LeastSquaresOptions& options) {
  const Eigen::Index n = initial.size();
  const auto m = static_cast<Eigen::Index>(residual_count);

  LeastSquaresResult result;
  result.parameters = initial;

  Eigen::VectorXd r(m);
  residuals(result.parameters, r);
  double cost = 0.5 * r.squaredNorm();
  result.cost_trace.push_back(cost);

  Eigen::MatrixXd jac(m, n);
  Eigen::VectorXd r_plus(m);
  Eigen::VectorXd r_minus(m);
  Eigen::VectorXd trial_r(m);

  auto jacobian = [&](const Eigen::VectorXd& p) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double step = options.jacobian_step * std::max(std::abs(p[j]), 1.0);
      Eigen::VectorXd q = p;
      q[j] = p[j] + step;
      residuals(q, r_plus);
      q[j] = p[j] - step;
      residuals(q, r_minus);
      jac.col(j) = (r_plus - r_minus) / (2.0 * step);
    }
  };

  double damping = options.initial_damping;
  for (int it = 0; it < options.max_iterations; ++it) {
    result.iterations = it + 1;
    if (cost == 0.0) {
      result.converged = true;
      break;
    }
    jacobian(result.parameters);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd gradient = jac.transpose() * r;

    bool accepted = false;
    while (damping < 1e16) {
      Eigen::MatrixXd lhs = jtj;
      for (Eigen::Index j = 0; j < n; ++j) {
        lhs(j, j) += damping * std::max(jtj(j, j), 1e-300);
      }
      const Eigen::VectorXd delta = lhs.ldlt().solve(-gradient);
      const Eigen::VectorXd trial = result.parameters + delta;
      residuals(trial, trial_r);
      const double trial_cost = 0.5 * trial_r.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        const double relative_change = (cost - trial_cost) / cost;
        result.parameters = trial;
        r = trial_r;
        cost = trial_cost;
        result.cost_trace.push_back(cost);
        damping = std::max(damping / 3.0, 1e-12);
        accepted = true;
        if (relative_change < options.relative_cost_tolerance) result.converged = true;
        break;
      }
      damping *= 4.0;
    }
    if (!accepted) {
      // No descent direction left at machine precision: the cost is stationary.
      result.converged = true;
      break;
    }
    if (result.converged) break;
  }

  result.cost = cost;
  jacobian(result.parameters);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  const double dof = static_cast<double>(m > n ? m - n : 1);
  result.covariance =
      jtj.completeOrthogonalDecomposition().pseudoInverse() * (2.0 * cost / dof);
  return result;
}

std::string describe_cost_trace(const std::vector<double>& trace, std::size_t tail) {
  std::string out = "cost trace (last " + std::to_string(std::min(tail, trace.size())) + "):";
  const std::size_t start = trace.size() > tail ? trace.size() - tail : 0;
  for (std::size_t i = start; i < trace.size(); ++i) {
    out += fmt::format(" {:.6e}", trace[i]);
  }
  return out;
}

}  // namespace weaklink::numeric
