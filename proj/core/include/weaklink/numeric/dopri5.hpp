#pragma once

// Dormand-Prince 5(4) explicit Runge-Kutta pair with FSAL and standard
// step-size control. Fixed-size state; the right-hand side is a template
// parameter so it inlines into the stage loop.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "weaklink/error.hpp"

namespace weaklink::numeric {

template <std::size_t N>
using State = std::array<double, N>;

struct StepControl {
  double rel_tol = 1e-8;
  double abs_tol = 1e-8;
  double max_step = std::numeric_limits<double>::infinity();
  double safety = 0.9;
  double min_factor = 0.2;
  double max_factor = 5.0;
};

/// Integrates y' = rhs(t, y) and reports every accepted step to a visitor
/// `(t0, y0, f0, t1, y1, f1)` before the caller-supplied `post_step` hook may
/// rewrite the state (e.g. to wrap a phase variable).
template <std::size_t N, class Rhs>
class Dopri5 {
 public:
  Dopri5(Rhs rhs, StepControl control) : rhs_(std::move(rhs)), control_(control) {}

  void reset(double t, const State<N>& y, double initial_step) {
    t_ = t;
    y_ = y;
    h_ = initial_step;
    f_ = rhs_(t_, y_);
  }

  double time() const noexcept { return t_; }
  const State<N>& state() const noexcept { return y_; }
  State<N>& mutable_state() noexcept { return y_; }
  const State<N>& derivative() const noexcept { return f_; }
  std::size_t accepted_steps() const noexcept { return accepted_; }
  std::size_t rejected_steps() const noexcept { return rejected_; }

  /// Advances exactly to `t_end`. Throws ConvergenceError when the step size
  /// underflows.
  template <class Visitor, class PostStep>
  void advance_to(double t_end, Visitor&& visit, PostStep&& post_step) {
    while (t_ < t_end) {
      double h = std::min(h_, control_.max_step);
      bool last = false;
      if (t_ + h >= t_end || t_end - (t_ + h) < 1e-12 * std::abs(t_end)) {
        h = t_end - t_;
        last = true;
      }
      if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_))) {
        throw ConvergenceError("Runge-Kutta step size underflow at t = " + std::to_string(t_) +
                               "; the problem is stiff at this tolerance (reduce beta_c or "
                               "loosen rel_tol)");
      }
      State<N> y_new;
      State<N> f_new;
      const double err = attempt(h, y_new, f_new);
      if (err <= 1.0) {
        const double t_new = last ? t_end : t_ + h;
        visit(t_, y_, f_, t_new, y_new, f_new);
        t_ = t_new;
        y_ = y_new;
        f_ = f_new;
        post_step(y_);
        ++accepted_;
        const double factor =
            err == 0.0 ? control_.max_factor
                       : std::clamp(control_.safety * std::pow(err, -0.2), control_.min_factor,
                                    control_.max_factor);
        // A truncated final step does not inform the next step size.
        if (!last || factor < 1.0) h_ = h * factor;
      } else {
        ++rejected_;
        h_ = h * std::max(control_.min_factor, control_.safety * std::pow(err, -0.2));
      }
    }
  }

 private:
  double attempt(double h, State<N>& y_new, State<N>& f_new) {
    // Butcher tableau (Dormand & Prince 1980).
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const State<N>& k1 = f_;
    State<N> tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * a21 * k1[i];
    const State<N> k2 = rhs_(t_ + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const State<N> k3 = rhs_(t_ + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y_[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    }
    const State<N> k4 = rhs_(t_ + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y_[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    const State<N> k5 = rhs_(t_ + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y_[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    const State<N> k6 = rhs_(t_ + h, tmp);
    for (std::size_t i = 0; i < N; ++i) {
      y_new[i] = y_[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }
    f_new = rhs_(t_ + h, y_new);

    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double err_i = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                e7 * f_new[i]);
      const double scale = control_.abs_tol +
                           control_.rel_tol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
      sum += (err_i / scale) * (err_i / scale);
    }
    return std::sqrt(sum / static_cast<double>(N));
  }

  Rhs rhs_;
  StepControl control_;
  double t_ = 0.0;
  double h_ = 0.0;
  State<N> y_{};
  State<N> f_{};
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
};

}  // namespace weaklink::numeric
