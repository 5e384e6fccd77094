#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support/synth.hpp"
#include "weaklink/constants.hpp"
#include "weaklink/error.hpp"
#include "weaklink/numeric.hpp"
#include "weaklink/sns.hpp"

using namespace weaklink;
using doctest::Approx;

namespace {

sns::DiffusiveJunction junction(double d_cm2) {
  sns::DiffusiveJunction j;
  j.length = 30e-9;
  j.diffusion = d_cm2 * units::cm2_per_s;
  j.r_n = 1300.0;
  return j;
}

}  // namespace

TEST_SUITE("sns") {
  TEST_CASE("regression fixtures at l = 30 nm") {
    // Locks the denominator reading sqrt(2 (W_n^2 + w_n W_n)).
    const std::vector<std::pair<double, double>> fast = {
        {3, 2.457236626e-4}, {5, 8.703085993e-5}, {7, 2.846607489e-5}, {9, 8.09067481e-6},
        {11, 1.32961581e-6}};
    const std::vector<std::pair<double, double>> slow = {
        {3, 1.337183408e-6}, {5, 8.29092721e-8}, {7, 6.5129003e-9}, {9, 5.382194e-10},
        {11, 2.93078e-11}};
    for (const auto& [t, v] : fast) CHECK(sns::dubos_icrn(junction(1.1), t).icrn == Approx(v).epsilon(1e-8));
    for (const auto& [t, v] : slow) CHECK(sns::dubos_icrn(junction(0.2), t).icrn == Approx(v).epsilon(1e-6));
  }

  TEST_CASE("threshold halving") {
    sns::MatsubaraOptions half;
    half.relative_threshold = 0.5e-12;
    for (double d : {0.2, 1.1}) {
      for (double t = 3.0; t <= 11.0; t += 1.0) {
        const double a = sns::dubos_icrn(junction(d), t).icrn;
        const double b = sns::dubos_icrn(junction(d), t, half).icrn;
        CHECK(std::abs(a - b) / a < 1e-9);
      }
    }
  }

  TEST_CASE("monotone in T and D") {
    double last = 1.0;
    for (double t = 3.0; t <= 11.0; t += 0.25) {
      const double v = sns::dubos_icrn(junction(1.1), t).icrn;
      CHECK(v < last);
      last = v;
    }
    for (double t : {3.0, 7.0, 10.0}) {
      double prev = 0.0;
      for (double d = 0.05; d <= 5.0; d *= 1.2) {
        const double v = sns::dubos_icrn(junction(d), t).icrn;
        CHECK(v > prev);
        prev = v;
      }
    }
  }

  TEST_CASE("vanishes toward Tc") {
    CHECK(sns::dubos_icrn(junction(1.1), 11.999).icrn < 1e-9);
    CHECK_THROWS_AS(sns::dubos_icrn(junction(1.1), 12.0), DomainError);
  }

  TEST_CASE("n = 0 term dominates at high T") {
    sns::MatsubaraOptions first_only;
    first_only.relative_threshold = 10.0;  // stops after the first term
    for (double t = 6.0; t <= 11.0; t += 1.0) {
      const auto full = sns::dubos_icrn(junction(1.1), t);
      const auto one = sns::dubos_icrn(junction(1.1), t, first_only);
      CHECK(one.terms == 1);
      CHECK((full.icrn - one.icrn) / full.icrn < 0.05);
    }
  }

  TEST_CASE("ln IcRn against sqrt(T)") {
    std::vector<double> x;
    std::vector<double> y;
    for (double t = 6.0; t <= 10.0; t += 0.25) {
      x.push_back(std::sqrt(t));
      y.push_back(std::log(sns::dubos_icrn(junction(1.1), t).icrn));
    }
    const auto fit = numeric::ordinary_least_squares(x, y);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      worst = std::max(worst, std::abs(y[i] - fit.slope * x[i] - fit.intercept) / std::abs(y[i]));
    }
    CHECK(worst < 0.02);
  }

  TEST_CASE("zero-temperature extension") {
    const auto j = junction(1.1);
    CHECK(j.thouless_energy() / units::ueV == Approx(80.448).epsilon(1e-4));
    CHECK(sns::zero_temperature_icrn(j) == Approx(0.8704e-3).epsilon(1e-3));
    const auto grid = synth::linspace(3.0, 11.0, 5);
    const auto c = sns::ic_curve(j, grid, true);
    REQUIRE(c.points.size() == 6);
    CHECK(c.points.front().zero_t_extension);
    CHECK_FALSE(c.points[1].zero_t_extension);
  }

  TEST_CASE("diffusion fit round trip") {
    const auto grid = synth::linspace(3.0, 11.0, 17);
    for (double d : {1.1, 0.2}) {
      auto data = sns::ic_curve(junction(d), grid);
      const auto fit = sns::fit_diffusion(data, junction(0.5));
      CHECK(fit.converged);
      CHECK(fit.diffusion / units::cm2_per_s == Approx(d).epsilon(1e-3));
      CHECK(fit.validity_ok);

      // Reordering the data does not change the fit.
      auto reversed = data;
      std::reverse(reversed.points.begin(), reversed.points.end());
      const auto fit2 = sns::fit_diffusion(reversed, junction(0.5));
      CHECK(fit2.diffusion == fit.diffusion);
    }
  }

  TEST_CASE("diffusion fit under noise") {
    const auto grid = synth::linspace(3.0, 11.0, 17);
    const auto clean = sns::ic_curve(junction(1.1), grid);
    for (unsigned seed = 0; seed < 10; ++seed) {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> n(0.0, 0.02);
      auto noisy = clean;
      for (auto& p : noisy.points) p.ic *= 1.0 + n(rng);
      const auto fit = sns::fit_diffusion(noisy, junction(0.5));
      CHECK(fit.diffusion / units::cm2_per_s == Approx(1.1).epsilon(0.05));
    }
  }

  TEST_CASE("fit preconditions") {
    sns::IcTSeries few;
    few.points = {{3, 1e-7}, {4, 5e-8}, {5, 2e-8}};
    CHECK_THROWS_AS(sns::fit_diffusion(few, junction(1.1)), InsufficientDataError);
    sns::IcTSeries outside;
    outside.points = {{13, 0}, {14, 0}, {15, 0}, {16, 0}};
    CHECK_THROWS_AS(sns::fit_diffusion(outside, junction(1.1)), ModelValidityError);
  }

  TEST_CASE("near-Tc Ambegaokar-Baratoff slope") {
    const auto weak = phys::GapModel::weak_near_tc(12.0);
    const auto s = sns::ab_slope_near_tc(weak, 1300.0);
    CHECK(s.voltage_per_kelvin / 1e-6 == Approx(-633.6).epsilon(0.01));
    CHECK(s.current_per_kelvin / 1e-9 == Approx(-487.0).epsilon(0.02));
    CHECK(sns::ab_slope_near_tc(weak, 2600.0).current_per_kelvin ==
          Approx(0.5 * s.current_per_kelvin));
    CHECK_THROWS_AS(sns::ab_slope_near_tc(phys::GapModel::strong_phenomenological(12.0), 1300.0),
                    DomainError);

    // Finite difference of the product itself, just below Tc.
    const double h = 1e-4;
    const double t = 11.99;
    const double fd = (phys::ab_icrn(weak, t + h).icrn - phys::ab_icrn(weak, t - h).icrn) / (2 * h);
    CHECK(fd == Approx(s.voltage_per_kelvin).epsilon(0.01));
  }

  TEST_CASE("fitted slope stays far below AB near Tc") {
    const auto j = junction(1.1);
    const double h = 0.01;
    const double slope = (sns::dubos_icrn(j, 11.0 + h).icrn - sns::dubos_icrn(j, 11.0 - h).icrn) /
                         (2 * h) / j.r_n;
    CHECK(std::abs(slope) < 150e-9);
  }
}
