#include <doctest.h>

#include <cmath>

#include "support/synth.hpp"
#include "weaklink/constants.hpp"
#include "weaklink/error.hpp"
#include "weaklink/rcsj.hpp"

using namespace weaklink;
using doctest::Approx;

namespace {

// I_c R = h f / 2e at 6.8 GHz, so the reduced drive frequency is 1.
rcsj::RcsjConfig base(cpr::CprModel model = cpr::Sinusoidal{1e-6}) {
  rcsj::RcsjConfig c;
  c.cpr = std::move(model);
  c.resistance = 14.06;
  c.f_rf = 6.8e9;
  return c;
}

rcsj::RcsjConfig quick(cpr::CprModel model = cpr::Sinusoidal{1e-6}) {
  auto c = base(std::move(model));
  c.transient_periods = 50;
  c.average_periods = 200;
  return c;
}

}  // namespace

TEST_SUITE("rcsj") {
  TEST_CASE("step voltages") {
    CHECK(rcsj::shapiro_voltage(6.8e9) / 1e-6 == Approx(14.06).epsilon(1e-3));
    CHECK(rcsj::shapiro_voltage(12.75e9, 0.5) / 1e-6 == Approx(13.18).epsilon(1e-3));
    CHECK(rcsj::shapiro_voltage(12.75e9) / 1e-6 == Approx(26.37).epsilon(1e-3));
  }

  TEST_CASE("undriven junction") {
    const auto c = base();
    CHECK(rcsj::simulate_point(c, 0.5e-6, 0.0) == 0.0);
    const double v = rcsj::simulate_point(c, 2e-6, 0.0);
    CHECK(v == Approx(1e-6 * 14.06 * std::sqrt(3.0)).epsilon(1e-6));
    for (double i : {1.1, 1.5, 3.0, 5.0}) {
      const double vi = rcsj::simulate_point(c, i * 1e-6, 0.0);
      CHECK(std::abs(vi / (1e-6 * 14.06) - std::sqrt(i * i - 1.0)) / std::sqrt(i * i - 1.0) < 1e-6);
    }
  }

  TEST_CASE("config validation") {
    auto c = base();
    c.rel_tol = 1e-5;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = base();
    c.resistance = 0.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = base();
    c.average_periods = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
  }

  TEST_CASE("antisymmetry under bias reversal") {
    const auto c = quick();
    const double scale = 1e-6 * c.resistance;
    // Phase-locked points agree to integration tolerance.
    for (double i : {0.3e-6, 1.25e-6}) {
      const double a = rcsj::simulate_point(c, i, 0.8e-6);
      const double b = rcsj::simulate_point(c, -i, 0.8e-6);
      CHECK(std::abs(a + b) < 1e-9 * scale);
    }
    // Quasi-periodic points carry an O(1/N) window error instead.
    const double a = rcsj::simulate_point(c, 2.1e-6, 0.8e-6);
    const double b = rcsj::simulate_point(c, -2.1e-6, 0.8e-6);
    CHECK(std::abs(a + b) < scale / c.average_periods);
  }

  TEST_CASE("averaging window and tolerance convergence on a locked point") {
    auto c = quick();
    const double v = rcsj::simulate_point(c, 1.4e-6, 1e-6);
    auto longer = c;
    longer.average_periods *= 2;
    CHECK(std::abs(rcsj::simulate_point(longer, 1.4e-6, 1e-6) - v) < 1e-6 * 14.06e-6);
    auto tighter = c;
    tighter.rel_tol *= 0.5;
    CHECK(std::abs(rcsj::simulate_point(tighter, 1.4e-6, 1e-6) - v) < 1e-7 * 14.06e-6);
  }

  TEST_CASE("map consistency and determinism") {
    const auto c = quick();
    const auto i_grid = synth::linspace(-2e-6, 2e-6, 9);
    const std::vector<double> drive = {0.0, 1e-6};
    const auto m1 = rcsj::shapiro_map(c, i_grid, drive, 1);
    const auto m2 = rcsj::shapiro_map(c, i_grid, drive, 3);
    CHECK(m1.voltage == m2.voltage);
    CHECK(m1.dvdi == m2.dvdi);
    for (std::size_t k = 0; k < i_grid.size(); ++k) {
      CHECK(m1.v(0, k) == rcsj::simulate_point(c, i_grid[k], 0.0));
    }
    const std::vector<double> bad = {1.0, 0.0};
    CHECK_THROWS_AS(rcsj::shapiro_map(c, bad, drive), DomainError);
  }

  TEST_CASE("differential resistance") {
    const std::vector<double> i = {0.0, 1.0, 2.0, 4.0};
    const std::vector<double> v = {0.0, 2.0, 4.0, 8.0};
    for (double r : rcsj::differential_resistance(i, v)) CHECK(r == Approx(2.0));
  }

  TEST_CASE("rational parsing") {
    CHECK(rcsj::Rational::parse("1/2").value() == 0.5);
    CHECK(rcsj::Rational::parse("3").value() == 3.0);
    CHECK(rcsj::Rational::parse("3/2").str() == "3/2");
    CHECK_THROWS_AS(rcsj::Rational::parse("1/0"), DomainError);
    CHECK_THROWS_AS(rcsj::Rational::parse("x"), DomainError);
  }

  TEST_CASE("integer steps without half steps for a sine CPR") {
    const auto c = quick();
    const auto i_grid = synth::linspace(0.0, 3e-6, 61);
    const std::vector<double> drive = {1e-6};
    const auto map = rcsj::shapiro_map(c, i_grid, drive);
    const std::vector<rcsj::Rational> q = {{1, 2}, {1, 1}, {2, 1}};
    const auto report = rcsj::detect_steps(map, c.f_rf, q);
    CHECK_FALSE(report.steps[0].exists);
    CHECK(report.steps[1].exists);
    CHECK(report.steps[2].exists);
    for (const auto& s : report.steps) {
      if (!s.exists) continue;
      CHECK(std::abs(s.voltage / report.unit_voltage - s.q.value()) < 0.002);
    }
  }

  TEST_CASE("second harmonic opens a half step") {
    const auto c = quick(cpr::HarmonicSeries{{{1, 1e-6}, {2, 0.3e-6}}});
    const auto i_grid = synth::linspace(0.6e-6, 1.4e-6, 81);
    const std::vector<double> drive = {0.85e-6, 1e-6};
    const auto map = rcsj::shapiro_map(c, i_grid, drive);
    const std::vector<rcsj::Rational> q = {{1, 2}};
    CHECK(rcsj::detect_steps(map, c.f_rf, q).steps[0].exists);
  }

  TEST_CASE("capacitive junction still integrates") {
    auto c = quick();
    c.beta_c = 0.5;
    const double v = rcsj::simulate_point(c, 3e-6, 0.0);
    CHECK(v > 0.0);
    CHECK(v < 3e-6 * c.resistance * 1.0000001);
  }
}
