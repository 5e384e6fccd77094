#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support/synth.hpp"
#include "weaklink/constants.hpp"
#include "weaklink/cpr.hpp"
#include "weaklink/error.hpp"
#include "weaklink/iv.hpp"
#include "weaklink/rcsj.hpp"

using namespace weaklink;
using doctest::Approx;

TEST_SUITE("iv") {
  TEST_CASE("analytic RSJ curve") {
    const auto f = iv::extract_features(synth::rsj_curve(1e-6, 1e3));
    CHECK(f.ic == Approx(1e-6).epsilon(0.01));
    CHECK(f.ic_negative == Approx(1e-6).epsilon(0.01));
    CHECK(f.r_n == Approx(1e3).epsilon(0.01));
    CHECK(f.rule == iv::IcRule::SlopeThreshold);
    CHECK_FALSE(f.insulating);
    CHECK(f.r_n_window_hi > f.r_n_window_lo);
  }

  TEST_CASE("icrn is the stored product") {
    for (double ic : {20e-9, 3e-6, 100e-6}) {
      const auto f = iv::extract_features(synth::rsj_curve(ic, 2.4e3));
      CHECK(f.icrn == f.ic * f.r_n);
    }
  }

  TEST_CASE("point order does not matter") {
    auto c = synth::rsj_curve(2e-6, 500.0);
    const auto a = iv::extract_features(c);
    std::reverse(c.current.begin(), c.current.end());
    std::reverse(c.voltage.begin(), c.voltage.end());
    c.sweep = iv::Sweep::Down;
    const auto b = iv::extract_features(c);
    CHECK(a.ic == b.ic);
    CHECK(a.r_n == b.r_n);
  }

  TEST_CASE("rounded transition uses the curvature rule") {
    // Thermally rounded: finite slope everywhere below the knee.
    iv::IVCurve c;
    for (double i : synth::linspace(-10e-6, 10e-6, 2001)) {
      c.current.push_back(i);
      const double s = std::sqrt(i * i + 0.25e-12);
      c.voltage.push_back(1e3 * (std::abs(i) > 1e-6 ? std::copysign(std::sqrt(i * i - 1e-12), i)
                                                     : 0.0) +
                          0.05e3 * i * 1e-6 / s);
    }
    const auto f = iv::extract_features(c);
    CHECK(f.rule == iv::IcRule::CurvatureOnset);
    CHECK(f.ic == Approx(1e-6).epsilon(0.1));
  }

  TEST_CASE("simulated RCSJ curves") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u_ic(0.2e-6, 5e-6);
    std::uniform_real_distribution<double> u_r(50.0, 2e3);
    for (int k = 0; k < 10; ++k) {
      rcsj::RcsjConfig cfg;
      const double ic = u_ic(rng);
      cfg.cpr = cpr::Sinusoidal{ic};
      cfg.resistance = u_r(rng);
      // Unused without drive, but it sets the averaging window: keep Omega ~ 1.
      cfg.f_rf = 2.0 * kConstants.e * cfg.resistance * ic / kConstants.h;
      cfg.transient_periods = 20;
      cfg.average_periods = 50;
      iv::IVCurve c;
      for (double i : synth::linspace(-8.0 * ic, 8.0 * ic, 321)) {
        c.current.push_back(i);
        c.voltage.push_back(rcsj::simulate_point(cfg, i, 0.0));
      }
      const auto f = iv::extract_features(c);
      CHECK(f.ic == Approx(ic).epsilon(0.02));
      CHECK(f.r_n == Approx(cfg.resistance).epsilon(0.02));
    }
  }

  TEST_CASE("hysteresis") {
    const auto up = synth::rsj_curve(1e-6, 1e3);
    auto down = synth::rsj_curve(0.8e-6, 1e3);
    down.sweep = iv::Sweep::Down;
    const auto f = iv::extract_features(up, down);
    CHECK(f.hysteretic);
    REQUIRE(f.ic_other_sweep);
    CHECK(*f.ic_other_sweep == Approx(0.8e-6).epsilon(0.01));
    CHECK_FALSE(iv::extract_features(up, synth::rsj_curve(0.98e-6, 1e3)).hysteretic);
  }

  TEST_CASE("blockade curve") {
    const auto c = synth::blockade_curve(10e-3, 200e6, 10e3, 20e-3);
    const auto f = iv::extract_insulating(c, 1e6, 2.03 * units::meV);
    CHECK(f.r_low == Approx(200e6).epsilon(0.01));
    CHECK(f.exceeds_100_mohm);
    CHECK(f.v_c > 9e-3);
    CHECK(f.v_c < 11e-3);
    REQUIRE(f.gap_voltage);
    CHECK(*f.gap_voltage == Approx(4.06e-3).epsilon(1e-12));
    CHECK(*f.above_gap_voltage);
    const auto routed = iv::extract_features(c);
    CHECK(routed.insulating);
    REQUIRE(routed.insulator);
  }

  TEST_CASE("ohmic curve is not insulating") {
    iv::IVCurve c;
    for (double v : synth::linspace(-1e-3, 1e-3, 101)) {
      c.voltage.push_back(v);
      c.current.push_back(v / 1e3);
    }
    CHECK_THROWS_AS(iv::extract_insulating(c, 1e6), ModelValidityError);
    CHECK_THROWS_AS(iv::extract_features(c), DomainError);
  }

  TEST_CASE("no linear branch") {
    iv::IVCurve c;
    for (double i : synth::linspace(-1e-6, 1e-6, 101)) {
      c.current.push_back(i);
      c.voltage.push_back(1e3 * i + 1e-3 * std::sin(40.0 * i / 1e-6));
    }
    CHECK_THROWS_AS(iv::extract_features(c), DomainError);
  }

  TEST_CASE("sweep labels") {
    CHECK(iv::parse_sweep("up") == iv::Sweep::Up);
    CHECK(iv::parse_sweep("down") == iv::Sweep::Down);
    CHECK_THROWS_AS(iv::parse_sweep("sideways"), SchemaError);
  }
}
