#include <doctest.h>

#include <cmath>
#include <random>

#include "support/synth.hpp"
#include "weaklink/error.hpp"
#include "weaklink/films.hpp"
#include "weaklink/physcore.hpp"

using namespace weaklink;
using doctest::Approx;

namespace {

films::RsTSeries series_of(double d_nm, double (*rs)(double)) {
  films::RsTSeries s;
  s.thickness = d_nm * 1e-9;
  for (double t : synth::linspace(1.0, 20.0, 40)) s.points.push_back({t, rs(t)});
  return s;
}

}  // namespace

TEST_SUITE("films") {
  TEST_CASE("three phases") {
    auto ins = series_of(2.0, [](double t) { return 100.0 * std::exp(-t / 2.0); });
    CHECK(films::classify_phase(ins).phase == films::Phase::Insulating);

    auto sc = series_of(4.0, [](double t) { return t < 10.0 ? 1e-3 : 5000.0; });
    // The window [1, 5.75] K sits entirely below the step, so widen it.
    films::ClassifyOptions wide;
    wide.window_fraction = 0.6;
    CHECK(films::classify_phase(sc, wide).phase == films::Phase::Superconducting);

    auto flat = series_of(3.0, [](double) { return 6450.0; });
    const auto c = films::classify_phase(flat);
    CHECK(c.phase == films::Phase::Flat);
    CHECK(c.slope == Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("too few window points") {
    films::RsTSeries s;
    s.thickness = 3e-9;
    for (double t : synth::linspace(1.0, 20.0, 8)) s.points.push_back({t, 100.0 + t});
    CHECK_THROWS_AS(films::classify_phase(s), InsufficientDataError);
  }

  TEST_CASE("validation") {
    films::RsTSeries s;
    s.points = {{2.0, 1.0}, {1.0, 2.0}};
    CHECK_THROWS_AS(s.validate(), DomainError);
    s.points = {{1.0, 1.0}, {2.0, -2.0}};
    CHECK_THROWS_AS(s.validate(), DomainError);
  }

  TEST_CASE("scale invariance of the class") {
    const auto s = synth::film(2.3);
    auto scaled = s;
    for (auto& p : scaled.points) p.rs *= 7.0;
    films::ClassifyOptions o;
    films::ClassifyOptions o7;
    o7.tolerance = 7.0;
    CHECK(films::classify_phase(s, o).phase == films::classify_phase(scaled, o7).phase);
  }

  TEST_CASE("critical thickness midpoint") {
    std::vector<films::RsTSeries> fam = {
        series_of(2.0, [](double t) { return 9000.0 * std::exp(-t / 4.0) + 7000.0; }),
        series_of(2.5, [](double t) { return 3000.0 * std::exp(-t / 4.0) + 6500.0; }),
        series_of(3.0, [](double t) { return 6000.0 + 40.0 * t; }),
        series_of(4.0, [](double t) { return 2000.0 + 60.0 * t; })};
    const auto r = films::critical_thickness(fam);
    CHECK(r.d_c == Approx(2.75e-9).epsilon(1e-12));
    CHECK(r.d_c > r.insulating_thickness);
    CHECK(r.d_c < r.superconducting_thickness);
  }

  TEST_CASE("family crossing R_Q") {
    const auto fam = synth::film_family();
    const auto r = films::critical_thickness(fam);
    CHECK(r.d_c == Approx(2.75e-9).epsilon(1e-9));
    CHECK(r.rs_at_dc == Approx(kConstants.r_q).epsilon(0.02));
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const bool thick = fam[i].thickness > 2.75e-9;
      CHECK(r.classes[i].phase ==
            (thick ? films::Phase::Superconducting : films::Phase::Insulating));
    }
  }

  TEST_CASE("single-class family") {
    std::vector<films::RsTSeries> fam = {synth::film(3.0), synth::film(3.5)};
    CHECK_THROWS_AS(films::critical_thickness(fam), DomainError);
  }

  TEST_CASE("Mattis-Bardeen consistency") {
    const double delta = 2.03 * units::meV;
    std::vector<std::pair<double, double>> exact;
    std::vector<std::pair<double, double>> plus10;
    for (double rn : {500.0, 1300.0, 6453.2, 12000.0}) {
      const double lk = phys::mattis_bardeen(rn, phys::MbDirection::RnToLk, delta);
      exact.emplace_back(rn, lk);
      plus10.emplace_back(rn, 1.1 * lk);
    }
    CHECK(films::mb_consistency(exact, delta).rms_relative_deviation == Approx(0.0).epsilon(1e-14));
    CHECK(films::mb_consistency(plus10, delta).rms_relative_deviation ==
          Approx(0.10).epsilon(1e-12));

    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<std::pair<double, double>> noisy;
    for (int i = 0; i < 1000; ++i) {
      const double rn = 100.0 + 10.0 * i;
      noisy.emplace_back(rn, phys::mattis_bardeen(rn, phys::MbDirection::RnToLk, delta) *
                                 (1.0 + noise(rng)));
    }
    const double rms = films::mb_consistency(noisy, delta).rms_relative_deviation;
    CHECK(rms > 0.03);
    CHECK(rms < 0.07);
  }
}
