#include <doctest.h>

#include <cmath>

#include "weaklink/constants.hpp"
#include "weaklink/cpr.hpp"
#include "weaklink/error.hpp"
#include "weaklink/transmon.hpp"

using namespace weaklink;
using doctest::Approx;

namespace {

const double kEc = units::energy_of_frequency(293e6);
const double kEj = units::energy_of_frequency(26.15e9);

}  // namespace

TEST_SUITE("transmon") {
  TEST_CASE("planaron parameters") {
    const auto s = transmon::diagonalize(transmon::sinusoidal_transmon(kEc, kEj));
    CHECK(s.f01 / 1e9 == Approx(7.523932694).epsilon(1e-9));
    CHECK(s.f12 / 1e9 == Approx(7.200940744).epsilon(1e-9));
    CHECK(s.f23 / 1e9 == Approx(6.851933223).epsilon(1e-9));
    // Exact diagonalization of this Hamiltonian; see README on the -306 MHz target.
    CHECK(s.anharmonicity / 1e6 == Approx(-322.99).epsilon(1e-4));
    CHECK(s.anharmonicity == s.f12 - s.f01);
    CHECK(std::abs(s.convergence_shift) < 1e3);
    REQUIRE(s.f01_asymptotic.has_value());
    CHECK(*s.f01_asymptotic / 1e9 == Approx(7.536150656).epsilon(1e-9));
  }

  TEST_CASE("anharmonicity approaches -E_C from above") {
    double last = -1e9;
    for (double r : {50.0, 89.25, 100.0, 200.0, 500.0}) {
      const auto s = transmon::diagonalize(transmon::sinusoidal_transmon(kEc, r * kEc));
      const double a = s.anharmonicity * kConstants.h / kEc;
      CHECK(a < -1.0);
      CHECK(a > last);
      last = a;
    }
    const auto s50 = transmon::diagonalize(transmon::sinusoidal_transmon(kEc, 50 * kEc));
    CHECK(s50.anharmonicity * kConstants.h / kEc == Approx(-1.1492).epsilon(1e-3));
  }

  TEST_CASE("charge dispersion and periodicity in n_g") {
    const auto s0 = transmon::diagonalize(transmon::sinusoidal_transmon(kEc, kEj, 0.0));
    for (double ng : {0.25, 0.5}) {
      const auto s = transmon::diagonalize(transmon::sinusoidal_transmon(kEc, kEj, ng));
      CHECK(std::abs(s.f01 - s0.f01) < 1e3);
    }
    const auto a = transmon::diagonalize(transmon::sinusoidal_transmon(kEc, 20 * kEc, 0.3));
    const auto b = transmon::diagonalize(transmon::sinusoidal_transmon(kEc, 20 * kEc, 1.3));
    CHECK(b.f01 == Approx(a.f01).epsilon(1e-9));
    CHECK(b.f12 == Approx(a.f12).epsilon(1e-9));
  }

  TEST_CASE("cutoff rules") {
    auto p = transmon::sinusoidal_transmon(kEc, kEj);
    CHECK(p.minimum_cutoff() == 4 * static_cast<int>(std::ceil(std::pow(89.249, 0.25))));
    p.n_cut = 5;
    CHECK_THROWS_AS(p.validate(), DomainError);
    transmon::TransmonParams empty;
    empty.e_c = kEc;
    CHECK_THROWS_AS(empty.validate(), DomainError);
  }

  TEST_CASE("Josephson energy extraction") {
    CHECK(transmon::josephson_inductance(kEj) / 1e-9 == Approx(6.25).epsilon(0.005));
    const auto f01 = transmon::diagonalize(transmon::sinusoidal_transmon(kEc, kEj)).f01;
    const auto num = transmon::extract_ej(f01, kEc, transmon::EjMethod::Numerical);
    CHECK(num.e_j == Approx(kEj).epsilon(1e-3));
    CHECK(num.ratio == Approx(89.25).epsilon(1e-3));
    const auto asym = transmon::extract_ej(7.945e9, kEc, transmon::EjMethod::Asymptotic);
    CHECK(units::frequency_of_energy(asym.e_j) / 1e9 == Approx(28.95).epsilon(1e-3));
    CHECK_THROWS_AS(transmon::extract_ej(1e6, kEc, transmon::EjMethod::Numerical), DomainError);
  }

  TEST_CASE("stray participation") {
    const auto none = transmon::stray_participation(6.25e-9, 0.0);
    CHECK(none.participation == 1.0);
    CHECK(none.alpha_ratio == 1.0);
    const auto s = transmon::stray_participation(6.25e-9, 0.2e-9);
    CHECK(s.participation == Approx(0.969).epsilon(1e-3));
    CHECK((1.0 - s.alpha_ratio) * 293.0 == Approx(18.0).epsilon(0.03));
    CHECK(transmon::stray_participation(6.25e-9, 0.2e-9, 3.0).alpha_ratio ==
          Approx(std::pow(s.participation, 3)));
  }

  TEST_CASE("single channel reduces anharmonicity about fourfold") {
    // Same E_C; Delta chosen so the exact curvature Delta tau / 4 equals E_J.
    const cpr::SingleChannel sc{1.0, 4.0 * kEj, 1.0};
    transmon::TransmonParams p;
    p.e_c = kEc;
    p.potential = cpr::energy_phase(sc, 12);
    const auto ratio = transmon::diagonalize(p).anharmonicity /
                       transmon::diagonalize(transmon::sinusoidal_transmon(kEc, kEj)).anharmonicity;
    CHECK(ratio == Approx(0.23126).epsilon(2e-3));
    CHECK(ratio >= 0.22);
    CHECK(ratio <= 0.30);
  }

  TEST_CASE("resonant level harmonic truncation") {
    const double delta = 2.03 * units::meV;
    const cpr::ResonantLevel rl{0.14 * delta, delta, 19.5e3};
    transmon::TransmonParams p12;
    p12.e_c = kEc;
    p12.potential = cpr::energy_phase(rl, 12);
    auto p24 = p12;
    p24.potential = cpr::energy_phase(rl, 24);
    const double a12 = transmon::diagonalize(p12).anharmonicity;
    const double a24 = transmon::diagonalize(p24).anharmonicity;
    CHECK(std::abs(a12 - a24) < 0.1e6);
  }
}
