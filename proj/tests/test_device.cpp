#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "photonsim/device.hpp"
#include "photonsim/units.hpp"

using namespace photonsim;

TEST_CASE("default device parameters and the Raman transition frequency") {
    const DeviceParams d = default_device();
    CHECK(to_mhz(d.omega_ge) == doctest::Approx(8025.9));
    CHECK(to_mhz(d.alpha) == doctest::Approx(-318.5));
    CHECK(to_mhz(d.omega_r) == doctest::Approx(10306.0));
    CHECK(to_mhz(d.kappa) == doctest::Approx(53.3));
    // omega_f0g1 = 2 omega_ge + alpha - omega_r
    CHECK(to_mhz(d.omega_f0g1()) == doctest::Approx(2.0 * 8025.9 - 318.5 - 10306.0).epsilon(1e-12));
}

TEST_CASE("hybridized resonator/filter modes") {
    const BareResonatorFilterParams b = default_bare_modes();
    const auto [plus, minus] = hybridize_modes(b);
    // frozen reference values from an independent evaluation of the
    // complex-root formula
    CHECK(to_mhz(plus.omega) == doctest::Approx(10306.446632996483).epsilon(1e-9));
    CHECK(to_mhz(plus.kappa) == doctest::Approx(52.954457415125).epsilon(1e-9));
    CHECK(to_mhz(minus.omega) == doctest::Approx(10159.553367003517).epsilon(1e-9));
    CHECK(to_mhz(minus.kappa) == doctest::Approx(347.045542584875).epsilon(1e-9));
    // linewidths exchange the total: kappa_plus + kappa_minus = kappa_f
    CHECK(plus.kappa + minus.kappa == doctest::Approx(b.kappa_f).epsilon(1e-12));
}

TEST_CASE("reflection ratio is unimodular with phase contrast near the upper mode") {
    const BareResonatorFilterParams b = default_bare_modes();
    const auto [plus, minus] = hybridize_modes(b);
    std::vector<double> grid;
    for (int k = 0; k <= 4000; ++k)
        grid.push_back(mhz(9900.0) + (mhz(10700.0) - mhz(9900.0)) * k / 4000.0);
    const auto ratio = reflection_ratio(b, grid);
    REQUIRE(ratio.size() == grid.size());

    // theta = 0, no internal loss: both qubit-state responses reflect
    // everything, so the g/e ratio stays on the unit circle
    double phase_max = 0.0, w_at_max = 0.0;
    for (std::size_t k = 0; k < ratio.size(); ++k) {
        CHECK(std::abs(std::abs(ratio[k]) - 1.0) < 1e-9);
        const double ph = std::abs(std::arg(ratio[k]));
        if (ph > phase_max) {
            phase_max = ph;
            w_at_max = grid[k];
        }
    }
    // the dispersive contrast peaks within a linewidth of the narrow mode
    CHECK(phase_max > 0.25);
    CHECK(phase_max < 0.40);
    CHECK(std::abs(w_at_max - plus.omega) < plus.kappa);
    // far from any resonance both states look alike
    CHECK(std::abs(reflection_ratio(b, {mhz(9000.0)}).front() - 1.0) < 1e-3);

    // with no dispersive shift the two responses are identical everywhere
    BareResonatorFilterParams flat = b;
    flat.chi = 0.0;
    for (const auto& r : reflection_ratio(flat, grid)) CHECK(std::abs(r - 1.0) < 1e-12);
}

TEST_CASE("drive transduction and effective coupling") {
    const DeviceParams d = default_device();
    CHECK(transduce(d, 1.2) == doctest::Approx(mhz(1700.0)).epsilon(1e-12));
    CHECK(transduce(d, 0.0) == 0.0);
    CHECK_THROWS(transduce(d, -0.1));

    const double g12 = effective_coupling(d, transduce(d, 1.2));
    CHECK(g12 < 0.0);  // alpha < 0 makes the Raman coupling negative
    CHECK(to_mhz(std::abs(g12)) == doctest::Approx(13.0).epsilon(5e-3));
    // linear in the drive amplitude
    const double g06 = effective_coupling(d, transduce(d, 0.6));
    CHECK(g12 == doctest::Approx(2.0 * g06).epsilon(1e-12));
}

TEST_CASE("drive-induced frequency pull is quadratic in the drive") {
    const DeviceParams d = default_device();
    const double s12 = stark_detuning(d, transduce(d, 1.2));
    // -2.77 MHz per (GHz of drive amplitude)^2, at 1.7 GHz
    CHECK(to_mhz(s12) == doctest::Approx(-2.77 * 1.7 * 1.7).epsilon(1e-12));
    const double s06 = stark_detuning(d, transduce(d, 0.6));
    CHECK(s12 == doctest::Approx(4.0 * s06).epsilon(1e-12));
}

TEST_CASE("parameter validation rejects nonsense") {
    DeviceParams d = default_device();
    d.kappa = 0.0;
    CHECK_THROWS(d.validate());
    d = default_device();
    d.omega_r = d.omega_ge;  // Raman denominator vanishes
    CHECK_THROWS(d.validate());
    BareResonatorFilterParams b = default_bare_modes();
    b.kappa_f = -1.0;
    CHECK_THROWS(b.validate());
}
