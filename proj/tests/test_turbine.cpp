#include "nbm/error.hpp"
#include "nbm/turbine.hpp"

#include <doctest.h>

#include <cmath>

using namespace nbm;

TEST_CASE("ideal_power: curve anchors") {
    const TurbineSpec spec;
    CHECK(ideal_power(13.0, spec) == 3300.0);
    CHECK(ideal_power(2.0, spec) == 0.0);
    CHECK(ideal_power(25.0, spec) == 0.0);  // at cut-out
    CHECK(ideal_power(30.0, spec) == 0.0);
    CHECK(ideal_power(20.0, spec) == 3300.0);
    CHECK(ideal_power(10.0, spec) == doctest::Approx(3300.0 * 973.0 / 2170.0).epsilon(1e-12));
    CHECK(ideal_power(10.0, spec) == doctest::Approx(1479.7).epsilon(1e-4));
}

TEST_CASE("ideal_power: non-decreasing on [0, rated_wind]") {
    const TurbineSpec spec;
    double previous = -1.0;
    for (double v = 0.0; v <= spec.rated_wind; v += 0.01) {
        const double p = ideal_power(v, spec);
        CHECK(p >= previous);
        previous = p;
    }
}

TEST_CASE("ideal_rotor_speed: ramp anchors") {
    const TurbineSpec spec;
    CHECK(ideal_rotor_speed(13.0, spec) == 13.6);
    CHECK(ideal_rotor_speed(2.0, spec) == 0.0);
    CHECK(ideal_rotor_speed(8.0, spec) == doctest::Approx(10.05).epsilon(1e-12));
    CHECK(ideal_rotor_speed(25.0, spec) == 0.0);
}

TEST_CASE("derived_channels: gearbox and three-phase current") {
    const TurbineSpec spec;
    const auto [g0, c0] = derived_channels(0.0, 0.0, spec);
    CHECK(g0 == 0.0);
    CHECK(c0 == 0.0);

    const auto [g1, c1] = derived_channels(0.0, 13.6, spec);
    CHECK(g1 == doctest::Approx(1536.8).epsilon(1e-12));

    const auto [g2, c2] = derived_channels(3300.0, 0.0, spec);
    CHECK(c2 == doctest::Approx(2906.0).epsilon(1e-3));
    // Exact apparent-power identity.
    CHECK(c2 * std::sqrt(3.0) * spec.line_voltage * 1000.0 * spec.power_factor ==
          doctest::Approx(3300.0 * 1000.0).epsilon(1e-12));
}

TEST_CASE("TurbineSpec: validation") {
    TurbineSpec bad;
    bad.cut_in = 14.0; // above rated wind
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    TurbineSpec ok;
    CHECK_NOTHROW(ok.validate());
}
