#include <doctest.h>

#include "model.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

using namespace t1echo;
using std::numbers::pi;

TEST_CASE("derive: resonance puts the free axis at pi/2") {
    const auto d = derive(SystemParams(5.0, 0.0), NoiseRates{});
    CHECK(d.xi0 == doctest::Approx(pi / 2).epsilon(1e-15));
    CHECK(d.omega0 == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(d.clamp_engaged);
}

TEST_CASE("derive: delta_omega = v_perp") {
    const auto d = derive(SystemParams(5.0, 5.0), NoiseRates{});
    CHECK(std::abs(d.xi0 - pi / 4) < 1e-15);
    CHECK(std::abs(d.delta_omega_1 + 5.0) < 1e-15);
    CHECK(std::abs(d.omega1 - std::sqrt(50.0)) < 1e-14);
    CHECK(std::abs(d.t_pi - pi / std::sqrt(50.0)) < 1e-15);
    CHECK_FALSE(d.clamp_engaged);
}

TEST_CASE("derive: negative detuning and pythagorean frequency") {
    CHECK(std::abs(derive(SystemParams(5.0, -5.0), NoiseRates{}).xi0 - 3 * pi / 4) < 1e-15);
    CHECK(std::abs(derive(SystemParams(3.0, 4.0), NoiseRates{}).omega0 - 5.0) < 1e-15);
}

TEST_CASE("gamma_plus is the mean relaxation rate") {
    CHECK(gamma_plus({1.0, 0.0, 0.0, 0.0}) == 0.5);
    CHECK(gamma_plus({0.0, 0.0, 0.0, 0.0}) == 0.0);
    CHECK(gamma_plus({1.0, 1.0, 0.0, 0.0}) == 1.0);
}

TEST_CASE("gamma2 follows gamma1/2 + gammaphi") {
    const NoiseRates n{1.0, 0.2, 0.5, 0.1};
    CHECK(n.gamma2_q() == doctest::Approx(1.0));
    CHECK(n.gamma2_m() == doctest::Approx(0.2));
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(SystemParams(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SystemParams(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SystemParams(1.0, NAN), std::invalid_argument);
    CHECK_THROWS_AS(SystemParams(1.0, 0.0, std::nullopt, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((NoiseRates{-1.0, 0, 0, 0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((NoiseRates{1.0, 0, 0, -0.1}.validate()), std::invalid_argument);
    CHECK_NOTHROW((NoiseRates{0, 0, 0, 0}.validate()));
}

TEST_CASE("rotating-wave warning only when epsilon is supplied") {
    CHECK(SystemParams(5.0, 5.0).warnings().empty());
    CHECK(SystemParams(5.0, 5.0, 1000.0).warnings().empty());
    CHECK(SystemParams(5.0, 5.0, 40.0).warnings().size() == 2);
    CHECK(SystemParams(5.0, 1.0, 40.0).warnings().size() == 1);
}

TEST_CASE("clamp limits the pulse detuning") {
    const SystemParams p(5.0, 0.0, std::nullopt, 50.0);
    bool clamped = false;
    CHECK(pulse_detuning(p, &clamped) == -250.0);
    CHECK(clamped);
    // just outside the clamp region the exact formula applies
    const SystemParams q(5.0, 0.2);
    CHECK(pulse_detuning(q, &clamped) == doctest::Approx(-125.0));
    CHECK_FALSE(clamped);
    // residual axis error of the clamp is atan(1/K)
    const auto d = derive(p, NoiseRates{});
    CHECK(std::abs(std::abs(d.xi1 - d.xi0) - pi / 2) == doctest::Approx(std::atan(1.0 / 50.0)));
}

TEST_CASE("property: pulse axis is perpendicular to the free axis") {
    for (double ratio = -20.0; ratio <= 20.0; ratio += 0.37) {
        if (std::abs(ratio) < 0.05) {
            continue;
        }
        const double v = 5.0;
        const auto d = derive(SystemParams(v, ratio * v), NoiseRates{});
        CHECK(std::abs(std::abs(d.xi1 - d.xi0) - pi / 2) < 1e-12);
    }
}

TEST_CASE("property: two pulse times never exceed two swap times") {
    for (double dw = -100.0; dw <= 100.0; dw += 0.5) {
        const auto d = derive(SystemParams(5.0, dw), NoiseRates{});
        CHECK(2 * d.t_pi <= 2 * d.t_swap);
        CHECK(d.omega0 >= 5.0);
        CHECK(d.xi0 > 0.0);
        CHECK(d.xi0 < pi);
        if (dw > 0) {
            CHECK(d.xi0 < pi / 2);
        }
    }
    // far detuned pulses approach a resonant swap
    const auto far = derive(SystemParams(5.0, 1e6), NoiseRates{});
    CHECK(far.t_pi == doctest::Approx(far.t_swap).epsilon(1e-9));
}

TEST_CASE("derive is bit-for-bit deterministic") {
    const SystemParams p(3.7, -1.3);
    const NoiseRates n{1.0, 0.1, 0.2, 0.3};
    const auto a = derive(p, n);
    const auto b = derive(p, n);
    CHECK(std::memcmp(&a, &b, sizeof(DerivedParams)) == 0);
}
