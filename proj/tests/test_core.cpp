#include "actukit/core.hpp"
#include "actukit/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace actukit;
using doctest::Approx;

namespace {
ActuatorSpec ri50_at(double n) { return derive_actuator(MotorParams::ri50(), {n, TransmissionStyle::Planetary}); }
} // namespace

TEST_CASE("motor constant") {
    CHECK(motor_constant(0.105, 0.094, 0.705) == Approx(0.1183216).epsilon(1e-6));
    CHECK(motor_constant(1.0, 1.0, 1.0) == 1.0);
    CHECK(motor_constant(0.2, 0.2, 0.1) == Approx(0.6324555).epsilon(1e-6));
    CHECK_THROWS_AS(motor_constant(0.0, 0.1, 0.1), DomainError);
    CHECK_THROWS_AS(motor_constant(0.1, -1.0, 0.1), DomainError);
    CHECK_THROWS_AS(motor_constant(0.1, 0.1, 0.0), DomainError);
}

TEST_CASE("motor constant of equal constants is K over root R") {
    for (double k : {0.01, 0.3, 2.0})
        for (double r : {0.05, 0.7, 9.0}) CHECK(motor_constant(k, k, r) == Approx(k / std::sqrt(r)).epsilon(1e-14));
}

TEST_CASE("selection metrics") {
    const auto s = selection_metrics(MotorParams::ri50());
    CHECK(s.S_T == Approx(9.01e-6 / (0.105 * 0.105)).epsilon(1e-12));
    CHECK(s.S_T == Approx(8.172e-4).epsilon(1e-3));
    CHECK(s.S_M == Approx(0.6436e-3).epsilon(1e-3));
    CHECK(s.S_M == Approx(0.67e-3).epsilon(0.10));
    CHECK(s.S_T == Approx(0.82e-3).epsilon(0.01));

    MotorParams unit = MotorParams::ri50();
    unit.J_m = 1.0;
    unit.K_T = 1.0;
    unit.K_B = 1.0;
    unit.R_phi = 1.0;
    const auto u = selection_metrics(unit);
    CHECK(u.K_M == 1.0);
    CHECK(u.S_M == 1.0);
    CHECK(u.S_T == 1.0);
}

TEST_CASE("selection metrics identity S_M = S_T K_T^2 / K_M^2") {
    for (double kt : {0.05, 0.105, 0.4}) {
        MotorParams m = MotorParams::ri50();
        m.K_T = kt;
        const auto s = selection_metrics(m);
        CHECK(s.S_M == Approx(s.S_T * kt * kt / (s.K_M * s.K_M)).epsilon(1e-14));
        CHECK(s.K_M > 0.0);
        CHECK(s.S_M > 0.0);
        CHECK(s.S_T > 0.0);
    }
}

TEST_CASE("derive actuator") {
    const auto a = ri50_at(7.5);
    CHECK(a.K_Ta == Approx(0.79).epsilon(0.01 / 0.79));
    CHECK(a.K_Ma == Approx(0.89).epsilon(0.01 / 0.89));
    CHECK(a.K_Ta == 7.5 * 0.105);
    CHECK(a.J_a_pred == 7.5 * 7.5 * 9.01e-6);

    const auto d = ri50_at(1.0);
    CHECK(d.K_Ta == 0.105);
    CHECK(d.J_a_pred == 9.01e-6);

    CHECK(ri50_at(15.04).J_a_pred == Approx(2.038e-3).epsilon(1e-3));
}

TEST_CASE("derive actuator scales linearly and quadratically in N") {
    for (double n : {1.0, 3.3, 7.5, 12.0}) {
        const auto a = ri50_at(n);
        const auto b = ri50_at(2.0 * n);
        CHECK(b.K_Ta == Approx(2.0 * a.K_Ta).epsilon(1e-15));
        CHECK(b.K_Ma == Approx(2.0 * a.K_Ma).epsilon(1e-15));
        CHECK(b.J_a_pred == Approx(4.0 * a.J_a_pred).epsilon(1e-15));
    }
}

TEST_CASE("selection range is advisory") {
    TransmissionSpec t{45.0, TransmissionStyle::Wolfrom};
    CHECK_FALSE(t.in_selection_range());
    CHECK_NOTHROW(derive_actuator(MotorParams::ri50(), t));
    CHECK(TransmissionSpec{30.0, TransmissionStyle::Planetary}.in_selection_range());
}

TEST_CASE("continuous limits") {
    const auto l = continuous_limits(ri50_at(7.5), 2.27);
    CHECK(l.i_cont == Approx(5.58956).epsilon(1e-5));
    CHECK(l.tau_cont == Approx(4.40).epsilon(0.01));
    CHECK(continuous_limits(ri50_at(15.04), 2.27).tau_cont == Approx(8.83).epsilon(0.01));

    auto hot = ri50_at(7.5);
    hot.motor.T_ambient = hot.motor.T_max;
    CHECK(continuous_limits(hot, 2.27).i_cont == 0.0);

    CHECK_THROWS_AS(continuous_limits(ri50_at(7.5), 0.0), DomainError);
    CHECK_THROWS_AS(continuous_limits(ri50_at(7.5), -1.0), DomainError);
}

TEST_CASE("continuous current scales as inverse root of R_th") {
    const auto a = ri50_at(7.5);
    for (double r : {0.5, 2.27, 7.77}) {
        const double full = continuous_limits(a, r).i_cont;
        const double half = continuous_limits(a, r / 2.0).i_cont;
        CHECK(half / full == Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("copper loss") {
    const auto m = MotorParams::ri50();
    CHECK(copper_loss(m, 0.0) == 0.0);
    CHECK(copper_loss(m, 2.0) == Approx(1.5 * 0.705 * 4.0));
}

TEST_CASE("parameter validation") {
    MotorParams m = MotorParams::ri50();
    CHECK_NOTHROW(m.validate());
    m.L_e = 0.0;
    CHECK_THROWS_AS(m.validate(), DomainError);
    m = MotorParams::ri50();
    m.T_max = 20.0;
    CHECK_THROWS_AS(m.validate(), DomainError);
    CHECK_THROWS_AS((TransmissionSpec{0.0, TransmissionStyle::Direct}.validate()), DomainError);
}

TEST_CASE("enum names round trip") {
    for (auto s : {TransmissionStyle::Direct, TransmissionStyle::Planetary, TransmissionStyle::Wolfrom})
        CHECK(transmission_style_from_string(to_string(s)) == s);
    for (auto w : {WindingStyle::Wye, WindingStyle::Delta}) CHECK(winding_style_from_string(to_string(w)) == w);
    CHECK_THROWS_AS(winding_style_from_string("star"), ConfigError);
}
