#include "actukit/error.hpp"
#include "actukit/thermal.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace actukit;
using namespace actukit::thermal;
using doctest::Approx;

namespace {

const MotorParams kMotor = MotorParams::ri50();

/// Partial-fraction step response of Z(s) written independently of the
/// library's state-space realization.
double closed_form_step(const ThermalNetwork& n, double P, double t) {
    const double Rs = n.R_WH + n.R_HA;
    const double ts = n.C_slow * n.R_HA, tf = n.C_fast * n.R_WH;
    const double tz = n.C_slow * n.R_HA * n.R_WH / Rs;
    return P * Rs * (1.0 + (tz - ts) / (ts - tf) * std::exp(-t / ts) + (tf - tz) / (ts - tf) * std::exp(-t / tf));
}

/// RK4 on the parallel-RC (Foster) form of Z(s), power held per step.
std::vector<double> rk4_rise(const ThermalNetwork& n, const std::vector<double>& P, double dt) {
    const double Rs = n.R_WH + n.R_HA;
    const double ts = n.C_slow * n.R_HA, tf = n.C_fast * n.R_WH;
    const double tz = n.C_slow * n.R_HA * n.R_WH / Rs;
    const double a = Rs * (ts - tz) / (ts - tf), b = Rs - a;
    double x1 = 0.0, x2 = 0.0;
    std::vector<double> out(P.size());
    for (std::size_t k = 0; k < P.size(); ++k) {
        out[k] = x1 + x2;
        const auto f1 = [&](double x) { return (a * P[k] - x) / ts; };
        const auto f2 = [&](double x) { return (b * P[k] - x) / tf; };
        const double k1 = f1(x1), k2 = f1(x1 + 0.5 * dt * k1), k3 = f1(x1 + 0.5 * dt * k2), k4 = f1(x1 + dt * k3);
        const double m1 = f2(x2), m2 = f2(x2 + 0.5 * dt * m1), m3 = f2(x2 + 0.5 * dt * m2), m4 = f2(x2 + dt * m3);
        x1 += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x2 += dt / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    }
    return out;
}

std::vector<double> random_power(std::size_t n, std::size_t hold, std::uint64_t seed, double pmax) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, pmax);
    std::vector<double> p(n);
    double v = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k % hold == 0) v = u(rng);
        p[k] = v;
    }
    return p;
}

} // namespace

TEST_CASE("bench networks") {
    CHECK(dc_resistance(ThermalNetwork::fan()) == Approx(2.268).epsilon(1e-12));
    CHECK(dc_resistance(ThermalNetwork::nofan()) == Approx(7.77).epsilon(1e-12));
    CHECK(std::abs(impedance(ThermalNetwork::fan(), 0.0).real() - 2.268) < 1e-12);
    CHECK(std::abs(impedance(ThermalNetwork::fan(), 1e6)) < 1e-5);
    ThermalNetwork bad = ThermalNetwork::fan();
    bad.C_fast = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("impedance magnitude falls with frequency") {
    double prev = std::abs(impedance(ThermalNetwork::nofan(), 0.0));
    for (double f = 1e-4; f < 10.0; f *= 2.0) {
        const double m = std::abs(impedance(ThermalNetwork::nofan(), f));
        CHECK(m < prev);
        prev = m;
    }
}

TEST_CASE("step response against the closed form") {
    const auto fan = ThermalNetwork::fan();
    CHECK(step_rise(fan, 89.5, 20.0) == Approx(63.6359).epsilon(1e-5));
    for (double t : {0.5, 3.0, 20.0, 150.0, 900.0})
        CHECK(step_rise(fan, 10.0, t) == Approx(closed_form_step(fan, 10.0, t)).epsilon(1e-9));
    CHECK(step_rise(fan, 10.0, 6000.0) == Approx(22.68).epsilon(1e-6));
}

TEST_CASE("exact discretization agrees with RK4 at 1 ms") {
    const double dt = 1e-3;
    for (const auto& net : {ThermalNetwork::fan(), ThermalNetwork::nofan()}) {
        const auto P = random_power(60000, 5000, 3, 80.0);
        const auto exact = simulate_rise(net, P, dt);
        const auto oracle = rk4_rise(net, P, dt);
        double worst = 0.0;
        for (std::size_t k = 0; k < P.size(); ++k) worst = std::max(worst, std::abs(exact[k] - oracle[k]));
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("simulate") {
    const auto fan = ThermalNetwork::fan();
    const TimeSeries zero(1.0, 0.0, {{"P", std::vector<double>(100, 0.0), "W"}});
    const auto flat = simulate(fan, zero, 25.0);
    for (double T : flat["T_W"]) CHECK(T == 25.0);

    const TimeSeries step(1.0, 0.0, {{"P", std::vector<double>(6000, 10.0), "W"}});
    const auto T = simulate(fan, step, 25.0)["T_W"];
    CHECK(T.front() == 25.0);
    CHECK((T.back() - 25.0) / 10.0 == Approx(dc_resistance(fan)).epsilon(1e-6));

    const TimeSeries neg(1.0, 0.0, {{"P", {1.0, -0.1, 1.0}, "W"}});
    CHECK_THROWS_AS(simulate(fan, neg, 25.0), InputError);
}

TEST_CASE("initial slope is P over C_fast") {
    for (double dt : {1e-3, 1e-2}) {
        const std::vector<double> P(3, 50.0);
        const auto r = simulate_rise(ThermalNetwork::fan(), P, dt);
        CHECK(r[1] / dt == Approx(50.0 / 15.9).epsilon(0.02));
    }
}

TEST_CASE("simulate is superposable") {
    const auto net = ThermalNetwork::nofan();
    const auto p1 = random_power(3000, 20, 1, 40.0);
    const auto p2 = random_power(3000, 33, 2, 25.0);
    std::vector<double> sum(p1.size());
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = p1[k] + p2[k];
    const auto r1 = simulate_rise(net, p1, 0.5), r2 = simulate_rise(net, p2, 0.5), rs = simulate_rise(net, sum, 0.5);
    for (std::size_t k = 1; k < sum.size(); ++k) CHECK(std::abs(rs[k] - r1[k] - r2[k]) <= 1e-9 * std::abs(rs[k]));
}

TEST_CASE("identify thermal, noiseless fan network") {
    const auto net = ThermalNetwork::fan();
    const auto P = random_power(3600, 20, 5, 40.0);
    const auto rise = simulate_rise(net, P, 1.0);
    std::vector<double> T(rise.size());
    for (std::size_t k = 0; k < T.size(); ++k) T[k] = 25.0 + rise[k];
    const auto fit = identify_thermal(P, T, 1.0, 25.0);
    CHECK(fit.network.R_WH == Approx(net.R_WH).epsilon(0.01));
    CHECK(fit.network.R_HA == Approx(net.R_HA).epsilon(0.01));
    CHECK(fit.network.C_fast == Approx(net.C_fast).epsilon(0.01));
    CHECK(fit.network.C_slow == Approx(net.C_slow).epsilon(0.01));
    CHECK(fit.vaf > 99.99);
    CHECK_FALSE(fit.wide_ci);
}

TEST_CASE("identify thermal, noisy no-fan network") {
    const auto net = ThermalNetwork::nofan();
    const auto P = random_power(3600, 20, 6, 12.0);
    const auto rise = simulate_rise(net, P, 1.0);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 0.5);
    std::vector<double> T(rise.size());
    for (std::size_t k = 0; k < T.size(); ++k) T[k] = 25.0 + rise[k] + noise(rng);
    const auto fit = identify_thermal(P, T, 1.0, 25.0);
    CHECK(dc_resistance(fit.network) == Approx(7.77).epsilon(0.05));
    CHECK(fit.rms_residual == Approx(0.5).epsilon(0.1));
}

TEST_CASE("identify thermal rejects what it cannot identify") {
    const std::vector<double> P(3600, 20.0);
    const auto rise = simulate_rise(ThermalNetwork::fan(), P, 1.0);
    std::vector<double> T(rise.size());
    for (std::size_t k = 0; k < T.size(); ++k) T[k] = 25.0 + rise[k];
    bool rejected = false;
    try {
        rejected = identify_thermal(P, T, 1.0, 25.0).wide_ci;
    } catch (const FitError&) {
        rejected = true;
    }
    CHECK(rejected);

    const std::vector<double> shortP(100, 1.0), shortT(100, 25.0);
    CHECK_THROWS_AS(identify_thermal(shortP, shortT, 1.0, 25.0), InputError);
    CHECK_THROWS_AS(identify_thermal(shortP, std::vector<double>(99, 25.0), 1.0, 25.0), AlignmentError);
}

TEST_CASE("thermistor line") {
    const auto c = ThermistorCalib::ri50();
    CHECK(temperature(c, 1.9906) == Approx(100.0).epsilon(1e-3));
    CHECK(temperature(c, 1.4533) == Approx(25.0).epsilon(4e-3));
    CHECK(std::abs(temperature(c, 1.9906) - 100.0) <= 0.1);
    CHECK(std::abs(temperature(c, 1.4533) - 25.0) <= 0.1);
    CHECK(resistance(c, temperature(c, 1.7)) == Approx(1.7).epsilon(1e-14));

    std::vector<std::pair<double, double>> pts;
    for (double r = 1.4; r < 2.0; r += 0.05) pts.emplace_back(r, 139.564 * r - 177.826);
    const auto fit = thermistor_fit(pts);
    CHECK(fit.r_squared == Approx(1.0).epsilon(1e-12));
    CHECK(fit.slope == Approx(139.564).epsilon(1e-10));
    for (const auto& [r, t] : pts) CHECK(temperature(fit, r) == Approx(t).epsilon(1e-10));

    const std::vector<std::pair<double, double>> same{{1.5, 20.0}, {1.5, 30.0}};
    CHECK_THROWS_AS(thermistor_fit(same), FitError);
    CHECK(resistance_from_vi(3.0, 2.0) == 1.5);
    CHECK_THROWS_AS(resistance_from_vi(3.0, 0.0), DomainError);
}

TEST_CASE("peak current limits") {
    const auto fan = ThermalNetwork::fan();
    const double i20 = max_sustainable_current(fan, kMotor, 20.0);
    const double i2 = max_sustainable_current(fan, kMotor, 2.0);
    CHECK(i20 == Approx(9.98736).epsilon(1e-4));
    CHECK(i2 == Approx(24.5489).epsilon(1e-4));
    CHECK(std::abs(i20 - 9.2) <= 0.15 * 9.2);
    CHECK(std::abs(i2 - 22.0) <= 0.15 * 22.0);
    // the limit is hit exactly at the requested time
    CHECK(25.0 + step_rise(fan, copper_loss(kMotor, i20), 20.0) == Approx(100.0).epsilon(1e-4));
    CHECK(peak_duration(fan, kMotor, i20) == Approx(20.0).epsilon(1e-3));

    const double i_cont = continuous_limits(derive_actuator(kMotor, {1.0, TransmissionStyle::Direct}), 2.268).i_cont;
    CHECK(std::isinf(peak_duration(fan, kMotor, i_cont - 1e-6)));
    CHECK(std::isfinite(peak_duration(fan, kMotor, i_cont + 0.01)));
    CHECK_THROWS_AS(max_sustainable_current(fan, kMotor, 0.0), DomainError);
    CHECK_THROWS_AS(peak_duration(fan, kMotor, 0.0), DomainError);
}

TEST_CASE("limits are monotone") {
    const auto fan = ThermalNetwork::fan();
    double prev = std::numeric_limits<double>::infinity();
    for (double d : {0.5, 1.0, 2.0, 5.0, 20.0, 100.0, 600.0}) {
        const double i = max_sustainable_current(fan, kMotor, d);
        CHECK(i < prev);
        prev = i;
    }
    prev = std::numeric_limits<double>::infinity();
    for (double i : {6.0, 8.0, 10.0, 15.0, 25.0, 40.0}) {
        const double d = peak_duration(fan, kMotor, i);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("limit curve: parallel matches serial reference") {
    std::vector<double> currents;
    for (double i = 6.0; i <= 40.0; i += 0.5) currents.push_back(i);
    const auto s = limit_curve(ThermalNetwork::fan(), kMotor, currents, Exec::Serial);
    const auto p = limit_curve(ThermalNetwork::fan(), kMotor, currents, Exec::Parallel);
    REQUIRE(s.size() == currents.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(s[k].i_q == currents[k]);
        CHECK(s[k].duration == p[k].duration);
        CHECK(s[k].duration == peak_duration(ThermalNetwork::fan(), kMotor, currents[k]));
    }
    const std::vector<double> bad{5.0, -1.0};
    CHECK_THROWS_AS(limit_curve(ThermalNetwork::fan(), kMotor, bad), DomainError);
}

TEST_CASE("cooling advantage") {
    const double adv = cooling_advantage(ThermalNetwork::fan(), ThermalNetwork::nofan());
    CHECK(adv == Approx(7.77 / 2.268).epsilon(1e-12));
    CHECK(std::abs(adv - 3.43) <= 0.05);
    CHECK(std::sqrt(adv) == Approx(1.85).epsilon(0.02 / 1.85));
    CHECK(cooling_advantage(ThermalNetwork::fan(), ThermalNetwork::fan()) == 1.0);
}
