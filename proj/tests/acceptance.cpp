#include "actukit/analysis.hpp"
#include "actukit/core.hpp"
#include "actukit/dyno.hpp"
#include "actukit/signals.hpp"
#include "actukit/sysid.hpp"
#include "actukit/thermal.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace actukit;

namespace {

class Criterion {
public:
    Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

    void within(const std::string& what, double value, double target, double tol) {
        check(what, value, target, tol, std::abs(value - target) <= tol);
    }
    void within_rel(const std::string& what, double value, double target, double rel) {
        check(what, value, target, rel * std::abs(target), std::abs(value - target) <= rel * std::abs(target));
    }
    void at_most(const std::string& what, double value, double limit) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s = %.6g (<= %.3g)", what.c_str(), value, limit);
        add(buf, value <= limit);
    }
    void at_least(const std::string& what, double value, double limit) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s = %.6g (>= %.3g)", what.c_str(), value, limit);
        add(buf, value >= limit);
    }
    void holds(const std::string& what, bool ok) { add(what, ok); }

    bool report() const {
        std::printf("%s %2d %s:", ok_ ? "PASS" : "FAIL", id_, title_.c_str());
        for (std::size_t i = 0; i < parts_.size(); ++i) std::printf("%s %s", i ? ";" : "", parts_[i].c_str());
        std::printf("\n");
        return ok_;
    }

private:
    void check(const std::string& what, double value, double target, double tol, bool ok) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s = %.6g (%.6g ± %.3g)", what.c_str(), value, target, tol);
        add(buf, ok);
    }
    void add(const std::string& text, bool ok) {
        parts_.push_back(ok ? text : "[x] " + text);
        ok_ = ok_ && ok;
    }

    int id_;
    std::string title_;
    std::vector<std::string> parts_;
    bool ok_ = true;
};

const MotorParams kMotor = MotorParams::ri50();
constexpr double kRatio7 = 7.5;
constexpr double kRatio15 = 15.04;

ActuatorSpec spec_at(double n) { return derive_actuator(kMotor, {n, TransmissionStyle::Planetary}); }

/// Parallel-RC (Foster) form of the thermal network under RK4, power held per step.
std::vector<double> rk4_rise(const thermal::ThermalNetwork& n, const std::vector<double>& P, double dt) {
    const double Rs = n.R_WH + n.R_HA;
    const double ts = n.C_slow * n.R_HA, tf = n.C_fast * n.R_WH;
    const double tz = n.C_slow * n.R_HA * n.R_WH / Rs;
    const double a = Rs * (ts - tz) / (ts - tf), b = Rs - a;
    double x1 = 0.0, x2 = 0.0;
    std::vector<double> out(P.size() + 1);
    for (std::size_t k = 0; k < P.size(); ++k) {
        out[k] = x1 + x2;
        const auto f1 = [&](double x) { return (a * P[k] - x) / ts; };
        const auto f2 = [&](double x) { return (b * P[k] - x) / tf; };
        const double k1 = f1(x1), k2 = f1(x1 + 0.5 * dt * k1), k3 = f1(x1 + 0.5 * dt * k2), k4 = f1(x1 + dt * k3);
        const double m1 = f2(x2), m2 = f2(x2 + 0.5 * dt * m1), m3 = f2(x2 + 0.5 * dt * m2), m4 = f2(x2 + dt * m3);
        x1 += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x2 += dt / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    }
    out.back() = x1 + x2;
    return out;
}

double min_coherence(const sysid::FrfEstimate& frf, double f_lo, double f_hi) {
    double m = 1.0;
    for (std::size_t i = 0; i < frf.size(); ++i)
        if (frf.freq[i] >= f_lo && frf.freq[i] <= f_hi) m = std::min(m, frf.coherence[i]);
    return m;
}

bool c1() {
    Criterion c(1, "motor constant");
    c.within("K_M", motor_constant(0.105, 0.094, 0.705), 0.118, 0.003);
    return c.report();
}

bool c2() {
    Criterion c(2, "effective constants");
    const auto a7 = spec_at(kRatio7), a15 = spec_at(kRatio15);
    c.within("K_Ta 7.5:1", a7.K_Ta, 0.79, 0.01);
    c.within("K_Ta 15:1", a15.K_Ta, 1.58, 0.01);
    c.within("K_Ma 7.5:1", a7.K_Ma, 0.88, 0.01);
    c.within("K_Ma 15:1", a15.K_Ma, 1.76, 0.01);
    return c.report();
}

bool c3() {
    Criterion c(3, "continuous torque");
    c.within_rel("tau_cont 7.5:1", continuous_limits(spec_at(kRatio7), 2.27).tau_cont, 4.4, 0.02);
    c.within_rel("tau_cont 15:1", continuous_limits(spec_at(kRatio15), 2.27).tau_cont, 8.8, 0.02);
    return c.report();
}

bool c4() {
    Criterion c(4, "thermal dc gains");
    const auto fan = thermal::ThermalNetwork::fan(), nofan = thermal::ThermalNetwork::nofan();
    c.within("R_th fan", thermal::dc_resistance(fan), 2.27, 0.01);
    const double adv = thermal::cooling_advantage(fan, nofan);
    c.within("cooling advantage", adv, 3.43, 0.05);
    const auto a = spec_at(kRatio7);
    const double ratio = continuous_limits(a, thermal::dc_resistance(fan)).i_cont /
                         continuous_limits(a, thermal::dc_resistance(nofan)).i_cont;
    c.within("i_cont ratio", ratio, 1.85, 0.02);
    return c.report();
}

bool c5() {
    Criterion c(5, "peak current limits");
    const auto fan = thermal::ThermalNetwork::fan();
    const double i20 = thermal::max_sustainable_current(fan, kMotor, 20.0);
    const double i2 = thermal::max_sustainable_current(fan, kMotor, 2.0);
    c.within_rel("i(20 s)", i20, 9.2, 0.15);
    c.within_rel("i(2 s)", i2, 22.0, 0.15);

    const double dt = 1e-3;
    double worst = 0.0;
    for (double i : {i20, i2}) {
        const std::vector<double> P(20000, copper_loss(kMotor, i));
        const auto exact = thermal::simulate_rise(fan, P, dt);
        const auto oracle = rk4_rise(fan, P, dt);
        for (std::size_t k = 0; k < exact.size(); ++k) worst = std::max(worst, std::abs(exact[k] - oracle[k]));
    }
    c.at_most("|exact - rk4| degC", worst, 1e-6);
    c.within("rise at i(20 s), 20 s", thermal::step_rise(fan, copper_loss(kMotor, i20), 20.0),
             kMotor.T_max - kMotor.T_ambient, 0.01);
    return c.report();
}

bool c6() {
    Criterion c(6, "mechanical sysid round trip");
    auto a = dyno::VirtualActuator::from_spec(spec_at(kRatio7));
    a.J_true = 6.37e-4;
    a.B_true = 0.01;
    SignalSpec u;
    u.kind = SignalKind::BandLimitedRandom;
    u.amplitude = 1.0;
    u.cutoff = 50.0;
    u.duration = 60.0;
    u.seed = 7;
    const double fs = 1000.0;

    const auto clean = dyno::run_random_input(a, u, fs);
    const auto fit = sysid::fit_first_order(sysid::estimate_frf(clean.series, "tau_applied", "omega"), 0.5, 40.0);
    c.within_rel("J noiseless", fit.J, a.J_true, 0.01);
    c.within_rel("B noiseless", fit.B, a.B_true, 0.01);

    a.encoder_noise_sd = 2.5e-4;
    a.torque_noise_sd = 0.005;
    const auto noisy = dyno::run_random_input(a, u, fs);
    const auto frf = sysid::estimate_frf(noisy.series, "tau_applied", "omega");
    const auto nfit = sysid::fit_first_order(frf, 0.5, 40.0);
    const auto pred = sysid::replay_first_order(nfit.J, nfit.B, noisy.series["tau_applied"], fs);
    const double v = sysid::vaf(noisy.series["omega"], pred);
    c.at_least("VAF noisy %", v, 92.0);
    c.at_most("VAF noisy %", v, 100.0);
    c.at_least("min coherence < 40 Hz", min_coherence(frf, 0.0, 40.0), 0.9);
    return c.report();
}

bool c7() {
    Criterion c(7, "thermal sysid round trip");
    auto a = dyno::VirtualActuator::from_spec(spec_at(kRatio7));
    a.temperature_noise_sd = 0.5;
    SignalSpec v;
    v.kind = SignalKind::PiecewiseConstantRandom;
    v.amplitude = 8.0;
    v.hold_duration = 20.0;
    v.duration = 3600.0;
    v.seed = 11;
    const auto d = dyno::run_thermal_random(a, v, 1.0);
    const auto fit = thermal::identify_thermal(d.series, d.series, kMotor.T_ambient);
    const auto& net = a.thermal;
    c.within_rel("R_WH", fit.network.R_WH, net.R_WH, 0.05);
    c.within_rel("R_HA", fit.network.R_HA, net.R_HA, 0.05);
    c.within_rel("C_fast", fit.network.C_fast, net.C_fast, 0.05);
    c.within_rel("C_slow", fit.network.C_slow, net.C_slow, 0.05);
    return c.report();
}

bool c8() {
    Criterion c(8, "thermistor line");
    const auto cal = thermal::ThermistorCalib::ri50();
    c.within("T(1.9906 ohm)", thermal::temperature(cal, 1.9906), 100.0, 0.1);
    c.within("T(1.4533 ohm)", thermal::temperature(cal, 1.4533), 25.0, 0.1);
    std::vector<std::pair<double, double>> line;
    for (double T = 20.0; T <= 110.0; T += 10.0) line.emplace_back(thermal::resistance(cal, T), T);
    c.within("r^2 collinear", thermal::thermistor_fit(line).r_squared, 1.0, 1e-12);
    return c.report();
}

bool c9() {
    Criterion c(9, "control metrics");
    const double fs = 2700.0, tau = 1e-3;
    std::vector<double> step(static_cast<std::size_t>(0.02 * fs));
    for (std::size_t k = 0; k < step.size(); ++k) step[k] = 1.0 - std::exp(-static_cast<double>(k) / fs / tau);
    c.within("rise time ms", 1e3 * sysid::rise_time(step, fs), 1e3 * tau * std::log(9.0), 1e3 / fs);
    std::vector<double> f;
    for (double x = 1.0; x <= 1000.0; x += 1.0) f.push_back(x);
    const auto bw = sysid::half_power_bandwidth(sysid::lowpass_frf(102.0, f));
    c.within("bandwidth Hz", bw.hz, 102.0, 1.0);
    c.holds("bandwidth closed", !bw.open_ended);
    return c.report();
}

bool c10() {
    Criterion c(10, "lifecycle analytics");
    std::vector<double> hours, maxima;
    for (int h = 0; h <= 57; ++h) {
        hours.push_back(h);
        maxima.push_back(0.056 + (0.082 - 0.056) * h / 57.0);
    }
    const auto tr = analysis::backlash_trend(maxima, hours, 2);
    c.within("endpoint rate urad/hr", 1e6 * tr.per_actuator_rate, 228.07, 0.01);
    c.holds("endpoint rate inside 250 ± 30 ± CI",
            tr.per_actuator_rate >= 220e-6 - tr.per_actuator_ci && tr.per_actuator_rate <= 280e-6 + tr.per_actuator_ci);

    auto a = dyno::VirtualActuator::from_spec(spec_at(kRatio7));
    a.J_true = 6.37e-4;
    dyno::WearModel wear;
    wear.backlash_rate = 250e-6;
    wear.efficiency.drop_fraction = 0.035;
    wear.efficiency.final_fraction = 0.02;
    const auto run = dyno::run_lifecycle(a, dyno::synthetic_gait(10.0, 500.0, 5), 57.0, wear);
    const auto rep = dyno::summarize(run);
    c.within_rel("injected rate urad/hr", 1e6 * rep.backlash.per_actuator_rate, 250.0, 0.10);
    c.within("max efficiency drop %", rep.trend.max_drop_pct, 3.5, 0.5);
    c.within("final efficiency delta %", rep.trend.final_delta_pct, -2.0, 0.5);
    return c.report();
}

bool c11() {
    Criterion c(11, "invariant suites");

    auto a = dyno::VirtualActuator::from_spec(spec_at(kRatio7));
    a.J_true = 6.37e-4;
    a.standby_power = 0.0;
    const double dt = 5e-5;
    const std::size_t n = 40000;
    dyno::Commands cmd;
    cmd.mode = dyno::LoadMode::Torque;
    cmd.current.resize(n);
    cmd.load.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        cmd.current[k] = 3.0 + 2.0 * std::sin(2.0 * std::numbers::pi * 1.3 * t);
        cmd.load[k] = -1.0 - 0.5 * std::sin(2.0 * std::numbers::pi * 0.7 * t);
    }
    const auto tr = dyno::step_sim(a, cmd, dt);
    double e_elec = 0.0, e_out = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w0 = tr.omega[k], w1 = k + 1 < n ? tr.omega[k + 1] : tr.omega_end;
        e_elec += tr.P_elec[k] * dt;
        e_out += (tr.P_joule[k] + tr.tau_shaft[k] * 0.5 * (w0 + w1) + a.B_true * 0.5 * (w0 * w0 + w1 * w1)) * dt;
    }
    e_out += 0.5 * a.J_true * tr.omega_end * tr.omega_end;
    c.at_most("energy imbalance", std::abs(e_elec - e_out) / e_elec, 1e-3);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-200.0, 200.0);
    bool symmetric = true;
    for (int i = 0; i < 10000; ++i) {
        const double pm = u(rng), pe = u(rng);
        if ((pm > 0.0) != (pe > 0.0)) continue;
        const auto r1 = analysis::efficiency({0.0, 0.0, pm, pe});
        const auto r2 = analysis::efficiency({0.0, 0.0, -pe, -pm});
        if (r1.defined != r2.defined || (r1.defined && r1.eta != r2.eta)) symmetric = false;
    }
    c.holds("quadrant inversion exact", symmetric);

    const auto net = thermal::ThermalNetwork::nofan();
    std::vector<double> p1(3000), p2(3000), ps(3000);
    std::uniform_real_distribution<double> pw(0.0, 40.0);
    for (std::size_t k = 0; k < ps.size(); ++k) {
        p1[k] = pw(rng);
        p2[k] = pw(rng);
        ps[k] = p1[k] + p2[k];
    }
    const auto r1 = thermal::simulate_rise(net, p1, 0.5), r2 = thermal::simulate_rise(net, p2, 0.5),
               rs = thermal::simulate_rise(net, ps, 0.5);
    double sup = 0.0;
    for (std::size_t k = 1; k < rs.size(); ++k) sup = std::max(sup, std::abs(rs[k] - r1[k] - r2[k]) / std::abs(rs[k]));
    c.at_most("superposition rel", sup, 1e-9);

    std::vector<double> x(500), y(500);
    std::normal_distribution<double> g(0.0, 1e3);
    for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] = g(rng);
        y[k] = g(rng) * 1e-9;
    }
    const TimeSeries ts(1000.0, 0.0, {{"x", x, "Nm"}, {"y", y, "rad/s"}});
    const auto back = parse_csv(to_csv_string(ts));
    double csv = 0.0;
    for (const char* ch : {"x", "y"})
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double ref = ts[ch][k];
            csv = std::max(csv, std::abs(back[ch][k] - ref) / std::max(std::abs(ref), 1e-300));
        }
    c.at_most("csv round trip rel", csv, 1e-12);
    return c.report();
}

} // namespace

int main() {
    bool ok = true;
    for (auto* f : {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11}) ok = f() && ok;
    return ok ? 0 : 1;
}
