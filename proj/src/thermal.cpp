#include "actukit/thermal.hpp"

#include "actukit/error.hpp"
#include "actukit/sysid.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace actukit::thermal {

std::string_view to_string(NetworkLabel l) noexcept {
    switch (l) {
    case NetworkLabel::Fan: return "Fan";
    case NetworkLabel::NoFan: return "NoFan";
    case NetworkLabel::Custom: return "Custom";
    }
    return "Custom";
}

NetworkLabel network_label_from_string(std::string_view s) {
    if (s == "Fan") return NetworkLabel::Fan;
    if (s == "NoFan") return NetworkLabel::NoFan;
    if (s == "Custom") return NetworkLabel::Custom;
    throw ConfigError("unknown thermal label '" + std::string(s) + "'");
}

void ThermalNetwork::validate() const {
    for (auto [v, name] : {std::pair{R_WH, "R_WH"}, std::pair{R_HA, "R_HA"}, std::pair{C_fast, "C_fast"},
                           std::pair{C_slow, "C_slow"}})
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive");
}

ThermalNetwork ThermalNetwork::fan() { return {0.828, 1.44, 15.9, 146.0, NetworkLabel::Fan}; }
ThermalNetwork ThermalNetwork::nofan() { return {1.09, 6.68, 18.4, 138.0, NetworkLabel::NoFan}; }

double dc_resistance(const ThermalNetwork& net) noexcept { return net.R_WH + net.R_HA; }

std::complex<double> impedance(const ThermalNetwork& net, double f) {
    const std::complex<double> s(0.0, 2.0 * std::numbers::pi * f);
    const auto num = net.R_HA + net.R_WH + net.C_slow * net.R_HA * net.R_WH * s;
    const auto den = (net.C_slow * net.R_HA * s + 1.0) * (net.C_fast * net.R_WH * s + 1.0);
    return num / den;
}

Discretization discretize(const ThermalNetwork& net, double dt) {
    net.validate();
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    const double tau_slow = net.C_slow * net.R_HA;
    const double tau_fast = net.C_fast * net.R_WH;
    const double a2 = tau_slow * tau_fast;
    const double a1 = tau_slow + tau_fast;

    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    M(0, 1) = 1.0;
    M(1, 0) = -1.0 / a2;
    M(1, 1) = -a1 / a2;
    M(1, 2) = 1.0 / a2;
    const Eigen::Matrix3d E = (M * dt).exp();

    Discretization d;
    d.Phi = {E(0, 0), E(0, 1), E(1, 0), E(1, 1)};
    d.Gamma = {E(0, 2), E(1, 2)};
    d.C = {net.R_WH + net.R_HA, net.C_slow * net.R_HA * net.R_WH};
    return d;
}

double step_rise(const ThermalNetwork& net, double power, double t) {
    if (t <= 0.0) return 0.0;
    const auto d = discretize(net, t);
    return power * (d.C[0] * d.Gamma[0] + d.C[1] * d.Gamma[1]);
}

std::vector<double> simulate_rise(const ThermalNetwork& net, std::span<const double> power, double dt) {
    const auto d = discretize(net, dt);
    std::vector<double> rise(power.size());
    double x0 = 0.0, x1 = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k) {
        rise[k] = d.C[0] * x0 + d.C[1] * x1;
        const double n0 = d.Phi[0] * x0 + d.Phi[1] * x1 + d.Gamma[0] * power[k];
        const double n1 = d.Phi[2] * x0 + d.Phi[3] * x1 + d.Gamma[1] * power[k];
        x0 = n0;
        x1 = n1;
    }
    return rise;
}

TimeSeries simulate(const ThermalNetwork& net, const TimeSeries& power, double T_A, const std::string& channel) {
    const auto& p = power[channel];
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] < 0.0) throw InputError("negative power sample at index " + std::to_string(i));
    auto rise = simulate_rise(net, p, power.dt());
    for (auto& v : rise) v += T_A;
    return TimeSeries(power.fs(), power.t0(), {Channel{"T_W", std::move(rise), "degC"}}, power.meta());
}

namespace {

ThermalNetwork from_log(std::span<const double> p) {
    return {std::pow(10.0, p[0]), std::pow(10.0, p[1]), std::pow(10.0, p[2]), std::pow(10.0, p[3]),
            NetworkLabel::Custom};
}

} // namespace

ThermalFit identify_thermal(std::span<const double> power, std::span<const double> T_W, double fs, double T_A,
                            const ThermalFitSettings& s) {
    if (power.size() != T_W.size()) throw AlignmentError("power and temperature lengths differ");
    if (!(fs > 0.0)) throw InputError("sample rate must be positive");
    const double dt = 1.0 / fs;
    if (static_cast<double>(power.size()) * dt < s.min_duration)
        throw InputError("thermal identification needs at least " + std::to_string(s.min_duration) + " s of data");
    const auto [pmin, pmax] = std::minmax_element(power.begin(), power.end());
    if (*pmin < 0.0) throw InputError("negative power sample");
    if (!(*pmax - *pmin > 1e-12 * std::max(1.0, std::abs(*pmax))))
        throw FitError("insufficient excitation: power input never changes, poles are unidentifiable");

    std::vector<double> rise(T_W.size());
    for (std::size_t i = 0; i < rise.size(); ++i) rise[i] = T_W[i] - T_A;

    const double lr0 = std::log10(s.R_min), lr1 = std::log10(s.R_max);
    const double lc0 = std::log10(s.C_min), lc1 = std::log10(s.C_max);
    const double lower[4] = {lr0, lr0, lc0, lc0};
    const double upper[4] = {lr1, lr1, lc1, lc1};

    const auto sse = [&](std::span<const double> p) {
        for (std::size_t i = 0; i < 4; ++i)
            if (!(p[i] >= lower[i] && p[i] <= upper[i])) return std::numeric_limits<double>::infinity();
        const auto net = from_log(p);
        const auto d = discretize(net, dt);
        double x0 = 0.0, x1 = 0.0, acc = 0.0;
        for (std::size_t k = 0; k < power.size(); ++k) {
            const double e = d.C[0] * x0 + d.C[1] * x1 - rise[k];
            acc += e * e;
            const double n0 = d.Phi[0] * x0 + d.Phi[1] * x1 + d.Gamma[0] * power[k];
            const double n1 = d.Phi[2] * x0 + d.Phi[3] * x1 + d.Gamma[1] * power[k];
            x0 = n0;
            x1 = n1;
        }
        return acc;
    };

    opt::TwoStageSettings ts;
    ts.grid_points = s.grid_points;
    ts.starts = s.starts;
    ts.simplex = s.simplex;
    ts.exec = s.exec;
    const auto r = opt::two_stage_minimize(sse, lower, upper, ts);
    const double n = static_cast<double>(rise.size());
    if (!r.converged)
        throw FitError("thermal fit did not converge after " + std::to_string(r.iterations) +
                           " iterations; rms residual " + std::to_string(std::sqrt(r.f / n)) + " degC",
                       std::sqrt(r.f / n));

    ThermalFit fit;
    fit.network = from_log(r.x);
    fit.iterations = r.iterations;
    fit.rms_residual = std::sqrt(r.f / n);
    const auto pred = simulate_rise(fit.network, power, dt);
    fit.vaf = sysid::vaf(rise, pred);

    // Linearized 2σ intervals from the residual Jacobian in log10 coordinates.
    const double h = 1e-5;
    Eigen::MatrixXd Jac(rise.size(), 4);
    for (int j = 0; j < 4; ++j) {
        auto pp = r.x, pm = r.x;
        pp[static_cast<std::size_t>(j)] += h;
        pm[static_cast<std::size_t>(j)] -= h;
        const auto yp = simulate_rise(from_log(pp), power, dt);
        const auto ym = simulate_rise(from_log(pm), power, dt);
        for (std::size_t i = 0; i < rise.size(); ++i) Jac(static_cast<Eigen::Index>(i), j) = (yp[i] - ym[i]) / (2 * h);
    }
    const double sigma2 = r.f / std::max(1.0, n - 4.0);
    const Eigen::Matrix4d JtJ = Jac.transpose() * Jac;
    Eigen::FullPivLU<Eigen::Matrix4d> lu(JtJ);
    const double vals[4] = {fit.network.R_WH, fit.network.R_HA, fit.network.C_fast, fit.network.C_slow};
    if (!lu.isInvertible()) {
        fit.ci.fill(std::numeric_limits<double>::infinity());
        fit.wide_ci = true;
    } else {
        const Eigen::Matrix4d cov = lu.inverse() * sigma2;
        for (int j = 0; j < 4; ++j) {
            const double sd_log = std::sqrt(std::max(0.0, cov(j, j)));
            fit.ci[static_cast<std::size_t>(j)] = 2.0 * sd_log * std::numbers::ln10 * vals[j];
            if (fit.ci[static_cast<std::size_t>(j)] > s.wide_ci_fraction * vals[j]) fit.wide_ci = true;
        }
    }
    return fit;
}

ThermalFit identify_thermal(const TimeSeries& power, const TimeSeries& T_W, double T_A, const ThermalFitSettings& s,
                            const std::string& power_channel, const std::string& temp_channel) {
    if (power.fs() != T_W.fs()) throw AlignmentError("power and temperature sample rates differ");
    return identify_thermal(power[power_channel], T_W[temp_channel], power.fs(), T_A, s);
}

ThermistorCalib ThermistorCalib::ri50() { return {139.564, -177.826, 0.99}; }

ThermistorCalib thermistor_fit(std::span<const std::pair<double, double>> samples) {
    if (samples.size() < 2) throw FitError("thermistor fit needs at least two samples");
    const double n = static_cast<double>(samples.size());
    double mr = 0.0, mt = 0.0;
    for (const auto& [r, t] : samples) {
        mr += r;
        mt += t;
    }
    mr /= n;
    mt /= n;
    double srr = 0.0, srt = 0.0, stt = 0.0;
    for (const auto& [r, t] : samples) {
        srr += (r - mr) * (r - mr);
        srt += (r - mr) * (t - mt);
        stt += (t - mt) * (t - mt);
    }
    if (!(srr > 0.0)) throw FitError("thermistor fit needs at least two distinct resistances");
    ThermistorCalib c;
    c.slope = srt / srr;
    c.intercept = mt - c.slope * mr;
    double ssr = 0.0;
    for (const auto& [r, t] : samples) {
        const double e = t - (c.slope * r + c.intercept);
        ssr += e * e;
    }
    c.r_squared = stt > 0.0 ? std::max(0.0, 1.0 - ssr / stt) : 1.0;
    return c;
}

double temperature(const ThermistorCalib& c, double R_ll) noexcept { return c.slope * R_ll + c.intercept; }

double resistance(const ThermistorCalib& c, double T) noexcept { return (T - c.intercept) / c.slope; }

double resistance_from_vi(double V, double i_bus) {
    if (i_bus == 0.0) throw DomainError("bus current is zero; resistance undefined");
    return V / i_bus;
}

double max_sustainable_current(const ThermalNetwork& net, const MotorParams& motor, double duration) {
    if (!(duration > 0.0)) throw DomainError("duration must be positive");
    const double budget = motor.T_max - motor.T_ambient;
    const double per_watt = step_rise(net, 1.0, duration);
    const auto rise_at = [&](double i) { return copper_loss(motor, i) * per_watt; };
    double lo = 0.0, hi = 1.0;
    while (rise_at(hi) < budget) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e9) throw DomainError("no finite current reaches the temperature limit");
    }
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        (rise_at(mid) < budget ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double peak_duration(const ThermalNetwork& net, const MotorParams& motor, double i_q) {
    if (!(i_q > 0.0)) throw DomainError("current must be positive");
    const double budget = motor.T_max - motor.T_ambient;
    const double p = copper_loss(motor, i_q);
    if (p * dc_resistance(net) <= budget) return std::numeric_limits<double>::infinity();
    // The step response of this network rises monotonically.
    double lo = 0.0, hi = 1.0;
    while (step_rise(net, p, hi) < budget) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        (step_rise(net, p, mid) < budget ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<LimitPoint> limit_curve(const ThermalNetwork& net, const MotorParams& motor,
                                    std::span<const double> currents, Exec exec) {
    net.validate();
    for (double c : currents)
        if (!(c > 0.0)) throw DomainError("limit curve currents must be positive");
    std::vector<LimitPoint> out(currents.size());
    const auto n = static_cast<std::ptrdiff_t>(currents.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double c = currents[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = {c, peak_duration(net, motor, c)};
    }
    return out;
}

double cooling_advantage(const ThermalNetwork& fan, const ThermalNetwork& nofan) {
    fan.validate();
    nofan.validate();
    return dc_resistance(nofan) / dc_resistance(fan);
}

} // namespace actukit::thermal
