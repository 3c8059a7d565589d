#include "actukit/dyno.hpp"

#include "actukit/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>

namespace actukit::dyno {

namespace {

constexpr double kTorqueEps = 1e-9;
/// Integration step ceiling for protocols, well inside the stability bound.
constexpr double kProtocolStep = 1e-4;

std::size_t substeps_for(double sample_period, double h) {
    return static_cast<std::size_t>(std::ceil(sample_period / h - 1e-9));
}

/// Rethrows the first exception captured inside an OpenMP loop.
template <class F>
void parallel_for(std::ptrdiff_t n, Exec exec, F&& body) {
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical(actukit_dyno_err)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

void add_noise(std::vector<double>& x, double sd, std::mt19937_64& rng) {
    if (sd <= 0.0) return;
    std::normal_distribution<double> n(0.0, sd);
    for (double& v : x) v += n(rng);
}

std::vector<double> decimate(const std::vector<double>& x, std::size_t stride, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = x[k * stride];
    return out;
}

/// Linear interpolation of sample-rate values onto `sub` steps per sample;
/// the final sample is held.
std::vector<double> upsample_linear(std::span<const double> x, std::size_t sub) {
    std::vector<double> out(x.size() * sub);
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double a = x[k];
        const double b = k + 1 < x.size() ? x[k + 1] : x[k];
        for (std::size_t s = 0; s < sub; ++s)
            out[k * sub + s] = a + (b - a) * static_cast<double>(s) / static_cast<double>(sub);
    }
    return out;
}

std::vector<double> upsample_hold(std::span<const double> x, std::size_t sub) {
    std::vector<double> out(x.size() * sub);
    for (std::size_t k = 0; k < x.size(); ++k)
        std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(k * sub), sub, x[k]);
    return out;
}

double next_omega(const Trajectory& tr, std::size_t k) {
    return k + 1 < tr.size() ? tr.omega[k + 1] : tr.omega_end;
}

} // namespace

void VirtualActuator::validate() const {
    if (!(J_true > 0.0)) throw DomainError("J_true must be > 0");
    if (!(B_true >= 0.0)) throw DomainError("B_true must be >= 0");
    if (!(backlash_halfwidth >= 0.0)) throw DomainError("backlash_halfwidth must be >= 0");
    if (!(current_loop_tau >= 0.0)) throw DomainError("current_loop_tau must be >= 0");
    if (!(velocity_loop_tau >= 0.0)) throw DomainError("velocity_loop_tau must be >= 0");
    if (!(flex_stiffness > 0.0)) throw DomainError("flex_stiffness must be > 0");
    if (!(efficiency_multiplier > 0.0 && efficiency_multiplier <= 1.0))
        throw DomainError("efficiency_multiplier must be in (0, 1]");
    if (!(bus_voltage > 0.0)) throw DomainError("bus_voltage must be > 0");
    if (!(max_current > 0.0)) throw DomainError("max_current must be > 0");
    if (!(standby_power >= 0.0)) throw DomainError("standby_power must be >= 0");
    for (double sd : {encoder_noise_sd, velocity_noise_sd, torque_noise_sd, current_noise_sd, temperature_noise_sd})
        if (!(sd >= 0.0)) throw DomainError("noise levels must be >= 0");
    if (!(spec.K_Ta > 0.0)) throw DomainError("actuator K_Ta must be > 0");
    spec.motor.validate();
    thermal.validate();
}

VirtualActuator VirtualActuator::from_spec(const ActuatorSpec& spec, const thermal::ThermalNetwork& net) {
    VirtualActuator a;
    a.spec = spec;
    a.J_true = spec.J_a_pred;
    a.B_true = 0.01;
    a.thermal = net;
    return a;
}

double max_step(const VirtualActuator& act, bool uses_current_loop) {
    double h = 1e-3;
    if (act.B_true > 0.0) h = std::min(h, act.J_true / act.B_true / 20.0);
    if (uses_current_loop && act.current_loop_tau > 0.0) h = std::min(h, act.current_loop_tau / 20.0);
    return h;
}

Trajectory step_sim(const VirtualActuator& act, const Commands& cmd, double dt) {
    act.validate();
    const std::size_t n = std::max(cmd.current.size(), cmd.load.size());
    if ((!cmd.current.empty() && cmd.current.size() != n) || (!cmd.load.empty() && cmd.load.size() != n))
        throw InputError("command vectors differ in length");
    const bool drive = cmd.mode == LoadMode::VelocityDrive;
    const bool uses_current =
        drive || std::any_of(cmd.current.begin(), cmd.current.end(), [](double v) { return v != 0.0; });
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    const double h = max_step(act, uses_current);
    if (dt > h * (1.0 + 1e-9))
        throw ConfigError("dt " + std::to_string(dt) + " s exceeds the stable step " + std::to_string(h) + " s");
    if (!(cmd.passive_B >= 0.0 && cmd.passive_J >= 0.0)) throw ConfigError("passive load must be >= 0");

    const double J = act.J_true + (drive ? cmd.passive_J : 0.0);
    const double B = act.B_true + (drive ? cmd.passive_B : 0.0);
    const double K = act.spec.K_Ta;
    const double m = act.efficiency_multiplier;
    const double R = act.spec.motor.R_phi;
    const double a_i = act.current_loop_tau > 0.0 ? -std::expm1(-dt / act.current_loop_tau) : 1.0;
    const double a_v = act.velocity_loop_tau > 0.0 ? -std::expm1(-dt / act.velocity_loop_tau) : 1.0;
    const auto d = thermal::discretize(act.thermal, dt);
    const double T_A = act.spec.motor.T_ambient;

    Trajectory tr;
    tr.dt = dt;
    for (auto* v : {&tr.i_cmd, &tr.i_q, &tr.tau_motor, &tr.tau_shaft, &tr.omega, &tr.theta_out, &tr.theta_in,
                    &tr.P_joule, &tr.P_elec, &tr.P_gear_loss, &tr.T_W, &tr.v_bus, &tr.i_bus})
        v->resize(n);

    double i = 0.0, w = 0.0, theta = 0.0, gap = 0.0;
    double x0 = 0.0, x1 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double load = cmd.load.empty() ? 0.0 : cmd.load[k];
        double i_cmd = cmd.current.empty() ? 0.0 : std::clamp(cmd.current[k], -act.max_current, act.max_current);
        double i_next = 0.0, tau_m = 0.0, tau_t = 0.0, w_next = 0.0, tau_shaft = 0.0;

        if (drive) {
            w_next = w + a_v * (load - w);
            tau_t = B * w_next + J * (w_next - w) / dt;
            tau_m = tau_t * w_next > 0.0 ? tau_t / m : tau_t * m;
            i_next = tau_m / K;
            i_cmd = i_next;
        } else {
            i_next = i + a_i * (i_cmd - i);
            tau_m = K * i_next;
            tau_t = tau_m * w > 0.0 ? tau_m * m : tau_m / m;
            switch (cmd.mode) {
            case LoadMode::Torque:
                w_next = (w + dt * (tau_t + load) / J) / (1.0 + dt * B / J);
                tau_shaft = -load;
                break;
            case LoadMode::Velocity:
                w_next = w + a_v * (load - w);
                tau_shaft = tau_t - B * w_next - J * (w_next - w) / dt;
                break;
            case LoadMode::Locked:
                w_next = 0.0;
                tau_shaft = tau_t;
                break;
            case LoadMode::VelocityDrive:
                break;
            }
        }

        const double wbar = 0.5 * (w + w_next);
        const double P_j = 1.5 * R * i_next * i_next;
        const double P_e = tau_m * wbar + P_j + act.standby_power;
        if (tau_shaft > kTorqueEps)
            gap = act.backlash_halfwidth;
        else if (tau_shaft < -kTorqueEps)
            gap = -act.backlash_halfwidth;

        tr.i_cmd[k] = i_cmd;
        tr.i_q[k] = i;
        tr.omega[k] = w;
        tr.theta_out[k] = theta;
        tr.theta_in[k] = theta + tau_shaft / act.flex_stiffness + gap;
        tr.tau_motor[k] = tau_m;
        tr.tau_shaft[k] = tau_shaft;
        tr.P_joule[k] = P_j;
        tr.P_elec[k] = P_e;
        tr.P_gear_loss[k] = (tau_m - tau_t) * wbar;
        tr.T_W[k] = T_A + d.C[0] * x0 + d.C[1] * x1;
        tr.v_bus[k] = act.bus_voltage;
        tr.i_bus[k] = P_e / act.bus_voltage;

        const double y0 = d.Phi[0] * x0 + d.Phi[1] * x1 + d.Gamma[0] * P_j;
        const double y1 = d.Phi[2] * x0 + d.Phi[3] * x1 + d.Gamma[1] * P_j;
        x0 = y0;
        x1 = y1;
        theta += wbar * dt;
        w = w_next;
        i = i_next;
    }
    tr.omega_end = w;
    return tr;
}

DynoDataset run_random_input(const VirtualActuator& act, const SignalSpec& signal, double fs) {
    if (signal.kind == SignalKind::BandLimitedRandom && !(signal.cutoff < fs / 2.0))
        throw ConfigError("signal cutoff must be below fs/2");
    const double h = std::min(max_step(act, false), kProtocolStep);
    const std::size_t sub = substeps_for(1.0 / fs, h);
    const double fs_sim = fs * static_cast<double>(sub);
    // The torque is synthesized at the integration rate so the recorded
    // samples are exact samples of the applied input.
    SignalSpec fine_spec = signal;
    fine_spec.duration = static_cast<double>(std::llround(signal.duration * fs)) / fs;
    const TimeSeries u = generate(fine_spec, fs_sim);
    const auto& fine = u[signal.channel];
    const std::size_t n = fine.size() / sub;
    if (n == 0) throw ConfigError("signal shorter than one sample");

    Commands c;
    c.mode = LoadMode::Torque;
    c.load.resize(n * sub);
    for (std::size_t k = 0; k < n * sub; ++k)
        c.load[k] = k + 1 < fine.size() ? 0.5 * (fine[k] + fine[k + 1]) : fine[k];
    const Trajectory tr = step_sim(act, c, 1.0 / fs_sim);
    const auto tau = decimate(fine, sub, n);

    std::mt19937_64 rng(derive_seed(signal.seed, 1));
    auto applied = tau;
    auto i_q = decimate(tr.i_q, sub, n);
    auto omega = decimate(tr.omega, sub, n);
    auto th_in = decimate(tr.theta_in, sub, n);
    auto th_out = decimate(tr.theta_out, sub, n);
    auto T_W = decimate(tr.T_W, sub, n);
    add_noise(applied, act.torque_noise_sd, rng);
    add_noise(i_q, act.current_noise_sd, rng);
    add_noise(omega, act.velocity_noise_sd, rng);
    add_noise(th_in, act.encoder_noise_sd, rng);
    // Speed comes from differencing the output encoder, so its noise does too.
    std::vector<double> enc(n, 0.0);
    add_noise(enc, act.encoder_noise_sd, rng);
    for (std::size_t k = 0; k < n; ++k) {
        th_out[k] += enc[k];
        omega[k] += (enc[k] - (k > 0 ? enc[k - 1] : 0.0)) * fs;
    }
    add_noise(T_W, act.temperature_noise_sd, rng);

    std::vector<Channel> ch{{"tau_cmd", tau, "Nm"},
                            {"tau_applied", std::move(applied), "Nm"},
                            {"i_q", std::move(i_q), "A"},
                            {"omega", std::move(omega), "rad/s"},
                            {"theta_in", std::move(th_in), "rad"},
                            {"theta_out", std::move(th_out), "rad"},
                            {"v_bus", decimate(tr.v_bus, sub, n), "V"},
                            {"i_bus", decimate(tr.i_bus, sub, n), "A"},
                            {"T_W", std::move(T_W), "degC"}};
    Meta meta = u.meta();
    meta["protocol"] = "random-input";
    meta["sim_rate"] = std::to_string(fs_sim);
    return {TimeSeries(fs, 0.0, std::move(ch), std::move(meta)), "random-input", signal.seed};
}

DynoDataset run_thermal_random(const VirtualActuator& act, const SignalSpec& voltage, double fs,
                               const thermal::ThermistorCalib& calib) {
    act.validate();
    const TimeSeries u = generate(voltage, fs);
    const auto& v = u[voltage.channel];
    const std::size_t n = v.size();
    const auto d = thermal::discretize(act.thermal, 1.0 / fs);
    const double T_A = act.spec.motor.T_ambient;

    std::vector<double> V(n), I(n), P(n), R(n), T(n);
    double x0 = 0.0, x1 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        T[k] = T_A + d.C[0] * x0 + d.C[1] * x1;
        R[k] = thermal::resistance(calib, T[k]);
        if (!(R[k] > 0.0)) throw DomainError("thermistor line gives non-positive resistance");
        V[k] = std::abs(v[k]);
        I[k] = V[k] / R[k];
        P[k] = V[k] * I[k];
        const double y0 = d.Phi[0] * x0 + d.Phi[1] * x1 + d.Gamma[0] * P[k];
        const double y1 = d.Phi[2] * x0 + d.Phi[3] * x1 + d.Gamma[1] * P[k];
        x0 = y0;
        x1 = y1;
    }
    std::mt19937_64 rng(derive_seed(voltage.seed, 2));
    add_noise(T, act.temperature_noise_sd, rng);

    std::vector<Channel> ch{{"V", std::move(V), "V"},
                            {"i_bus", std::move(I), "A"},
                            {"P", std::move(P), "W"},
                            {"R_ll", std::move(R), "ohm"},
                            {"T_W", std::move(T), "degC"}};
    Meta meta = u.meta();
    meta["protocol"] = "thermal-random";
    meta["T_ambient"] = std::to_string(T_A);
    return {TimeSeries(fs, 0.0, std::move(ch), std::move(meta)), "thermal-random", voltage.seed};
}

ConditionResult run_efficiency_condition(const VirtualActuator& act, double tau_cmd, double omega_cmd,
                                         const EfficiencyProtocol& p) {
    act.validate();
    if (std::abs(omega_cmd) > act.spec.max_speed)
        throw DomainError("commanded speed exceeds the actuator's max speed");
    if (!(p.ramp > 0.0 && p.delay >= 0.0 && p.hold > 0.0 && p.trim >= 0.0 && p.trim < 0.5))
        throw ConfigError("invalid efficiency protocol timing");

    ConditionResult out;
    out.tau_cmd = tau_cmd;
    out.omega_cmd = omega_cmd;
    const double i_req = tau_cmd / act.spec.K_Ta;
    if (std::abs(i_req) > act.max_current) {
        out.feasible = false;
        return out;
    }

    const double dt = std::min(max_step(act, true), kProtocolStep);
    const double t1 = p.ramp, t2 = t1 + p.delay, t3 = t2 + p.ramp, t4 = t3 + p.hold;
    const double t5 = t4 + p.ramp, t6 = t5 + p.delay, t7 = t6 + p.ramp;
    const auto n = static_cast<std::size_t>(std::ceil(t7 / dt));

    Commands c;
    c.mode = LoadMode::Velocity;
    c.current.resize(n);
    c.load.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        double ws = 0.0, ts = 0.0;
        if (t < t1) ws = t / t1;
        else if (t < t6) ws = 1.0;
        else if (t < t7) ws = (t7 - t) / p.ramp;
        if (t >= t2 && t < t3) ts = (t - t2) / p.ramp;
        else if (t >= t3 && t < t4) ts = 1.0;
        else if (t >= t4 && t < t5) ts = (t5 - t) / p.ramp;
        c.load[k] = ws * omega_cmd;
        c.current[k] = ts * i_req;
    }
    const Trajectory tr = step_sim(act, c, dt);

    const double m = act.efficiency_multiplier;
    const double w0 = t3 + p.trim * p.hold, w1 = t4 - p.trim * p.hold;
    double s_tau = 0.0, s_w = 0.0, s_pm = 0.0, s_pe = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (t < w0 || t >= w1) continue;
        const double wbar = 0.5 * (tr.omega[k] + next_omega(tr, k));
        double tau = tr.tau_shaft[k];
        if (p.torque_source == TorqueSource::CurrentMedian) {
            const double load_side = tau * wbar > 0.0 ? tau * m : tau / m;
            std::vector<double> est{tr.tau_motor[k]};
            for (int u = 1; u < p.units_in_series; ++u) est.push_back(load_side);
            tau = analysis::median_combine(est);
        }
        s_tau += tau;
        s_w += wbar;
        s_pm += tau * wbar;
        s_pe += tr.P_elec[k];
        ++count;
    }
    if (count == 0) throw ConfigError("averaging window holds no samples");
    const double inv = 1.0 / static_cast<double>(count);
    out.record = analysis::efficiency({s_tau * inv, s_w * inv, s_pm * inv, s_pe * inv});
    return out;
}

std::vector<std::pair<double, double>> sweep_conditions(const VirtualActuator& act, const SweepGrid& g) {
    if (g.count == 0) throw ConfigError("sweep needs at least one condition");
    double tl = g.torque_limit;
    if (tl <= 0.0) tl = continuous_limits(act.spec, thermal::dc_resistance(act.thermal)).tau_cont;
    double wl = g.speed_limit;
    if (wl <= 0.0) wl = std::isfinite(act.spec.max_speed) ? act.spec.max_speed : 20.0;
    wl = std::min(wl, act.spec.max_speed);

    const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(g.count))));
    const auto level = [&](std::size_t i, double lim) {
        return side == 1 ? 0.0 : -lim + 2.0 * lim * static_cast<double>(i) / static_cast<double>(side - 1);
    };
    const std::size_t total = side * side;
    std::vector<std::pair<double, double>> out;
    out.reserve(g.count);
    for (std::size_t k = 0; k < g.count; ++k) {
        const std::size_t idx = k * total / g.count;
        out.emplace_back(level(idx / side, tl), level(idx % side, wl));
    }
    return out;
}

std::vector<ConditionResult> run_efficiency_sweep(const VirtualActuator& act, const SweepGrid& g,
                                                  const EfficiencyProtocol& p, Exec exec) {
    const auto conds = sweep_conditions(act, g);
    std::vector<ConditionResult> out(conds.size());
    parallel_for(static_cast<std::ptrdiff_t>(conds.size()), exec, [&](std::ptrdiff_t i) {
        const auto& [tau, w] = conds[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = run_efficiency_condition(act, tau, w, p);
    });
    return out;
}

std::vector<std::vector<TimeSeries>> run_step_response(const VirtualActuator& act, std::span<const double> amplitudes,
                                                       int trials, double fs, const StepProtocol& p) {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (!(fs > 0.0) || !(p.duration > 0.0) || !(p.step_time >= 0.0 && p.step_time < p.duration))
        throw ConfigError("invalid step protocol timing");
    const auto n = static_cast<std::size_t>(std::llround(p.duration * fs));
    const auto k0 = static_cast<std::size_t>(std::llround(p.step_time * fs));
    const std::size_t sub = substeps_for(1.0 / fs, std::min(max_step(act, true), kProtocolStep));
    const double dt = 1.0 / (fs * static_cast<double>(sub));

    std::vector<std::vector<TimeSeries>> out;
    for (std::size_t a = 0; a < amplitudes.size(); ++a) {
        const double A = amplitudes[a];
        if (!(A > 0.0)) throw DomainError("step amplitudes must be > 0");
        std::vector<double> cmd(n, 0.0);
        std::fill(cmd.begin() + static_cast<std::ptrdiff_t>(k0), cmd.end(), A);
        Commands c;
        c.mode = LoadMode::Locked;
        c.current = upsample_hold(cmd, sub);
        const Trajectory tr = step_sim(act, c, dt);
        const auto clean = decimate(tr.i_q, sub, n);

        std::vector<TimeSeries> set;
        for (int t = 0; t < trials; ++t) {
            std::mt19937_64 rng(derive_seed(p.seed, a * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)));
            auto i_q = clean;
            add_noise(i_q, act.current_noise_sd, rng);
            Meta meta{{"protocol", "step-response"},
                      {"amplitude", std::to_string(A)},
                      {"trial", std::to_string(t)},
                      {"seed", std::to_string(p.seed)}};
            set.emplace_back(fs, 0.0, std::vector<Channel>{{"i_cmd", cmd, "A"}, {"i_q", std::move(i_q), "A"}},
                             std::move(meta));
        }
        out.push_back(std::move(set));
    }
    return out;
}

DynoDataset run_current_random_input(const VirtualActuator& act, const SignalSpec& command, double fs) {
    if (command.kind == SignalKind::BandLimitedRandom && !(command.cutoff < fs / 2.0))
        throw ConfigError("signal cutoff must be below fs/2");
    const TimeSeries u = generate(command, fs);
    const auto& cmd = u[command.channel];
    const std::size_t n = cmd.size();
    const std::size_t sub = substeps_for(1.0 / fs, std::min(max_step(act, true), kProtocolStep));
    Commands c;
    c.mode = LoadMode::Locked;
    c.current = upsample_hold(cmd, sub);
    const Trajectory tr = step_sim(act, c, 1.0 / (fs * static_cast<double>(sub)));
    auto i_q = decimate(tr.i_q, sub, n);
    std::mt19937_64 rng(derive_seed(command.seed, 3));
    add_noise(i_q, act.current_noise_sd, rng);
    Meta meta = u.meta();
    meta["protocol"] = "current-random-input";
    return {TimeSeries(fs, 0.0, {{"i_cmd", cmd, "A"}, {"i_q", std::move(i_q), "A"}}, std::move(meta)),
            "current-random-input", command.seed};
}

double EfficiencyWear::multiplier(double h) const noexcept {
    double drop = 0.0;
    if (h <= recover_start)
        drop = drop_hours > 0.0 ? drop_fraction * std::min(h / drop_hours, 1.0) : drop_fraction;
    else if (h < recover_end)
        drop = drop_fraction + (final_fraction - drop_fraction) * (h - recover_start) / (recover_end - recover_start);
    else
        drop = final_fraction;
    return 1.0 - drop;
}

namespace {

VirtualActuator worn(const VirtualActuator& act, const WearModel& wear, double h) {
    VirtualActuator a = act;
    a.backlash_halfwidth = act.backlash_halfwidth + wear.backlash_rate * h;
    a.efficiency_multiplier = act.efficiency_multiplier * wear.efficiency.multiplier(h);
    return a;
}

analysis::DampingSample damping_run(const VirtualActuator& a, double speed) {
    const double ramp = 0.1, hold = 0.6, avg = 0.3;
    const double dt = std::min(max_step(a, true), kProtocolStep);
    const auto n = static_cast<std::size_t>(std::ceil((ramp + hold) / dt));
    Commands c;
    c.mode = LoadMode::VelocityDrive;
    c.passive_B = a.B_true;
    c.passive_J = a.J_true;
    c.load.resize(n);
    for (std::size_t k = 0; k < n; ++k) c.load[k] = speed * std::min(static_cast<double>(k) * dt / ramp, 1.0);
    const Trajectory tr = step_sim(a, c, dt);
    double s_tau = 0.0, s_w = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (static_cast<double>(k) * dt < ramp + hold - avg) continue;
        s_tau += analysis::torque_from_current(tr.i_q[k], a.spec);
        s_w += tr.omega[k];
        ++count;
    }
    return {speed, analysis::damping_test(s_tau / static_cast<double>(count), s_w / static_cast<double>(count))};
}

} // namespace

LifecycleRun run_lifecycle(const VirtualActuator& act, const TimeSeries& gait, double hours, const WearModel& wear,
                           const LifecycleSettings& s) {
    act.validate();
    if (!(hours > 0.0)) throw DomainError("hours must be > 0");
    if (!gait.has("tau") || !gait.has("omega")) throw InputError("gait needs 'tau' and 'omega' channels");
    if (!(s.interval_minutes > 0.0) || !(s.gait_seconds_per_hour > 0.0) || s.actuators_in_series < 1)
        throw ConfigError("invalid lifecycle settings");

    LifecycleRun run;
    const double step_h = s.interval_minutes / 60.0;
    for (double t = 0.0; t < hours - 1e-12; t = static_cast<double>(run.intervals.size()) * step_h) {
        IntervalReport r;
        r.hours = t;
        run.intervals.push_back(r);
    }
    const auto n_hours = static_cast<std::size_t>(std::ceil(hours - 1e-12));
    run.hourly_hours.resize(n_hours);
    run.hourly_max_discrepancy.resize(n_hours);

    EfficiencyProtocol ep;
    ep.torque_source = TorqueSource::CurrentMedian;
    ep.units_in_series = s.actuators_in_series;

    // Gait window replayed each simulated hour, at the gait's own rate.
    const auto& g_tau = gait["tau"];
    const auto& g_w = gait["omega"];
    const auto n_gait = static_cast<std::size_t>(std::llround(s.gait_seconds_per_hour * gait.fs()));
    std::vector<double> seg_tau(n_gait), seg_w(n_gait);
    for (std::size_t k = 0; k < n_gait; ++k) {
        seg_tau[k] = g_tau[k % g_tau.size()];
        seg_w[k] = g_w[k % g_w.size()];
    }

    const std::size_t n_int = run.intervals.size();
    const std::size_t n_cond = s.interval_torques.size() * s.interval_speeds.size();
    parallel_for(static_cast<std::ptrdiff_t>(n_int + n_hours), s.exec, [&](std::ptrdiff_t job) {
        const auto j = static_cast<std::size_t>(job);
        if (j < n_int) {
            IntervalReport& r = run.intervals[j];
            const VirtualActuator a = worn(act, wear, r.hours);
            r.backlash_halfwidth = a.backlash_halfwidth;
            r.efficiency_multiplier = a.efficiency_multiplier;
            r.efficiency.reserve(n_cond);
            for (double tau : s.interval_torques)
                for (double w : s.interval_speeds) r.efficiency.push_back(run_efficiency_condition(a, tau, w, ep).record);
            for (double w : s.damping_speeds) r.damping.push_back(damping_run(a, w));
            return;
        }
        const std::size_t h = j - n_int;
        const double mid = std::min(static_cast<double>(h) + 0.5, 0.5 * (static_cast<double>(h) + hours));
        const VirtualActuator a = worn(act, wear, mid);
        const std::size_t sub = substeps_for(1.0 / gait.fs(), std::min(max_step(a, true), kProtocolStep));
        Commands c;
        c.mode = LoadMode::Velocity;
        c.load = upsample_linear(seg_w, sub);
        std::vector<double> i_cmd(n_gait);
        for (std::size_t k = 0; k < n_gait; ++k) i_cmd[k] = seg_tau[k] / a.spec.K_Ta;
        c.current = upsample_linear(i_cmd, sub);
        const Trajectory tr = step_sim(a, c, 1.0 / (gait.fs() * static_cast<double>(sub)));
        double worst = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) worst = std::max(worst, std::abs(tr.theta_in[k] - tr.theta_out[k]));
        run.hourly_hours[h] = mid;
        run.hourly_max_discrepancy[h] = worst * static_cast<double>(s.actuators_in_series);
    });

    run.final_backlash_growth = wear.backlash_rate * hours;
    return run;
}

analysis::LifecycleReport summarize(const LifecycleRun& run, int actuators_in_series) {
    std::vector<double> hours;
    std::vector<std::vector<analysis::EfficiencyRecord>> recs;
    std::vector<std::vector<analysis::DampingSample>> damp;
    for (const auto& r : run.intervals) {
        hours.push_back(r.hours);
        recs.push_back(r.efficiency);
        damp.push_back(r.damping);
    }
    return analysis::lifecycle_report(hours, recs, damp, run.hourly_hours, run.hourly_max_discrepancy,
                                      actuators_in_series);
}

TimeSeries synthetic_gait(double duration, double fs, std::uint64_t seed, double peak_torque, double peak_speed,
                          double stride_hz) {
    if (!(duration > 0.0 && fs > 0.0 && stride_hz > 0.0)) throw ConfigError("invalid gait parameters");
    const auto n = static_cast<std::size_t>(std::llround(duration * fs));
    if (n == 0) throw ConfigError("gait shorter than one sample");
    const auto strides = static_cast<std::size_t>(std::ceil(duration * stride_hz)) + 1;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, 0.03);
    std::vector<double> amp(strides);
    for (double& a : amp) a = std::clamp(1.0 + jitter(rng), 0.94, 1.06);

    constexpr double duty = 0.6;
    constexpr double pi = std::numbers::pi;
    std::vector<double> tau(n), w(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double cyc = static_cast<double>(k) / fs * stride_hz;
        const auto s = static_cast<std::size_t>(cyc);
        const double ph = cyc - static_cast<double>(s);
        const double a = amp[s];
        tau[k] = ph < duty ? a * peak_torque * std::sin(pi * ph / duty)
                           : -0.15 * a * peak_torque * std::sin(pi * (ph - duty) / (1.0 - duty));
        w[k] = a * peak_speed * (0.85 * std::sin(2.0 * pi * ph) + 0.15 * std::sin(4.0 * pi * ph));
    }
    Meta meta{{"generator", "synthetic-gait"}, {"seed", std::to_string(seed)}};
    return TimeSeries(fs, 0.0, {{"tau", std::move(tau), "Nm"}, {"omega", std::move(w), "rad/s"}}, std::move(meta));
}

} // namespace actukit::dyno
