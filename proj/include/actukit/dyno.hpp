#pragma once

#include "actukit/analysis.hpp"
#include "actukit/core.hpp"
#include "actukit/kernels.hpp"
#include "actukit/signals.hpp"
#include "actukit/thermal.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

/// Virtual dynamometer: a coupled electrical/mechanical/thermal actuator
/// model and the bench protocols that exercise it. Every run owns its state;
/// datasets are deterministic for a given seed.
namespace actukit::dyno {

struct VirtualActuator {
    ActuatorSpec spec;
    double J_true = 0.0; ///< output inertia incl. gears [kg·m²]
    double B_true = 0.0; ///< viscous damping [Nms/rad]
    thermal::ThermalNetwork thermal;
    double backlash_halfwidth = 0.0; ///< [rad]
    double current_loop_tau = 1.2e-3; ///< first-order current tracking lag [s]
    double encoder_noise_sd = 0.0;    ///< [rad], both encoders; the speed channel differences the output one
    double velocity_noise_sd = 0.0;   ///< extra white speed noise [rad/s]
    double torque_noise_sd = 0.0;     ///< [Nm], in-line transducer
    double current_noise_sd = 0.0;    ///< [A], driver current measurement
    double temperature_noise_sd = 0.0; ///< [°C]
    double flex_stiffness = 200.0;    ///< series torsional stiffness [Nm/rad]
    double velocity_loop_tau = 0.05;  ///< loading actuator speed tracking lag [s]
    double standby_power = 1.0;       ///< drive electronics overhead [W]
    double bus_voltage = 24.0;        ///< [V]
    double max_current = 30.0;        ///< driver limit [A]
    double efficiency_multiplier = 1.0; ///< transmission wear factor in (0, 1]

    void validate() const;

    /// Rotor-only inertia from the spec, B = 0.01 Nms/rad, fan cooling.
    static VirtualActuator from_spec(const ActuatorSpec& spec,
                                     const thermal::ThermalNetwork& net = thermal::ThermalNetwork::fan());
};

/// How the dynamometer side constrains the output shaft.
enum class LoadMode {
    Torque,        ///< dyno applies `load` [Nm]; speed is free
    Velocity,      ///< loading actuator tracks `load` [rad/s] with velocity_loop_tau lag
    Locked,        ///< output held still
    VelocityDrive, ///< the actuator itself tracks `load` [rad/s]; dyno side passive
};

struct Commands {
    LoadMode mode = LoadMode::Locked;
    std::vector<double> current; ///< i_q command per step [A]; unused in VelocityDrive
    std::vector<double> load;    ///< per step, meaning set by mode; may be empty
    double passive_B = 0.0;      ///< VelocityDrive: extra damping of an idle load
    double passive_J = 0.0;      ///< VelocityDrive: extra inertia of an idle load
};

/// Sample k holds the state at t = k·dt and the powers averaged over the
/// step [t_k, t_k+dt).
struct Trajectory {
    double dt = 0.0;
    std::vector<double> i_cmd, i_q;
    std::vector<double> tau_motor;  ///< K_Ta·i_q over the step [Nm]
    std::vector<double> tau_shaft;  ///< delivered by the actuator to the dyno [Nm]
    std::vector<double> omega;      ///< [rad/s]
    std::vector<double> theta_out;  ///< output encoder [rad]
    std::vector<double> theta_in;   ///< motor encoder referred to the output [rad]
    std::vector<double> P_joule, P_elec, P_gear_loss; ///< [W]
    std::vector<double> T_W;        ///< [°C]
    std::vector<double> v_bus, i_bus;
    double omega_end = 0.0;         ///< speed after the final step

    std::size_t size() const noexcept { return omega.size(); }
};

/// Largest admissible step for an actuator in a given mode.
double max_step(const VirtualActuator& act, bool uses_current_loop);

/// Semi-implicit integration of J·dω/dt = τ − B·ω with exact first-order
/// current (and loading-speed) lags, a play-operator backlash and linear
/// flex between the encoders, and copper loss feeding the thermal network
/// under zero-order hold. Throws ConfigError when dt exceeds `max_step`.
Trajectory step_sim(const VirtualActuator& act, const Commands& cmd, double dt);

struct DynoDataset {
    TimeSeries series;
    std::string protocol;
    std::uint64_t seed = 0;
};

/// Band-limited torque applied by the driving actuator to the passive unit
/// under test. Channels: tau_cmd, tau_applied (transducer, dyno→actuator),
/// i_q, omega, theta_in, theta_out, v_bus, i_bus, T_W.
DynoDataset run_random_input(const VirtualActuator& act, const SignalSpec& signal, double fs);

/// Random voltages across two phases with the rotor still, powering the
/// winding resistance (which follows `calib`). Channels: V, i_bus, P, R_ll, T_W.
DynoDataset run_thermal_random(const VirtualActuator& act, const SignalSpec& voltage, double fs,
                               const thermal::ThermistorCalib& calib = thermal::ThermistorCalib::ri50());

enum class TorqueSource { Transducer, CurrentMedian };

struct ConditionResult {
    analysis::EfficiencyRecord record;
    bool feasible = true;
    double tau_cmd = 0.0;
    double omega_cmd = 0.0;
};

struct EfficiencyProtocol {
    double ramp = 0.1;  ///< [s] each speed/torque ramp
    double delay = 0.1; ///< [s] between the speed and torque ramps
    double hold = 0.8;  ///< [s]
    double trim = 0.1;  ///< fraction of the hold dropped at each end before averaging
    TorqueSource torque_source = TorqueSource::Transducer;
    int units_in_series = 2; ///< for the CurrentMedian torque estimate
};

/// Speed ramp, delay, torque ramp, hold, then the reverse. Averages the
/// trimmed hold into one record. |omega_cmd| above max_speed throws
/// DomainError; a torque needing more than max_current is flagged infeasible.
ConditionResult run_efficiency_condition(const VirtualActuator& act, double tau_cmd, double omega_cmd,
                                         const EfficiencyProtocol& p = {});

struct SweepGrid {
    double torque_limit = 0.0; ///< 0 selects the continuous torque
    double speed_limit = 0.0;  ///< 0 selects max_speed (20 rad/s if unbounded)
    std::size_t count = 1838;
};

/// (τ, ω) conditions spread over the four quadrants: a square grid of
/// ceil(√count)² points thinned by even striding to exactly `count`.
std::vector<std::pair<double, double>> sweep_conditions(const VirtualActuator& act, const SweepGrid& g);

std::vector<ConditionResult> run_efficiency_sweep(const VirtualActuator& act, const SweepGrid& g,
                                                  const EfficiencyProtocol& p = {}, Exec exec = Exec::Parallel);

/// Current-loop step tests with the output locked. Result[a][t] is trial t
/// at amplitude a; channels i_cmd and i_q (with measurement noise).
struct StepProtocol {
    double duration = 0.02;   ///< [s]
    double step_time = 0.002; ///< [s]
    std::uint64_t seed = 0;
};
std::vector<std::vector<TimeSeries>> run_step_response(const VirtualActuator& act, std::span<const double> amplitudes,
                                                       int trials, double fs, const StepProtocol& p = {});

/// Band-limited random current command, output locked. Channels i_cmd, i_q.
DynoDataset run_current_random_input(const VirtualActuator& act, const SignalSpec& command, double fs);

struct EfficiencyWear {
    double drop_fraction = 0.0;  ///< multiplier falls by this much...
    double drop_hours = 9.0;     ///< ...linearly over these hours, then holds
    double recover_start = 30.0; ///< [h]
    double recover_end = 57.0;   ///< [h]
    double final_fraction = 0.0; ///< drop remaining after recovery

    double multiplier(double hours) const noexcept;
};

struct WearModel {
    double backlash_rate = 0.0; ///< per actuator [rad/hr]
    EfficiencyWear efficiency;
};

struct LifecycleSettings {
    double interval_minutes = 41.0;
    double gait_seconds_per_hour = 10.0; ///< desk-scale playback per simulated hour
    std::vector<double> interval_torques{1.0, 2.0, 3.0, 4.0};
    std::vector<double> interval_speeds{-12.0, -8.0, -4.0, 4.0, 8.0, 12.0};
    std::vector<double> damping_speeds{2.5, 5.0};
    int actuators_in_series = 2;
    Exec exec = Exec::Parallel;
};

struct IntervalReport {
    double hours = 0.0;
    std::vector<analysis::EfficiencyRecord> efficiency;
    std::vector<analysis::DampingSample> damping;
    double backlash_halfwidth = 0.0;
    double efficiency_multiplier = 1.0;
};

struct LifecycleRun {
    std::vector<IntervalReport> intervals;
    std::vector<double> hourly_hours;          ///< mid-hour stamps
    std::vector<double> hourly_max_discrepancy; ///< across the series pair [rad]
    double final_backlash_growth = 0.0;         ///< per actuator [rad]
};

/// Loops gait playback (torque to the actuator's current loop, speed to the
/// loading actuator) with wear injected as a function of simulated hours,
/// interrupting every `interval_minutes` for efficiency and damping tests.
/// Gait needs channels `tau` [Nm] and `omega` [rad/s].
LifecycleRun run_lifecycle(const VirtualActuator& act, const TimeSeries& gait, double hours, const WearModel& wear,
                           const LifecycleSettings& s = {});

analysis::LifecycleReport summarize(const LifecycleRun& run, int actuators_in_series = 2);

/// Stride-periodic stand-in for recorded quadruped joint data: stance
/// half-sine torque with a lighter swing phase, speed from a two-harmonic
/// stride pattern, small per-stride amplitude jitter.
TimeSeries synthetic_gait(double duration, double fs, std::uint64_t seed, double peak_torque = 6.0,
                          double peak_speed = 12.0, double stride_hz = 2.0);

} // namespace actukit::dyno
