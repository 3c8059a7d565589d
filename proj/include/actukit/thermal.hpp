#pragma once

#include "actukit/core.hpp"
#include "actukit/kernels.hpp"
#include "actukit/optimize.hpp"
#include "actukit/signals.hpp"

#include <array>
#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace actukit::thermal {

enum class NetworkLabel { Fan, NoFan, Custom };
std::string_view to_string(NetworkLabel l) noexcept;
NetworkLabel network_label_from_string(std::string_view s);

/// Two-pole winding/housing thermal network. The winding temperature rise
/// over ambient per watt is
///
///     Z(s) = (R_HA + R_WH + C_slow·R_HA·R_WH·s) / ((C_slow·R_HA·s + 1)(C_fast·R_WH·s + 1))
///
/// C_slow pairs with R_HA (housing pole, minutes) and C_fast with R_WH
/// (winding pole, seconds).
struct ThermalNetwork {
    double R_WH = 0.0;   ///< winding→housing [°C/W]
    double R_HA = 0.0;   ///< housing→ambient [°C/W]
    double C_fast = 0.0; ///< [J/°C]
    double C_slow = 0.0; ///< [J/°C]
    NetworkLabel label = NetworkLabel::Custom;

    void validate() const;

    /// Bench-identified RI50 actuator with cooling fans running.
    static ThermalNetwork fan();
    /// Same actuator, fans off.
    static ThermalNetwork nofan();
};

double dc_resistance(const ThermalNetwork& net) noexcept;
std::complex<double> impedance(const ThermalNetwork& net, double f);

/// Exact zero-order-hold discretization of a controllable-canonical
/// realization of Z(s): x[k+1] = Phi·x[k] + Gamma·P[k], rise[k] = C·x[k].
struct Discretization {
    std::array<double, 4> Phi{}; ///< row-major 2×2
    std::array<double, 2> Gamma{};
    std::array<double, 2> C{};
};

Discretization discretize(const ThermalNetwork& net, double dt);

/// Temperature rise after holding `power` for `t` seconds from cold.
double step_rise(const ThermalNetwork& net, double power, double t);

/// Rise trajectory for a power sequence held for dt each; rise[0] = 0.
std::vector<double> simulate_rise(const ThermalNetwork& net, std::span<const double> power, double dt);

/// Winding temperature for the given power channel (cold start at T_A).
/// Output has one channel "T_W" in °C. Negative power throws InputError.
TimeSeries simulate(const ThermalNetwork& net, const TimeSeries& power, double T_A,
                    const std::string& channel = "P");

struct ThermalFitSettings {
    int grid_points = 9; ///< per parameter, 4 parameters
    int starts = 8;      ///< simplex restarts from the best grid cells
    double R_min = 0.05, R_max = 50.0;
    double C_min = 1.0, C_max = 5000.0;
    opt::NelderMeadSettings simplex{4000, 1e-9, 0.1};
    Exec exec = Exec::Parallel;
    double min_duration = 600.0; ///< [s]
    double wide_ci_fraction = 0.5;
};

struct ThermalFit {
    ThermalNetwork network;
    double vaf = 0.0;                 ///< [%]
    std::array<double, 4> ci{};       ///< 2σ half-widths: R_WH, R_HA, C_fast, C_slow
    bool wide_ci = false;             ///< some relative half-width above the threshold
    double rms_residual = 0.0;        ///< [°C]
    int iterations = 0;
};

/// Fits the four network parameters to measured winding temperature given
/// measured power (two-stage: log grid then simplex on the time-domain
/// squared error). Requires at least `min_duration` of data and a power
/// input that changes at least once.
ThermalFit identify_thermal(std::span<const double> power, std::span<const double> T_W, double fs, double T_A,
                            const ThermalFitSettings& s = {});
ThermalFit identify_thermal(const TimeSeries& power, const TimeSeries& T_W, double T_A,
                            const ThermalFitSettings& s = {}, const std::string& power_channel = "P",
                            const std::string& temp_channel = "T_W");

/// Linear winding-resistance thermometer: T = slope·R_ll + intercept.
struct ThermistorCalib {
    double slope = 0.0;     ///< [°C/Ω]
    double intercept = 0.0; ///< [°C]
    double r_squared = 0.0;

    /// Line-to-line calibration measured on the RI50.
    static ThermistorCalib ri50();
};

/// Least-squares line through (R_ll, T) pairs.
ThermistorCalib thermistor_fit(std::span<const std::pair<double, double>> samples);
double temperature(const ThermistorCalib& c, double R_ll) noexcept;
/// Inverse of `temperature`.
double resistance(const ThermistorCalib& c, double T) noexcept;
/// R_ll = V/i_bus; zero current throws DomainError.
double resistance_from_vi(double V, double i_bus);

/// Largest q-axis current that reaches T_max after `duration` seconds from a
/// cold start (bisection, 1e-4 A).
double max_sustainable_current(const ThermalNetwork& net, const MotorParams& motor, double duration);

/// Time for current i_q to bring the winding from ambient to T_max
/// (bisection, 1e-3 s). +inf when i_q does not exceed the continuous limit.
double peak_duration(const ThermalNetwork& net, const MotorParams& motor, double i_q);

struct LimitPoint {
    double i_q = 0.0;
    double duration = 0.0;
};

/// peak_duration over a set of currents.
std::vector<LimitPoint> limit_curve(const ThermalNetwork& net, const MotorParams& motor,
                                    std::span<const double> currents, Exec exec = Exec::Parallel);

/// dc_resistance(nofan)/dc_resistance(fan).
double cooling_advantage(const ThermalNetwork& fan, const ThermalNetwork& nofan);

} // namespace actukit::thermal
