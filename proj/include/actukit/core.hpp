#pragma once

#include <limits>
#include <string>
#include <string_view>

/// Actuator characterization toolkit.
///
/// All quantities are SI: rad/s, Nm, kg·m², °C, W, s. Conversions happen only
/// at file and report boundaries.
namespace actukit {

enum class WindingStyle { Wye, Delta };
enum class TransmissionStyle { Direct, Planetary, Wolfrom };

std::string_view to_string(WindingStyle w) noexcept;
std::string_view to_string(TransmissionStyle s) noexcept;
WindingStyle winding_style_from_string(std::string_view s);
TransmissionStyle transmission_style_from_string(std::string_view s);

/// Electrical, magnetic and inertial constants of a PMSM.
struct MotorParams {
    double R_phi = 0.0;     ///< phase resistance [Ω]
    double L_e = 0.0;       ///< phase inductance [H]
    double K_T = 0.0;       ///< torque constant [Nm/A]
    double K_B = 0.0;       ///< back-EMF constant [Vs/rad]
    double J_m = 0.0;       ///< rotor inertia [kg·m²]
    double mass = 0.0;      ///< [kg]
    WindingStyle winding_style = WindingStyle::Wye;
    double T_max = 100.0;   ///< winding temperature limit [°C]
    double T_ambient = 25.0;

    /// Throws DomainError naming the first violated invariant.
    void validate() const;

    /// T-Motor RI50 as characterized on the bench.
    static MotorParams ri50();
};

struct TransmissionSpec {
    double ratio = 1.0; ///< speed reduction N
    TransmissionStyle style = TransmissionStyle::Direct;

    /// Printable-gear selection range is 1:1 to 30:1. Outside it is allowed
    /// but callers should warn.
    bool in_selection_range() const noexcept { return ratio >= 1.0 && ratio <= 30.0; }
    void validate() const;
};

/// Motor plus transmission with output-referred constants.
struct ActuatorSpec {
    MotorParams motor;
    TransmissionSpec transmission;
    double K_Ta = 0.0;     ///< N·K_T [Nm/A]
    double K_Ma = 0.0;     ///< N·K_M [Nm/√W]
    double J_a_pred = 0.0; ///< N²·J_m [kg·m²], rotor only (no gear inertia)
    double max_speed = std::numeric_limits<double>::infinity(); ///< output [rad/s]
};

struct SelectionMetrics {
    double K_M = 0.0; ///< motor constant [Nm/√W]
    double S_M = 0.0; ///< responsiveness J_m/K_M² [s]
    double S_T = 0.0; ///< torque-specific inertia J_m/K_T² [kg·(A/N)²]
};

struct ContinuousLimits {
    double i_cont = 0.0;   ///< q-axis current [A]
    double tau_cont = 0.0; ///< output torque [Nm]
};

/// K_M = √(K_T·K_B/R_phi). Non-positive inputs throw DomainError.
double motor_constant(double K_T, double K_B, double R_phi);

SelectionMetrics selection_metrics(const MotorParams& motor);

ActuatorSpec derive_actuator(const MotorParams& motor, const TransmissionSpec& transmission);

/// q-axis copper loss (3/2)·R_phi·i_q² under field-oriented control.
inline double copper_loss(const MotorParams& motor, double i_q) noexcept {
    return 1.5 * motor.R_phi * i_q * i_q;
}

/// Largest steady current whose copper loss keeps the winding at T_max
/// through a total thermal resistance R_th [°C/W].
ContinuousLimits continuous_limits(const ActuatorSpec& act, double R_th);

} // namespace actukit
