#include "actukit/core.hpp"

#include "actukit/error.hpp"

#include <cmath>
#include <string>

namespace actukit {

std::string_view to_string(WindingStyle w) noexcept {
    return w == WindingStyle::Wye ? "Wye" : "Delta";
}

std::string_view to_string(TransmissionStyle s) noexcept {
    switch (s) {
    case TransmissionStyle::Direct: return "Direct";
    case TransmissionStyle::Planetary: return "Planetary";
    case TransmissionStyle::Wolfrom: return "Wolfrom";
    }
    return "Direct";
}

WindingStyle winding_style_from_string(std::string_view s) {
    if (s == "Wye") return WindingStyle::Wye;
    if (s == "Delta") return WindingStyle::Delta;
    throw ConfigError("unknown winding_style '" + std::string(s) + "' (expected Wye or Delta)");
}

TransmissionStyle transmission_style_from_string(std::string_view s) {
    if (s == "Direct") return TransmissionStyle::Direct;
    if (s == "Planetary") return TransmissionStyle::Planetary;
    if (s == "Wolfrom") return TransmissionStyle::Wolfrom;
    throw ConfigError("unknown transmission style '" + std::string(s) + "'");
}

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string(name) + " must be positive and finite");
}

} // namespace

void MotorParams::validate() const {
    require_positive(R_phi, "R_phi");
    require_positive(L_e, "L_e");
    require_positive(K_T, "K_T");
    require_positive(K_B, "K_B");
    require_positive(J_m, "J_m");
    require_positive(mass, "mass");
    if (!(T_max > T_ambient)) throw DomainError("T_max must exceed T_ambient");
}

MotorParams MotorParams::ri50() {
    MotorParams m;
    m.R_phi = 0.705;
    m.L_e = 2559e-6;
    m.K_T = 0.105;
    m.K_B = 0.094;
    m.J_m = 9.01e-6;
    m.mass = 0.193;
    m.winding_style = WindingStyle::Wye;
    m.T_max = 100.0;
    m.T_ambient = 25.0;
    return m;
}

void TransmissionSpec::validate() const {
    if (!(ratio > 0.0) || !std::isfinite(ratio))
        throw DomainError("transmission ratio must be positive");
}

double motor_constant(double K_T, double K_B, double R_phi) {
    require_positive(K_T, "K_T");
    require_positive(K_B, "K_B");
    require_positive(R_phi, "R_phi");
    return std::sqrt(K_T * K_B / R_phi);
}

SelectionMetrics selection_metrics(const MotorParams& motor) {
    motor.validate();
    SelectionMetrics s;
    s.K_M = motor_constant(motor.K_T, motor.K_B, motor.R_phi);
    s.S_M = motor.J_m / (s.K_M * s.K_M);
    s.S_T = motor.J_m / (motor.K_T * motor.K_T);
    return s;
}

ActuatorSpec derive_actuator(const MotorParams& motor, const TransmissionSpec& transmission) {
    motor.validate();
    transmission.validate();
    const double n = transmission.ratio;
    ActuatorSpec a;
    a.motor = motor;
    a.transmission = transmission;
    a.K_Ta = n * motor.K_T;
    a.K_Ma = n * motor_constant(motor.K_T, motor.K_B, motor.R_phi);
    a.J_a_pred = n * n * motor.J_m;
    return a;
}

ContinuousLimits continuous_limits(const ActuatorSpec& act, double R_th) {
    if (!(R_th > 0.0)) throw DomainError("R_th must be positive");
    const double headroom = act.motor.T_max - act.motor.T_ambient;
    if (headroom < 0.0) throw DomainError("T_max below T_ambient");
    ContinuousLimits lim;
    lim.i_cont = std::sqrt(headroom / (R_th * 1.5 * act.motor.R_phi));
    lim.tau_cont = act.K_Ta * lim.i_cont;
    return lim;
}

} // namespace actukit
