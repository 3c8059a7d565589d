#pragma once

#include "actukit/core.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace actukit::analysis {

enum class Quadrant { PositiveWork, NegativeWork };
std::string_view to_string(Quadrant q) noexcept;

/// Below this power magnitude on both sides efficiency is not meaningful [W].
inline constexpr double kUndefinedPowerThreshold = 0.5;

struct MeasuredPowers {
    double tau_a = 0.0;   ///< [Nm]
    double omega_a = 0.0; ///< [rad/s]
    double P_mech = 0.0;  ///< delivered at the output [W]
    double P_elec = 0.0;  ///< drawn from the bus [W]
};

struct EfficiencyRecord {
    double tau_a = 0.0;
    double omega_a = 0.0;
    double P_mech = 0.0;
    double P_elec = 0.0;
    double eta = 0.0;
    bool defined = false;
    Quadrant quadrant = Quadrant::NegativeWork;
};

/// Positive work (P_mech > 0): eta = P_mech/P_elec. Negative work: the
/// definition inverts, eta = P_elec/P_mech, which goes negative when the
/// actuator sinks power from both sides. Undefined when both powers are
/// below `eps` in magnitude (or the ratio is not finite).
EfficiencyRecord efficiency(const MeasuredPowers& m, double eps = kUndefinedPowerThreshold);

/// Mean efficiency per (torque, speed) cell. Edges are bin boundaries;
/// cell (i, j) covers [tau_edges[i], tau_edges[i+1]) × [omega_edges[j], omega_edges[j+1]).
struct EfficiencyMap {
    std::vector<double> tau_edges;
    std::vector<double> omega_edges;
    std::vector<double> mean;        ///< row-major, NaN where empty
    std::vector<std::size_t> count;
    bool empty = true;               ///< no defined record landed in any cell

    std::size_t rows() const noexcept { return tau_edges.size() - 1; }
    std::size_t cols() const noexcept { return omega_edges.size() - 1; }
    double at(std::size_t i, std::size_t j) const { return mean[i * cols() + j]; }
    std::size_t n_at(std::size_t i, std::size_t j) const { return count[i * cols() + j]; }
};

EfficiencyMap build_map(std::span<const EfficiencyRecord> records, std::span<const double> tau_edges,
                        std::span<const double> omega_edges);

/// Grid CSV: header `tau\omega,<omega bin centers>`, one row per torque bin
/// starting with the bin center; empty cells are written as `nan`.
std::string map_to_csv(const EfficiencyMap& map);

/// Effective viscous damping from steady torque estimate over speed.
double damping_test(double tau_est, double omega);

struct BacklashTrend {
    double rate = 0.0;              ///< growth of the series discrepancy [rad/hr]
    double ci = 0.0;                ///< 2σ half-width of `rate`
    double per_actuator_rate = 0.0; ///< rate / actuators in series
    double per_actuator_ci = 0.0;
    double baseline = 0.0;          ///< first-hour maximum, taken as flex [rad]
    std::size_t points = 0;
};

/// Removes the first-hour maximum (flex proxy, stiffness assumed constant)
/// and fits an OLS line against hour. `hours` defaults to 0, 1, 2, ...
BacklashTrend backlash_trend(std::span<const double> hourly_max, std::span<const double> hours = {},
                             int actuators_in_series = 2);

struct EfficiencyTrend {
    std::vector<double> hours;
    std::vector<double> eta_pos_mean; ///< NaN for skipped intervals
    std::vector<bool> skipped;        ///< interval had no defined positive-work record
    double max_drop_pct = 0.0;        ///< largest drop below the first interval [% of first]
    double final_delta_pct = 0.0;     ///< last vs first [% of first]
};

/// Mean positive-work efficiency per interval and its excursions relative
/// to the first usable interval. Needs at least two usable intervals.
EfficiencyTrend efficiency_trend(std::span<const std::vector<EfficiencyRecord>> intervals,
                                 std::span<const double> hours);

/// tau = i_q·K_Ta.
double torque_from_current(double i_q, const ActuatorSpec& spec) noexcept;

/// Median across units (mean of the middle pair for even counts).
double median_combine(std::span<const double> per_unit);
/// Elementwise median of equal-length per-unit traces.
std::vector<double> median_combine(std::span<const std::vector<double>> per_unit);

struct DampingSummary {
    double speed = 0.0; ///< [rad/s]
    double B = 0.0;     ///< mean [Nms/rad]
    double ci = 0.0;    ///< 2σ across intervals
    std::size_t samples = 0;
};

struct DampingSample {
    double speed = 0.0;
    double B = 0.0;
};

struct LifecycleReport {
    std::vector<double> hours;
    std::vector<double> eta_pos_mean;
    std::vector<DampingSummary> damping;
    BacklashTrend backlash;
    std::vector<double> discrepancy_hours;
    std::vector<double> discrepancy_max_per_hour;
    EfficiencyTrend trend;
};

LifecycleReport lifecycle_report(std::span<const double> interval_hours,
                                 std::span<const std::vector<EfficiencyRecord>> interval_records,
                                 std::span<const std::vector<DampingSample>> interval_damping,
                                 std::span<const double> discrepancy_hours,
                                 std::span<const double> discrepancy_max_per_hour, int actuators_in_series = 2);

} // namespace actukit::analysis
