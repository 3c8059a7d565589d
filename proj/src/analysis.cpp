#include "actukit/analysis.hpp"

#include "actukit/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace actukit::analysis {

std::string_view to_string(Quadrant q) noexcept {
    return q == Quadrant::PositiveWork ? "positive" : "negative";
}

EfficiencyRecord efficiency(const MeasuredPowers& m, double eps) {
    if (!std::isfinite(m.P_mech) || !std::isfinite(m.P_elec)) throw InputError("powers must be finite");
    EfficiencyRecord r;
    r.tau_a = m.tau_a;
    r.omega_a = m.omega_a;
    r.P_mech = m.P_mech;
    r.P_elec = m.P_elec;
    r.quadrant = m.P_mech > 0.0 ? Quadrant::PositiveWork : Quadrant::NegativeWork;
    if (std::abs(m.P_mech) < eps && std::abs(m.P_elec) < eps) {
        r.defined = false;
        r.eta = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    r.eta = r.quadrant == Quadrant::PositiveWork ? m.P_mech / m.P_elec : m.P_elec / m.P_mech;
    r.defined = std::isfinite(r.eta);
    if (!r.defined) r.eta = std::numeric_limits<double>::quiet_NaN();
    return r;
}

namespace {

void require_increasing(std::span<const double> edges, const char* name) {
    if (edges.size() < 2) throw InputError(std::string(name) + " needs at least two edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1])) throw InputError(std::string(name) + " must be strictly increasing");
}

// Index of the half-open bin holding v; the last bin also takes its upper edge.
std::ptrdiff_t bin_of(std::span<const double> edges, double v) {
    if (v < edges.front() || v > edges.back()) return -1;
    if (v == edges.back()) return static_cast<std::ptrdiff_t>(edges.size()) - 2;
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return (it - edges.begin()) - 1;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

EfficiencyMap build_map(std::span<const EfficiencyRecord> records, std::span<const double> tau_edges,
                        std::span<const double> omega_edges) {
    require_increasing(tau_edges, "torque bins");
    require_increasing(omega_edges, "speed bins");
    EfficiencyMap m;
    m.tau_edges.assign(tau_edges.begin(), tau_edges.end());
    m.omega_edges.assign(omega_edges.begin(), omega_edges.end());
    const std::size_t cells = m.rows() * m.cols();
    std::vector<double> sum(cells, 0.0);
    m.count.assign(cells, 0);
    for (const auto& r : records) {
        if (!r.defined) continue;
        const auto i = bin_of(tau_edges, r.tau_a);
        const auto j = bin_of(omega_edges, r.omega_a);
        if (i < 0 || j < 0) continue;
        const auto idx = static_cast<std::size_t>(i) * m.cols() + static_cast<std::size_t>(j);
        sum[idx] += r.eta;
        ++m.count[idx];
    }
    m.mean.assign(cells, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t c = 0; c < cells; ++c) {
        if (m.count[c] > 0) {
            m.mean[c] = sum[c] / static_cast<double>(m.count[c]);
            m.empty = false;
        }
    }
    return m;
}

std::string map_to_csv(const EfficiencyMap& map) {
    std::ostringstream os;
    os << "tau\\omega";
    for (std::size_t j = 0; j < map.cols(); ++j) os << ',' << fmt(0.5 * (map.omega_edges[j] + map.omega_edges[j + 1]));
    os << '\n';
    for (std::size_t i = 0; i < map.rows(); ++i) {
        os << fmt(0.5 * (map.tau_edges[i] + map.tau_edges[i + 1]));
        for (std::size_t j = 0; j < map.cols(); ++j) os << ',' << fmt(map.at(i, j));
        os << '\n';
    }
    return os.str();
}

double damping_test(double tau_est, double omega) {
    if (omega == 0.0) throw DomainError("damping test needs a non-zero speed");
    return tau_est / omega;
}

BacklashTrend backlash_trend(std::span<const double> hourly_max, std::span<const double> hours,
                             int actuators_in_series) {
    if (hourly_max.size() < 3) throw FitError("backlash trend needs at least three hourly points");
    if (!hours.empty() && hours.size() != hourly_max.size()) throw AlignmentError("hours and maxima differ in length");
    if (actuators_in_series < 1) throw DomainError("actuators in series must be at least one");
    const std::size_t n = hourly_max.size();
    const auto hour = [&](std::size_t i) { return hours.empty() ? static_cast<double>(i) : hours[i]; };

    BacklashTrend t;
    t.points = n;
    t.baseline = hourly_max[0];
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += hour(i);
        my += hourly_max[i] - t.baseline;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = hour(i) - mx;
        sxx += dx * dx;
        sxy += dx * ((hourly_max[i] - t.baseline) - my);
    }
    if (!(sxx > 0.0)) throw FitError("backlash trend needs distinct hours");
    t.rate = sxy / sxx;
    const double icpt = my - t.rate * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = (hourly_max[i] - t.baseline) - (icpt + t.rate * hour(i));
        ssr += e * e;
    }
    t.ci = 2.0 * std::sqrt(ssr / (static_cast<double>(n) - 2.0) / sxx);
    t.per_actuator_rate = t.rate / actuators_in_series;
    t.per_actuator_ci = t.ci / actuators_in_series;
    return t;
}

EfficiencyTrend efficiency_trend(std::span<const std::vector<EfficiencyRecord>> intervals,
                                 std::span<const double> hours) {
    if (intervals.size() != hours.size()) throw AlignmentError("intervals and hours differ in length");
    if (intervals.size() < 2) throw MetricError("efficiency trend needs at least two intervals");
    EfficiencyTrend t;
    t.hours.assign(hours.begin(), hours.end());
    std::vector<double> usable;
    for (const auto& recs : intervals) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : recs) {
            if (r.defined && r.quadrant == Quadrant::PositiveWork) {
                sum += r.eta;
                ++n;
            }
        }
        t.skipped.push_back(n == 0);
        const double m = n > 0 ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
        t.eta_pos_mean.push_back(m);
        if (n > 0) usable.push_back(m);
    }
    if (usable.size() < 2) throw MetricError("fewer than two intervals hold positive-work records");
    const double first = usable.front();
    double worst = first;
    for (double v : usable) worst = std::min(worst, v);
    t.max_drop_pct = 100.0 * (first - worst) / first;
    t.final_delta_pct = 100.0 * (usable.back() - first) / first;
    return t;
}

double torque_from_current(double i_q, const ActuatorSpec& spec) noexcept { return i_q * spec.K_Ta; }

double median_combine(std::span<const double> per_unit) {
    if (per_unit.empty()) throw InputError("median over an empty unit list");
    std::vector<double> v(per_unit.begin(), per_unit.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> median_combine(std::span<const std::vector<double>> per_unit) {
    if (per_unit.empty()) throw InputError("median over an empty unit list");
    const std::size_t len = per_unit.front().size();
    for (const auto& u : per_unit)
        if (u.size() != len) throw AlignmentError("unit traces differ in length");
    std::vector<double> out(len), column(per_unit.size());
    for (std::size_t i = 0; i < len; ++i) {
        for (std::size_t u = 0; u < per_unit.size(); ++u) column[u] = per_unit[u][i];
        out[i] = median_combine(column);
    }
    return out;
}

LifecycleReport lifecycle_report(std::span<const double> interval_hours,
                                 std::span<const std::vector<EfficiencyRecord>> interval_records,
                                 std::span<const std::vector<DampingSample>> interval_damping,
                                 std::span<const double> discrepancy_hours,
                                 std::span<const double> discrepancy_max_per_hour, int actuators_in_series) {
    LifecycleReport rep;
    rep.trend = efficiency_trend(interval_records, interval_hours);
    rep.hours = rep.trend.hours;
    rep.eta_pos_mean = rep.trend.eta_pos_mean;

    std::map<double, std::vector<double>> by_speed;
    for (const auto& interval : interval_damping)
        for (const auto& d : interval) by_speed[d.speed].push_back(d.B);
    for (const auto& [speed, bs] : by_speed) {
        DampingSummary s;
        s.speed = speed;
        s.samples = bs.size();
        double m = 0.0;
        for (double b : bs) m += b;
        m /= static_cast<double>(bs.size());
        double v = 0.0;
        for (double b : bs) v += (b - m) * (b - m);
        s.B = m;
        s.ci = bs.size() > 1 ? 2.0 * std::sqrt(v / static_cast<double>(bs.size() - 1)) : 0.0;
        rep.damping.push_back(s);
    }

    rep.discrepancy_hours.assign(discrepancy_hours.begin(), discrepancy_hours.end());
    rep.discrepancy_max_per_hour.assign(discrepancy_max_per_hour.begin(), discrepancy_max_per_hour.end());
    rep.backlash = backlash_trend(discrepancy_max_per_hour, discrepancy_hours, actuators_in_series);
    return rep;
}

} // namespace actukit::analysis
