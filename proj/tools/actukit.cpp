#include "actukit/analysis.hpp"
#include "actukit/config.hpp"
#include "actukit/core.hpp"
#include "actukit/dyno.hpp"
#include "actukit/error.hpp"
#include "actukit/kernels.hpp"
#include "actukit/signals.hpp"
#include "actukit/sysid.hpp"
#include "actukit/thermal.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace actukit;
namespace fs = std::filesystem;
using config::Json;

namespace {

struct Options {
    std::string config_path;
    std::string input;
    std::string output;
    std::optional<std::uint64_t> seed;

    std::string protocol;
    std::string target;

    std::optional<double> fs, duration, amplitude, cutoff, hold, f_lo, f_hi, hours, T_A, torque_limit, speed_limit;
    std::optional<int> trials, count, seg_len, tau_bins, omega_bins;
    std::vector<double> durations, currents, ratios, amplitudes, resistances;
    std::string in_channel, out_channel, channel;
};

class Run {
public:
    Run(const Options& o, std::string command) : o_(o), command_(std::move(command)) {
        cfg_ = o.config_path.empty() ? config::parse(Json{{"schema", config::kSchemaVersion}})
                                     : config::load(o.config_path);
        seed_ = o.seed ? *o.seed : cfg_.seed;
        out_ = o.output.empty() ? cfg_.output_dir : fs::path(o.output);
    }

    const config::RunConfig& cfg() const { return cfg_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t seed(std::uint64_t stream) const { return derive_seed(seed_, stream); }

    double num(const std::optional<double>& flag, const char* key, double fallback) {
        const double v = flag ? *flag : config::number(cfg_.experiment, "/experiment", key, fallback);
        settings_[key] = v;
        return v;
    }
    int count(const std::optional<int>& flag, const char* key, int fallback, int min = 1) {
        const auto v = flag ? *flag : static_cast<int>(config::integer(cfg_.experiment, "/experiment", key, fallback));
        if (v < min) throw ConfigError(std::string("/experiment/") + key + ": must be >= " + std::to_string(min));
        settings_[key] = v;
        return v;
    }
    std::vector<double> list(const std::vector<double>& flag, const char* key, std::vector<double> fallback) {
        auto v = !flag.empty() ? flag : config::numbers(cfg_.experiment, "/experiment", key, fallback);
        settings_[key] = v;
        return v;
    }
    std::string name(const std::string& flag, const char* key, const std::string& fallback) {
        auto v = !flag.empty() ? flag : config::text(cfg_.experiment, "/experiment", key, fallback);
        settings_[key] = v;
        return v;
    }

    TimeSeries input() const {
        if (o_.input.empty()) throw ConfigError("--input: required for this command");
        return read_csv(o_.input);
    }

    fs::path path(const std::string& file) const { return out_ / file; }

    void warn(const std::string& w) {
        warnings_.push_back(w);
        std::cerr << "warning: " << w << "\n";
    }

    void write_text(const std::string& file, const std::string& text) {
        fs::create_directories(out_);
        std::ofstream f(path(file), std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + path(file).string() + "'");
        f << text;
        artifacts_.push_back(file);
    }
    void write_series(const std::string& file, const TimeSeries& x) {
        fs::create_directories(out_);
        write_csv(x, path(file));
        artifacts_.push_back(file);
    }

    void finish(Json parameters, Json results) {
        Json r;
        r["schema"] = config::kSchemaVersion;
        r["command"] = command_;
        r["config_hash"] = cfg_.hash;
        r["seed"] = seed_;
        r["parameters"] = std::move(parameters);
        r["settings"] = settings_;
        r["results"] = std::move(results);
        r["warnings"] = warnings_;
        r["artifacts"] = artifacts_;
        if (!o_.input.empty()) r["input"] = o_.input;
        write_text(command_ + ".json", r.dump(2) + "\n");
        std::cout << path(command_ + ".json").string() << "\n";
    }

    const fs::path& out() const { return out_; }
    const std::string& command() const { return command_; }

private:
    const Options& o_;
    std::string command_;
    config::RunConfig cfg_;
    std::uint64_t seed_ = 0;
    fs::path out_;
    Json settings_ = Json::object();
    std::vector<std::string> warnings_;
    std::vector<std::string> artifacts_;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json to_json(const sysid::MechFit& f) {
    return Json{{"J", f.J},       {"B", f.B},           {"vaf", f.vaf},         {"ci_J", f.ci_J},
                {"ci_B", f.ci_B}, {"cost", f.cost},     {"iterations", f.iterations},
                {"bins_used", f.bins_used}, {"f_lo", f.f_lo}, {"f_hi", f.f_hi}};
}

std::string frf_csv(const sysid::FrfEstimate& frf) {
    std::string s = "freq_Hz,mag,phase_rad,coherence\n";
    for (std::size_t i = 0; i < frf.size(); ++i)
        s += fmt(frf.freq[i]) + "," + fmt(std::abs(frf.H[i])) + "," + fmt(std::arg(frf.H[i])) + "," +
             fmt(frf.coherence[i]) + "\n";
    return s;
}

std::vector<double> edges(double limit, int bins) {
    const double L = limit * (1.0 + 1e-9);
    std::vector<double> e(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) e[static_cast<std::size_t>(i)] = -L + 2.0 * L * i / bins;
    return e;
}

Json thermal_doc(const thermal::ThermalNetwork& n) {
    auto j = config::to_json(n);
    j["schema"] = config::kSchemaVersion;
    return j;
}

void cmd_derive(Run& r) {
    const auto& a = r.cfg().actuator;
    const auto m = selection_metrics(a.motor);
    const double R_th = thermal::dc_resistance(r.cfg().thermal);
    const auto lim = continuous_limits(a, R_th);
    if (!a.transmission.in_selection_range())
        r.warn("ratio " + fmt(a.transmission.ratio) + " is outside the 1:1 to 30:1 selection range");
    r.finish(Json{{"actuator", config::to_json(a)}, {"thermal", config::to_json(r.cfg().thermal)}},
             Json{{"K_M", m.K_M},
                  {"S_M", m.S_M},
                  {"S_T", m.S_T},
                  {"K_Ta", a.K_Ta},
                  {"K_Ma", a.K_Ma},
                  {"J_a_pred", a.J_a_pred},
                  {"R_th", R_th},
                  {"i_cont", lim.i_cont},
                  {"tau_cont", lim.tau_cont}});
}

void cmd_select(Run& r, const Options& o) {
    const auto& motor = r.cfg().actuator.motor;
    const auto m = selection_metrics(motor);
    const double R_th = thermal::dc_resistance(r.cfg().thermal);
    const auto ratios = r.list(o.ratios, "ratios", {1, 2, 3, 5, 7.5, 10, 15.04, 20, 30});
    std::string csv = "ratio,K_Ta,K_Ma,J_a_pred,tau_cont\n";
    Json rows = Json::array();
    for (double n : ratios) {
        const TransmissionSpec t{n, r.cfg().actuator.transmission.style};
        if (!t.in_selection_range()) r.warn("ratio " + fmt(n) + " is outside the 1:1 to 30:1 selection range");
        const auto a = derive_actuator(motor, t);
        const double tau = continuous_limits(a, R_th).tau_cont;
        csv += fmt(n) + "," + fmt(a.K_Ta) + "," + fmt(a.K_Ma) + "," + fmt(a.J_a_pred) + "," + fmt(tau) + "\n";
        rows.push_back(Json{{"ratio", n}, {"K_Ta", a.K_Ta}, {"K_Ma", a.K_Ma}, {"J_a_pred", a.J_a_pred}, {"tau_cont", tau}});
    }
    r.write_text("select.csv", csv);
    r.finish(Json{{"motor", config::to_json(motor)}, {"R_th", R_th}},
             Json{{"K_M", m.K_M}, {"S_M", m.S_M}, {"S_T", m.S_T}, {"ratios", rows}});
}

void cmd_sim(Run& r, const Options& o) {
    const auto& act = r.cfg().dyno;
    const auto d = [&]() -> dyno::DynoDataset {
        SignalSpec s;
        if (o.protocol == "random-input") {
            s.kind = SignalKind::BandLimitedRandom;
            s.amplitude = r.num(o.amplitude, "amplitude", 1.0);
            s.cutoff = r.num(o.cutoff, "cutoff", 50.0);
            s.duration = r.num(o.duration, "duration", 60.0);
            s.seed = r.seed(1);
            return dyno::run_random_input(act, s, r.num(o.fs, "fs", 1000.0));
        }
        if (o.protocol == "thermal-random") {
            s.kind = SignalKind::PiecewiseConstantRandom;
            s.amplitude = r.num(o.amplitude, "amplitude", 8.0);
            s.hold_duration = r.num(o.hold, "hold", 20.0);
            s.duration = r.num(o.duration, "duration", 3600.0);
            s.seed = r.seed(2);
            return dyno::run_thermal_random(act, s, r.num(o.fs, "fs", 1.0));
        }
        if (o.protocol == "current-random") {
            s.kind = SignalKind::BandLimitedRandom;
            s.amplitude = r.num(o.amplitude, "amplitude", 3.0);
            s.cutoff = r.num(o.cutoff, "cutoff", 300.0);
            s.duration = r.num(o.duration, "duration", 20.0);
            s.seed = r.seed(3);
            return dyno::run_current_random_input(act, s, r.num(o.fs, "fs", 2700.0));
        }
        const double dur = r.num(o.duration, "duration", 10.0);
        return {dyno::synthetic_gait(dur, r.num(o.fs, "fs", 500.0), r.seed(4)), "gait", r.seed(4)};
    }();
    const auto file = o.protocol + ".csv";
    r.write_series(file, d.series);
    Json ch = Json::array();
    for (const auto& c : d.series.channels()) ch.push_back(c.name);
    r.finish(Json{{"actuator", config::to_json(act.spec)}, {"protocol", o.protocol}, {"signal_seed", d.seed}},
             Json{{"samples", d.series.size()}, {"fs", d.series.fs()}, {"channels", ch}, {"dataset", file}});
}

void cmd_identify_mech(Run& r, const Options& o) {
    const auto x = r.input();
    const auto in = r.name(o.in_channel, "input_channel", "tau_applied");
    const auto out = r.name(o.out_channel, "output_channel", "omega");
    sysid::FrfSettings fs;
    fs.seg_len = static_cast<std::size_t>(r.count(o.seg_len, "seg_len", 0, 0));
    const auto frf = sysid::estimate_frf(x, in, out, fs);
    const double lo = r.num(o.f_lo, "f_lo", 0.5), hi = r.num(o.f_hi, "f_hi", 40.0);
    auto fit = sysid::fit_first_order(frf, lo, hi);
    fit.vaf = sysid::vaf(x[out], sysid::replay_first_order(fit.J, fit.B, x[in], x.fs(), x[out].front()));
    r.write_text("frf.csv", frf_csv(frf));
    r.finish(Json{{"segments", frf.nseg}, {"window", frf.window}}, Json{{"fit", to_json(fit)}});
}

void cmd_identify_thermal(Run& r, const Options& o) {
    const auto x = r.input();
    const double T_A = r.num(o.T_A, "T_A", r.cfg().actuator.motor.T_ambient);
    const auto p = r.name(o.in_channel, "input_channel", "P");
    const auto t = r.name(o.out_channel, "output_channel", "T_W");
    const auto fit = thermal::identify_thermal(x, x, T_A, {}, p, t);
    if (fit.wide_ci) r.warn("some parameters have a 2-sigma interval wider than 50% of their value");
    r.write_text("thermal_network.json", thermal_doc(fit.network).dump(2) + "\n");
    r.finish(Json::object(), Json{{"network", config::to_json(fit.network)},
                                  {"ci", fit.ci},
                                  {"wide_ci", fit.wide_ci},
                                  {"vaf", fit.vaf},
                                  {"rms_residual", fit.rms_residual},
                                  {"dc_resistance", thermal::dc_resistance(fit.network)},
                                  {"iterations", fit.iterations}});
}

void cmd_thermistor(Run& r, const Options& o) {
    const auto x = r.input();
    const auto rc = r.name(o.in_channel, "input_channel", "R_ll");
    const auto tc = r.name(o.out_channel, "output_channel", "T");
    std::vector<std::pair<double, double>> samples;
    for (std::size_t k = 0; k < x.size(); ++k) samples.emplace_back(x[rc][k], x[tc][k]);
    const auto cal = thermal::thermistor_fit(samples);
    Json at = Json::array();
    for (double R : r.list(o.resistances, "resistances", {}))
        at.push_back(Json{{"R_ll", R}, {"T", thermal::temperature(cal, R)}});
    r.finish(Json::object(),
             Json{{"slope", cal.slope}, {"intercept", cal.intercept}, {"r_squared", cal.r_squared}, {"temperatures", at}});
}

void cmd_limits(Run& r, const Options& o) {
    const auto& net = r.cfg().thermal;
    const auto& motor = r.cfg().actuator.motor;
    const auto durations = r.list(o.durations, "durations", {2.0, 20.0});
    std::string csv = "duration_s,i_q_A\n";
    Json rows = Json::array();
    for (double d : durations) {
        const double i = thermal::max_sustainable_current(net, motor, d);
        csv += fmt(d) + "," + fmt(i) + "\n";
        rows.push_back(Json{{"duration", d}, {"i_q", i}});
    }
    r.write_text("limits.csv", csv);
    Json peaks = Json::array();
    const auto currents = r.list(o.currents, "currents", {});
    for (const auto& pt : thermal::limit_curve(net, motor, currents))
        peaks.push_back(Json{{"i_q", pt.i_q}, {"duration", std::isfinite(pt.duration) ? Json(pt.duration) : Json("inf")}});
    const auto lim = continuous_limits(r.cfg().actuator, thermal::dc_resistance(net));
    r.finish(Json{{"thermal", config::to_json(net)}, {"motor", config::to_json(motor)}},
             Json{{"max_sustainable_current", rows}, {"peak_duration", peaks}, {"i_cont", lim.i_cont}});
}

void cmd_efficiency_map(Run& r, const Options& o) {
    const auto& act = r.cfg().dyno;
    dyno::SweepGrid g;
    g.count = static_cast<std::size_t>(r.count(o.count, "count", 1838));
    g.torque_limit = r.num(o.torque_limit, "torque_limit", 0.0);
    g.speed_limit = r.num(o.speed_limit, "speed_limit", 0.0);
    const auto res = dyno::run_efficiency_sweep(act, g);

    std::string csv = "tau_cmd,omega_cmd,tau_a,omega_a,P_mech,P_elec,eta,defined,quadrant,feasible\n";
    std::vector<analysis::EfficiencyRecord> recs;
    double tmax = 0.0, wmax = 0.0;
    std::size_t infeasible = 0;
    for (const auto& c : res) {
        const auto& e = c.record;
        csv += fmt(c.tau_cmd) + "," + fmt(c.omega_cmd) + "," + fmt(e.tau_a) + "," + fmt(e.omega_a) + "," +
               fmt(e.P_mech) + "," + fmt(e.P_elec) + "," + fmt(e.eta) + "," + (e.defined ? "1" : "0") + "," +
               std::string(analysis::to_string(e.quadrant)) + "," + (c.feasible ? "1" : "0") + "\n";
        if (!c.feasible) {
            ++infeasible;
            continue;
        }
        recs.push_back(e);
        tmax = std::max(tmax, std::abs(e.tau_a));
        wmax = std::max(wmax, std::abs(e.omega_a));
    }
    r.write_text("efficiency_records.csv", csv);
    const auto map = analysis::build_map(recs, edges(tmax, r.count(o.tau_bins, "tau_bins", 10)),
                                         edges(wmax, r.count(o.omega_bins, "omega_bins", 10)));
    if (map.empty) r.warn("efficiency map is empty: no defined record landed in any cell");
    if (infeasible) r.warn(std::to_string(infeasible) + " conditions were infeasible and excluded");
    r.write_text("efficiency_map.csv", analysis::map_to_csv(map));
    std::size_t defined = 0;
    for (const auto& e : recs) defined += e.defined;
    r.finish(Json{{"actuator", config::to_json(act.spec)}, {"standby_power", act.standby_power}},
             Json{{"conditions", res.size()}, {"infeasible", infeasible}, {"defined", defined}, {"map_empty", map.empty}});
}

void cmd_lifecycle(Run& r, const Options& o) {
    const auto& act = r.cfg().dyno;
    const double hours = r.num(o.hours, "hours", 57.0);
    const auto gait = o.input.empty() ? dyno::synthetic_gait(r.num(o.duration, "gait_duration", 10.0), 500.0, r.seed(4))
                                      : r.input();
    const auto run = dyno::run_lifecycle(act, gait, hours, r.cfg().wear);
    const auto rep = dyno::summarize(run);
    Json damping = Json::array();
    for (const auto& d : rep.damping)
        damping.push_back(Json{{"speed", d.speed}, {"B", d.B}, {"ci", d.ci}, {"samples", d.samples}});
    Json eta = Json::array();
    for (double v : rep.eta_pos_mean) eta.push_back(std::isfinite(v) ? Json(v) : Json());
    r.finish(Json{{"actuator", config::to_json(act.spec)},
                  {"wear", {{"backlash_rate", r.cfg().wear.backlash_rate},
                            {"efficiency_drop", r.cfg().wear.efficiency.drop_fraction},
                            {"efficiency_final", r.cfg().wear.efficiency.final_fraction}}}},
             Json{{"interval_hours", rep.hours},
                  {"eta_pos_mean", eta},
                  {"damping", damping},
                  {"backlash",
                   {{"rate", rep.backlash.rate},
                    {"ci", rep.backlash.ci},
                    {"per_actuator_rate", rep.backlash.per_actuator_rate},
                    {"per_actuator_ci", rep.backlash.per_actuator_ci},
                    {"baseline", rep.backlash.baseline},
                    {"points", rep.backlash.points}}},
                  {"discrepancy_hours", rep.discrepancy_hours},
                  {"discrepancy_max", rep.discrepancy_max_per_hour},
                  {"efficiency_max_drop_pct", rep.trend.max_drop_pct},
                  {"efficiency_final_delta_pct", rep.trend.final_delta_pct},
                  {"final_backlash_growth", run.final_backlash_growth}});
}

void cmd_bandwidth(Run& r, const Options& o) {
    TimeSeries x = [&] {
        if (!o.input.empty()) return r.input();
        SignalSpec s;
        s.kind = SignalKind::BandLimitedRandom;
        s.amplitude = r.num(o.amplitude, "amplitude", 3.0);
        s.cutoff = r.num(o.cutoff, "cutoff", 300.0);
        s.duration = r.num(o.duration, "duration", 20.0);
        s.seed = r.seed(3);
        return dyno::run_current_random_input(r.cfg().dyno, s, r.num(o.fs, "fs", 2700.0)).series;
    }();
    const auto in = r.name(o.in_channel, "input_channel", "i_cmd");
    const auto out = r.name(o.out_channel, "output_channel", "i_q");
    sysid::FrfSettings fs;
    fs.seg_len = static_cast<std::size_t>(r.count(o.seg_len, "seg_len", static_cast<int>(std::lround(x.fs()))));
    const auto frf = sysid::estimate_frf(x, in, out, fs);
    const auto bw = sysid::half_power_bandwidth(frf);
    if (bw.open_ended) r.warn("response never fell below half power; bandwidth is the highest frequency analysed");
    r.write_text("bandwidth_frf.csv", frf_csv(frf));
    r.finish(Json{{"segments", frf.nseg}}, Json{{"bandwidth_hz", bw.hz}, {"open_ended", bw.open_ended}});
}

void cmd_steps(Run& r, const Options& o) {
    Json rows = Json::array();
    if (!o.input.empty()) {
        const auto x = r.input();
        const auto ch = r.name(o.channel, "channel", "i_q");
        rows.push_back(Json{{"rise_time", sysid::rise_time(x, ch)}});
    } else {
        const auto amps = r.list(o.amplitudes, "amplitudes", {1, 2, 3, 4, 5, 6});
        const int trials = r.count(o.trials, "trials", 50);
        dyno::StepProtocol p;
        p.seed = r.seed(5);
        const auto sets = dyno::run_step_response(r.cfg().dyno, amps, trials, r.num(o.fs, "fs", 2700.0), p);
        for (std::size_t a = 0; a < sets.size(); ++a) {
            const auto avg = sysid::average_steps(sets[a]);
            const auto file = "step_" + std::to_string(a) + ".csv";
            r.write_series(file, avg);
            rows.push_back(Json{{"amplitude", amps[a]}, {"rise_time", sysid::rise_time(avg, "i_q")}, {"profile", file}});
        }
    }
    r.finish(Json{{"current_loop_tau", r.cfg().dyno.current_loop_tau}}, Json{{"steps", rows}});
}

void append_log(const fs::path& dir, const std::string& command, int code, const std::string& message) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream log(dir / "actukit.log", std::ios::app);
    if (!log) return;
    char stamp[32];
    const std::time_t now = std::time(nullptr);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    log << stamp << " " << command << " exit=" << code;
    if (!message.empty()) log << " " << message;
    log << "\n";
}

void apply_thread_cap() {
    const char* env = std::getenv("ACTUKIT_THREADS");
    if (!env || !*env) return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) throw ConfigError(std::string("ACTUKIT_THREADS: expected a positive integer, got '") + env + "'");
    set_thread_cap(static_cast<int>(n));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Actuator design, identification and dynamometer analysis toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config_path, "Run configuration (JSON)")->check(CLI::ExistingFile);
    app.add_option("--output", o.output, "Output directory");
    app.add_option("--seed", o.seed, "Override the configured seed");

    const auto input = [&](CLI::App* c) { c->add_option("--input", o.input, "Input CSV")->check(CLI::ExistingFile); };
    const auto channels = [&](CLI::App* c) {
        c->add_option("--input-channel", o.in_channel, "Input channel name");
        c->add_option("--output-channel", o.out_channel, "Output channel name");
    };
    const auto signal = [&](CLI::App* c) {
        c->add_option("--fs", o.fs, "Sample rate [Hz]");
        c->add_option("--duration", o.duration, "[s]");
        c->add_option("--amplitude", o.amplitude, "Signal amplitude");
        c->add_option("--cutoff", o.cutoff, "Band-limit cutoff [Hz]");
    };

    auto* derive = app.add_subcommand("derive", "Output-referred actuator constants and continuous limits");
    auto* select = app.add_subcommand("select", "Selection metrics and a ratio scan");
    select->add_option("--ratios", o.ratios, "Gear ratios")->delimiter(',');

    auto* sim = app.add_subcommand("sim", "Simulate a dynamometer protocol into a CSV dataset");
    sim->add_option("protocol", o.protocol, "Protocol")
        ->required()
        ->check(CLI::IsMember({"random-input", "thermal-random", "current-random", "gait"}));
    signal(sim);
    sim->add_option("--hold", o.hold, "Hold duration [s]");

    auto* identify = app.add_subcommand("identify", "Fit a model to a dataset");
    identify->add_option("target", o.target, "mech or thermal")->required()->check(CLI::IsMember({"mech", "thermal"}));
    input(identify);
    channels(identify);
    identify->add_option("--f-lo", o.f_lo, "Lowest fitted frequency [Hz]");
    identify->add_option("--f-hi", o.f_hi, "Highest fitted frequency [Hz]");
    identify->add_option("--seg-len", o.seg_len, "Welch segment length [samples]");
    identify->add_option("--ambient", o.T_A, "Ambient temperature [degC]");

    auto* calib = app.add_subcommand("calibrate-thermistor", "Fit the winding resistance-temperature line");
    input(calib);
    channels(calib);
    calib->add_option("--resistances", o.resistances, "Resistances to convert [ohm]")->delimiter(',');

    auto* limits = app.add_subcommand("limits", "Peak-current limits from the thermal network");
    limits->add_option("--durations", o.durations, "Durations [s]")->delimiter(',');
    limits->add_option("--currents", o.currents, "Currents for peak durations [A]")->delimiter(',');

    auto* effmap = app.add_subcommand("efficiency-map", "Dynamometer efficiency sweep and map");
    effmap->add_option("--count", o.count, "Number of conditions");
    effmap->add_option("--torque-limit", o.torque_limit, "[Nm], 0 for continuous torque");
    effmap->add_option("--speed-limit", o.speed_limit, "[rad/s], 0 for max speed");
    effmap->add_option("--tau-bins", o.tau_bins, "Torque bins");
    effmap->add_option("--omega-bins", o.omega_bins, "Speed bins");

    auto* life = app.add_subcommand("lifecycle", "Gait playback with interval tests and wear analytics");
    input(life);
    life->add_option("--hours", o.hours, "Simulated hours");
    life->add_option("--gait-duration", o.duration, "Synthetic gait window [s]");

    auto* bandwidth = app.add_subcommand("bandwidth", "Current-loop half-power bandwidth");
    input(bandwidth);
    channels(bandwidth);
    signal(bandwidth);
    bandwidth->add_option("--seg-len", o.seg_len, "Welch segment length [samples]");

    auto* steps = app.add_subcommand("steps", "Current-loop step rise times");
    input(steps);
    steps->add_option("--channel", o.channel, "Profile channel");
    steps->add_option("--amplitudes", o.amplitudes, "Step amplitudes [A]")->delimiter(',');
    steps->add_option("--trials", o.trials, "Trials per amplitude");
    steps->add_option("--fs", o.fs, "Sample rate [Hz]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    const auto* sub = app.get_subcommands().front();
    std::string command = sub->get_name();
    if (sub == identify) command += "-" + o.target;
    fs::path log_dir = o.output.empty() ? fs::path("out") : fs::path(o.output);
    int code = 0;
    std::string message;
    try {
        apply_thread_cap();
        Run r(o, command == "sim" ? "sim-" + o.protocol : command);
        log_dir = r.out();
        if (sub == derive) cmd_derive(r);
        else if (sub == select) cmd_select(r, o);
        else if (sub == sim) cmd_sim(r, o);
        else if (sub == identify && o.target == "mech") cmd_identify_mech(r, o);
        else if (sub == identify) cmd_identify_thermal(r, o);
        else if (sub == calib) cmd_thermistor(r, o);
        else if (sub == limits) cmd_limits(r, o);
        else if (sub == effmap) cmd_efficiency_map(r, o);
        else if (sub == life) cmd_lifecycle(r, o);
        else if (sub == bandwidth) cmd_bandwidth(r, o);
        else cmd_steps(r, o);
    } catch (const FitError& e) {
        code = 2;
        message = e.what();
        if (e.residual() >= 0.0 && message.find("residual") == std::string::npos)
            message += " (best residual " + fmt(e.residual()) + ")";
    } catch (const Error& e) {
        code = e.is_user_error() ? 1 : 2;
        message = e.what();
    } catch (const std::exception& e) {
        code = 2;
        message = e.what();
    }
    if (code) std::cerr << "error: " << message << "\n";
    append_log(log_dir, command, code, message);
    return code;
}
