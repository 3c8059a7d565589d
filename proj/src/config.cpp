#include "actukit/config.hpp"

#include "actukit/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>

namespace actukit::config {

namespace {

std::string join(const std::string& path, std::string_view key) { return path + "/" + std::string(key); }

const Json* find(const Json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

void only_keys(const Json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [k, v] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || k == a;
        if (!ok) throw ConfigError(join(path, k) + ": unknown field");
    }
}

void check_schema(const Json& obj, const std::string& path, bool required) {
    const Json* s = find(obj, "schema");
    if (!s) {
        if (required) throw ConfigError(join(path, "schema") + ": required field missing");
        return;
    }
    if (!s->is_number_integer() || s->get<int>() != kSchemaVersion)
        throw ConfigError(join(path, "schema") + ": unsupported schema version (expected 1)");
}

Json read_json(const std::filesystem::path& file, const std::string& path) {
    std::ifstream in(file);
    if (!in) throw ConfigError(path + ": cannot open '" + file.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path + ": " + file.string() + ": " + e.what());
    }
}

Json inline_file(const Json& j, const std::string& path, const std::filesystem::path& base_dir) {
    if (!j.is_string()) return j;
    const std::filesystem::path p = base_dir / j.get<std::string>();
    return read_json(p, path);
}

dyno::VirtualActuator dyno_from_json(const Json& j, const std::string& path, const ActuatorSpec& spec,
                                     const thermal::ThermalNetwork& net) {
    auto a = dyno::VirtualActuator::from_spec(spec, net);
    if (j.is_null()) return a;
    require_object(j, path);
    only_keys(j, path,
              {"J_true", "B_true", "backlash_halfwidth", "current_loop_tau", "encoder_noise_sd", "velocity_noise_sd",
               "torque_noise_sd", "current_noise_sd", "temperature_noise_sd", "flex_stiffness", "velocity_loop_tau",
               "standby_power", "bus_voltage", "max_current", "efficiency_multiplier"});
    a.J_true = number(j, path, "J_true", a.J_true);
    a.B_true = number(j, path, "B_true", a.B_true);
    a.backlash_halfwidth = number(j, path, "backlash_halfwidth", a.backlash_halfwidth);
    a.current_loop_tau = number(j, path, "current_loop_tau", a.current_loop_tau);
    a.encoder_noise_sd = number(j, path, "encoder_noise_sd", a.encoder_noise_sd);
    a.velocity_noise_sd = number(j, path, "velocity_noise_sd", a.velocity_noise_sd);
    a.torque_noise_sd = number(j, path, "torque_noise_sd", a.torque_noise_sd);
    a.current_noise_sd = number(j, path, "current_noise_sd", a.current_noise_sd);
    a.temperature_noise_sd = number(j, path, "temperature_noise_sd", a.temperature_noise_sd);
    a.flex_stiffness = number(j, path, "flex_stiffness", a.flex_stiffness);
    a.velocity_loop_tau = number(j, path, "velocity_loop_tau", a.velocity_loop_tau);
    a.standby_power = number(j, path, "standby_power", a.standby_power);
    a.bus_voltage = number(j, path, "bus_voltage", a.bus_voltage);
    a.max_current = number(j, path, "max_current", a.max_current);
    a.efficiency_multiplier = number(j, path, "efficiency_multiplier", a.efficiency_multiplier);
    try {
        a.validate();
    } catch (const Error& e) {
        throw ConfigError(path + ": " + e.message());
    }
    return a;
}

dyno::WearModel wear_from_json(const Json& j, const std::string& path) {
    dyno::WearModel w;
    if (j.is_null()) return w;
    require_object(j, path);
    only_keys(j, path, {"backlash_rate", "efficiency"});
    w.backlash_rate = number(j, path, "backlash_rate", 0.0);
    if (const Json* e = find(j, "efficiency")) {
        const std::string ep = join(path, "efficiency");
        require_object(*e, ep);
        only_keys(*e, ep, {"drop_fraction", "drop_hours", "recover_start", "recover_end", "final_fraction"});
        auto& f = w.efficiency;
        f.drop_fraction = number(*e, ep, "drop_fraction", f.drop_fraction);
        f.drop_hours = number(*e, ep, "drop_hours", f.drop_hours);
        f.recover_start = number(*e, ep, "recover_start", f.recover_start);
        f.recover_end = number(*e, ep, "recover_end", f.recover_end);
        f.final_fraction = number(*e, ep, "final_fraction", f.final_fraction);
        if (!(f.drop_fraction >= 0.0 && f.drop_fraction < 1.0)) throw ConfigError(ep + "/drop_fraction: must be in [0, 1)");
        if (!(f.final_fraction >= 0.0 && f.final_fraction < 1.0))
            throw ConfigError(ep + "/final_fraction: must be in [0, 1)");
        if (!(f.recover_end > f.recover_start)) throw ConfigError(ep + "/recover_end: must exceed recover_start");
    }
    return w;
}

} // namespace

double number(const Json& obj, const std::string& path, const char* key, std::optional<double> fallback) {
    const Json* v = find(obj, key);
    if (!v) {
        if (fallback) return *fallback;
        throw ConfigError(join(path, key) + ": required field missing");
    }
    if (!v->is_number()) throw ConfigError(join(path, key) + ": expected a number");
    return v->get<double>();
}

std::int64_t integer(const Json& obj, const std::string& path, const char* key, std::optional<std::int64_t> fallback) {
    const Json* v = find(obj, key);
    if (!v) {
        if (fallback) return *fallback;
        throw ConfigError(join(path, key) + ": required field missing");
    }
    if (!v->is_number_integer()) throw ConfigError(join(path, key) + ": expected an integer");
    return v->get<std::int64_t>();
}

std::string text(const Json& obj, const std::string& path, const char* key, std::optional<std::string> fallback) {
    const Json* v = find(obj, key);
    if (!v) {
        if (fallback) return *fallback;
        throw ConfigError(join(path, key) + ": required field missing");
    }
    if (!v->is_string()) throw ConfigError(join(path, key) + ": expected a string");
    return v->get<std::string>();
}

std::vector<double> numbers(const Json& obj, const std::string& path, const char* key,
                            std::optional<std::vector<double>> fallback) {
    const Json* v = find(obj, key);
    if (!v) {
        if (fallback) return *fallback;
        throw ConfigError(join(path, key) + ": required field missing");
    }
    if (!v->is_array()) throw ConfigError(join(path, key) + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number()) throw ConfigError(join(path, key) + "/" + std::to_string(i) + ": expected a number");
        out.push_back((*v)[i].get<double>());
    }
    return out;
}

MotorParams motor_from_json(const Json& j, const std::string& path, const std::filesystem::path& base_dir) {
    if (j.is_string() && j.get<std::string>() == "ri50") return MotorParams::ri50();
    const Json doc = inline_file(j, path, base_dir);
    require_object(doc, path);
    check_schema(doc, path, j.is_string());
    only_keys(doc, path, {"schema", "R_phi", "L_e", "K_T", "K_B", "J_m", "mass", "winding_style", "T_max", "T_ambient"});
    MotorParams m;
    m.R_phi = number(doc, path, "R_phi");
    m.L_e = number(doc, path, "L_e");
    m.K_T = number(doc, path, "K_T");
    m.K_B = number(doc, path, "K_B");
    m.J_m = number(doc, path, "J_m");
    m.mass = number(doc, path, "mass");
    m.T_max = number(doc, path, "T_max", m.T_max);
    m.T_ambient = number(doc, path, "T_ambient", m.T_ambient);
    try {
        m.winding_style = winding_style_from_string(text(doc, path, "winding_style", "Wye"));
        m.validate();
    } catch (const Error& e) {
        throw ConfigError(path + ": " + e.message());
    }
    return m;
}

TransmissionSpec transmission_from_json(const Json& j, const std::string& path) {
    require_object(j, path);
    only_keys(j, path, {"schema", "ratio", "style"});
    check_schema(j, path, false);
    TransmissionSpec t;
    t.ratio = number(j, path, "ratio");
    try {
        t.style = transmission_style_from_string(text(j, path, "style", "Planetary"));
        t.validate();
    } catch (const Error& e) {
        throw ConfigError(path + ": " + e.message());
    }
    return t;
}

thermal::ThermalNetwork thermal_from_json(const Json& j, const std::string& path) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "fan") return thermal::ThermalNetwork::fan();
        if (s == "nofan") return thermal::ThermalNetwork::nofan();
        throw ConfigError(path + ": unknown preset '" + s + "' (fan, nofan)");
    }
    require_object(j, path);
    only_keys(j, path, {"schema", "R_WH", "R_HA", "C_fast", "C_slow", "label"});
    check_schema(j, path, false);
    thermal::ThermalNetwork n;
    n.R_WH = number(j, path, "R_WH");
    n.R_HA = number(j, path, "R_HA");
    n.C_fast = number(j, path, "C_fast");
    n.C_slow = number(j, path, "C_slow");
    try {
        n.label = thermal::network_label_from_string(text(j, path, "label", "Custom"));
        n.validate();
    } catch (const Error& e) {
        throw ConfigError(path + ": " + e.message());
    }
    return n;
}

RunConfig parse(const Json& doc, const std::filesystem::path& base_dir) {
    const std::string root;
    require_object(doc, "/");
    only_keys(doc, root, {"schema", "seed", "output_dir", "actuator", "thermal", "dyno", "wear", "experiment"});
    check_schema(doc, root, true);

    RunConfig c;
    c.source = doc;
    const std::int64_t seed = integer(doc, root, "seed", 0);
    if (seed < 0) throw ConfigError("/seed: must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    c.output_dir = text(doc, root, "output_dir", "out");

    if (const Json* a = find(doc, "actuator")) {
        const std::string ap = "/actuator";
        require_object(*a, ap);
        only_keys(*a, ap, {"motor", "transmission", "max_speed"});
        if (!find(*a, "motor")) throw ConfigError(ap + "/motor: required field missing");
        if (!find(*a, "transmission")) throw ConfigError(ap + "/transmission: required field missing");
        const MotorParams m = motor_from_json((*a)["motor"], ap + "/motor", base_dir);
        if ((*a)["motor"].is_string() && (*a)["motor"].get<std::string>() != "ri50")
            c.source["actuator"]["motor"] = to_json(m);
        const TransmissionSpec t = transmission_from_json((*a)["transmission"], ap + "/transmission");
        c.actuator = derive_actuator(m, t);
        c.actuator.max_speed = number(*a, ap, "max_speed", std::numeric_limits<double>::infinity());
        if (!(c.actuator.max_speed > 0.0)) throw ConfigError(ap + "/max_speed: must be > 0");
        c.has_actuator = true;
    } else {
        c.actuator = derive_actuator(MotorParams::ri50(), {7.5, TransmissionStyle::Planetary});
    }

    if (const Json* t = find(doc, "thermal")) {
        c.thermal = thermal_from_json(*t, "/thermal");
        c.has_thermal = true;
    }

    const Json* d = find(doc, "dyno");
    c.dyno = dyno_from_json(d ? *d : Json(), "/dyno", c.actuator, c.thermal);
    const Json* w = find(doc, "wear");
    c.wear = wear_from_json(w ? *w : Json(), "/wear");
    if (const Json* e = find(doc, "experiment")) {
        require_object(*e, "/experiment");
        c.experiment = *e;
    }
    c.hash = hash_json(c.source);
    return c;
}

RunConfig load(const std::filesystem::path& file) {
    const Json doc = read_json(file, "/");
    return parse(doc, file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
}

Json to_json(const MotorParams& m) {
    return Json{{"schema", kSchemaVersion},
                {"R_phi", m.R_phi},
                {"L_e", m.L_e},
                {"K_T", m.K_T},
                {"K_B", m.K_B},
                {"J_m", m.J_m},
                {"mass", m.mass},
                {"winding_style", std::string(to_string(m.winding_style))},
                {"T_max", m.T_max},
                {"T_ambient", m.T_ambient}};
}

Json to_json(const ActuatorSpec& a) {
    Json j{{"motor", to_json(a.motor)},
           {"transmission", {{"ratio", a.transmission.ratio}, {"style", std::string(to_string(a.transmission.style))}}},
           {"K_Ta", a.K_Ta},
           {"K_Ma", a.K_Ma},
           {"J_a_pred", a.J_a_pred}};
    if (std::isfinite(a.max_speed)) j["max_speed"] = a.max_speed;
    return j;
}

Json to_json(const thermal::ThermalNetwork& n) {
    return Json{{"R_WH", n.R_WH},
                {"R_HA", n.R_HA},
                {"C_fast", n.C_fast},
                {"C_slow", n.C_slow},
                {"label", std::string(thermal::to_string(n.label))}};
}

std::string hash_json(const Json& j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace actukit::config
