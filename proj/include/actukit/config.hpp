#pragma once

#include "actukit/core.hpp"
#include "actukit/dyno.hpp"
#include "actukit/thermal.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace actukit::config {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Validated run configuration. Sections that were absent keep their
/// defaults and report `has_* == false`.
struct RunConfig {
    int schema = kSchemaVersion;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";

    bool has_actuator = false;
    ActuatorSpec actuator;
    bool has_thermal = false;
    thermal::ThermalNetwork thermal = thermal::ThermalNetwork::fan();
    dyno::VirtualActuator dyno;
    dyno::WearModel wear;
    Json experiment = Json::object();

    Json source;      ///< config as read, with referenced parameter files inlined
    std::string hash; ///< FNV-1a 64 of the canonical dump, 16 hex digits
};

/// Field errors throw ConfigError naming the JSON path, e.g. `/actuator/motor/R_phi`.
RunConfig load(const std::filesystem::path& file);
RunConfig parse(const Json& doc, const std::filesystem::path& base_dir = ".");

/// Motor parameter document (`"schema": 1` plus MotorParams field names),
/// a path to one, or the preset name "ri50".
MotorParams motor_from_json(const Json& j, const std::string& path, const std::filesystem::path& base_dir);
TransmissionSpec transmission_from_json(const Json& j, const std::string& path);
thermal::ThermalNetwork thermal_from_json(const Json& j, const std::string& path);

Json to_json(const MotorParams& m);
Json to_json(const ActuatorSpec& a);
Json to_json(const thermal::ThermalNetwork& n);

std::string hash_json(const Json& j);

/// Typed accessors for free-form sections; errors carry `path/key`.
double number(const Json& obj, const std::string& path, const char* key, std::optional<double> fallback = {});
std::int64_t integer(const Json& obj, const std::string& path, const char* key,
                     std::optional<std::int64_t> fallback = {});
std::string text(const Json& obj, const std::string& path, const char* key,
                 std::optional<std::string> fallback = {});
std::vector<double> numbers(const Json& obj, const std::string& path, const char* key,
                            std::optional<std::vector<double>> fallback = {});

} // namespace actukit::config
