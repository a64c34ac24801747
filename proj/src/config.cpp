#include "twistmodel/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "twistmodel/text.hpp"

namespace twistmodel {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

struct RawConfig {
    std::map<std::string, double> geometry;
    std::map<std::string, double> material;
};

const std::map<std::string, int> kGeometryKeys = {
    {"length_mm", 0},         {"outer_radius_mm", 0}, {"wall_thickness_mm", 0},
    {"pitch_mm", 0},          {"fiber_angle_deg", 0}, {"winding_count", 1},
    {"chamber_height_mm", 0}, {"part1_width_mm", 0},
};

const std::map<std::string, int> kMaterialKeys = {
    {"youngs_modulus_kpa", 0},
    {"poisson_ratio", 0},
    {"correction_factor", 0},
};

RawConfig parse_raw(std::istream& in) {
    RawConfig raw;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (auto pos = view.find_first_of(";#"); pos != std::string_view::npos)
            view = view.substr(0, pos);
        view = trim(view);
        if (view.empty()) continue;

        if (view.front() == '[') {
            if (view.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            section = std::string(trim(view.substr(1, view.size() - 2)));
            if (section != "geometry" && section != "material")
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unknown section [" + section + "]");
            continue;
        }

        auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        std::string key(trim(view.substr(0, eq)));
        std::string_view value_text = trim(view.substr(eq + 1));
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": key outside a section");

        const auto& known = section == "geometry" ? kGeometryKeys : kMaterialKeys;
        auto spec = known.find(key);
        if (spec == known.end())
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                              key + "' in [" + section + "]");

        std::optional<double> value;
        if (spec->second == 1) {
            auto i = parse_int(value_text);
            if (i) value = static_cast<double>(*i);
        } else {
            value = parse_double(value_text);
        }
        if (!value || !std::isfinite(*value))
            throw ConfigError("config line " + std::to_string(line_no) + ": invalid value for '" +
                              key + "'");

        auto& bucket = section == "geometry" ? raw.geometry : raw.material;
        if (!bucket.emplace(key, *value).second)
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" +
                              key + "'");
    }
    return raw;
}

ActuatorConfig resolve(const RawConfig& raw) {
    ActuatorConfig cfg;
    auto geo = [&](const char* key, double fallback) {
        auto it = raw.geometry.find(key);
        return it == raw.geometry.end() ? fallback : it->second;
    };
    auto mat = [&](const char* key, double fallback) {
        auto it = raw.material.find(key);
        return it == raw.material.end() ? fallback : it->second;
    };

    ActuatorGeometry& g = cfg.geometry;
    g.length_mm = geo("length_mm", 170.0);
    g.outer_radius_mm = geo("outer_radius_mm", 12.0);
    g.wall_thickness_mm = geo("wall_thickness_mm", 3.0);
    g.pitch_mm = geo("pitch_mm", 4.0);
    g.fiber_angle_rad = geo("fiber_angle_deg", 5.0) * kDegToRad;
    // Derived fallbacks track whatever primary dimensions were overridden.
    g.winding_count = static_cast<int>(
        geo("winding_count", std::floor(g.length_mm / std::max(g.pitch_mm, 1e-9))));
    g.chamber_height_mm =
        geo("chamber_height_mm", g.outer_radius_mm - g.wall_thickness_mm);
    g.part1_width_mm = geo("part1_width_mm", 2.0 * g.outer_radius_mm);

    MaterialModel& m = cfg.material;
    m.youngs_modulus_kpa = mat("youngs_modulus_kpa", 125.0);
    m.poisson_ratio = mat("poisson_ratio", 0.5);
    m.correction_factor = mat("correction_factor", 0.003);

    g.validate();
    m.validate();
    return cfg;
}

}  // namespace

ActuatorConfig default_config() {
    std::istringstream empty;
    return parse_config(empty);
}

ActuatorConfig parse_config(std::istream& in) { return resolve(parse_raw(in)); }

ActuatorConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    return parse_config(in);
}

}  // namespace twistmodel
