#pragma once

#include <filesystem>
#include <istream>

#include "twistmodel/actuator.hpp"

namespace twistmodel {

struct ActuatorConfig {
    ActuatorGeometry geometry;
    MaterialModel material;
};

/// Defaults matching the built actuator; winding_count, chamber_height_mm
/// and part1_width_mm are derived from the primary dimensions.
ActuatorConfig default_config();

/// Parses an INI-style config with [geometry] and [material] sections.
/// Missing keys fall back to defaults (derived keys track overridden
/// primary dimensions); unknown or duplicate keys are rejected. Throws
/// ConfigError on any problem, including violated parameter invariants.
ActuatorConfig parse_config(std::istream& in);

/// Loads and parses a config file; throws ConfigError when unreadable.
ActuatorConfig load_config(const std::filesystem::path& path);

}  // namespace twistmodel
