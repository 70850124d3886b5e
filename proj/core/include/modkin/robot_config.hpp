#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modkin/hybrid_kin.hpp"
#include "modkin/module_kin.hpp"
#include "modkin/parallel_kin.hpp"

namespace modkin {

// Robot definitions are documents: they keep the authored boundary units
// (millimetres, degrees) so that save/load round-trips are exact. Kinematic
// geometry in radians is derived from them on demand.

enum class RobotKind { module, hybrid4, hybrid6, parallel };

std::string_view to_string(RobotKind kind);
std::optional<RobotKind> robot_kind_from_string(std::string_view text);

/// Module count of a configuration (1, 2, 3, 3).
std::size_t module_count(RobotKind kind);
/// Two rotary actuators per module.
inline std::size_t actuator_count(RobotKind kind) { return 2 * module_count(kind); }

struct ModuleSpec {
  double a_mm = 100.0038078;
  double c_mm = 50.0;
  double theta_diff_max_deg = 170.0;
  std::array<double, 2> origin_mm{0.0, 0.0};

  bool operator==(const ModuleSpec&) const = default;
};

struct ActuatorLimit {
  double min_deg = -180.0;
  double max_deg = 180.0;

  bool contains(double deg) const { return deg >= min_deg && deg <= max_deg; }
  bool operator==(const ActuatorLimit&) const = default;
};

struct ParallelSpec {
  std::array<std::array<double, 3>, 3> base_anchors_mm{};
  std::array<std::array<double, 3>, 3> base_axes{};
  std::array<std::array<double, 3>, 3> platform_anchors_mm{};
  double edge_mm = 150.0;

  /// Symmetric layout on a base circle (see ParallelGeometry::symmetric).
  static ParallelSpec symmetric(double base_radius_mm, double edge_mm);

  bool operator==(const ParallelSpec&) const = default;
};

inline constexpr int kSchemaVersion = 1;

struct RobotDefinition {
  int schema_version = kSchemaVersion;
  std::string name;
  RobotKind kind = RobotKind::module;
  std::vector<ModuleSpec> modules;
  double l2_mm = 50.0;
  /// Mount pre-transform applied in front of the hybrid chain (e.g. wall
  /// mounting), row-major.
  std::array<double, 16> base_transform{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  std::optional<ParallelSpec> parallel;
  std::vector<ActuatorLimit> actuator_limits_deg;

  bool operator==(const RobotDefinition&) const = default;
};

/// Parses, applies defaults and validates. Errors: parse_error for malformed
/// JSON or wrong value types, validation_error (with field()) for violated
/// invariants.
RobotDefinition load_definition(std::string_view text);

/// Canonical JSON form with every field explicit.
std::string save_definition(const RobotDefinition& def);

/// Throws Error(validation_error) naming the first offending field.
void validate_definition(const RobotDefinition& def);

/// A file holding either one definition or {"robots": [...]}.
std::vector<RobotDefinition> load_catalog(const std::filesystem::path& path);

/// paper-module, paper-hybrid4, paper-hybrid6, paper-parallel.
std::vector<RobotDefinition> builtin_presets();

ModuleGeometry module_geometry(const ModuleSpec& spec);
HybridGeometry hybrid_geometry(const RobotDefinition& def);
ParallelGeometry parallel_geometry(const RobotDefinition& def);
HomTransform base_transform(const RobotDefinition& def);

}  // namespace modkin
