#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "modkin/core_math.hpp"
#include "modkin/mobility.hpp"
#include "modkin/parallel_kin.hpp"
#include "modkin/robot_config.hpp"

namespace modkin::service {

// Dispatch from a robot definition to the kinematics of its kind. Angles here
// are radians; the codec converts at the boundary.

struct FkRequest {
  std::vector<double> actuators;  // two per module

  // Parallel only: drive the platform by limb lengths alone and report every
  // assembly mode found. The selected mode is the one nearest `previous`,
  // else `seed`, else the home pose, among those whose actuators fit the
  // limits. `actuators`, when given, only picks each module's branch.
  std::optional<std::array<double, 3>> limb_lengths;
  std::optional<PlatformPose> seed;
  std::optional<PlatformPose> previous;
};

struct FkResult {
  RobotKind kind = RobotKind::module;
  std::vector<double> actuators;
  std::optional<ModuleState> module;   // module robots
  std::optional<HomTransform> pose;    // hybrid (incl. base transform) and parallel
  std::vector<double> serial;          // theta1, d2, theta3, d4[, theta5, d6]
  std::optional<ForwardResult> parallel;
  int selected = -1;                   // solution reported as `pose`
  std::array<LimbState, 3> limbs{};    // parallel, at the selected solution
};

struct IkRequest {
  std::optional<Vec2> tip;           // module
  std::optional<HomTransform> pose;  // hybrid and parallel
  std::optional<double> d6;          // hybrid6 sensor reading, mm
  ModuleBranch branch = ModuleBranch::ascending;
};

struct IkResult {
  RobotKind kind = RobotKind::module;
  std::vector<double> actuators;
  std::vector<double> serial;
  std::array<LimbState, 3> limbs{};
};

FkResult forward(const RobotDefinition& robot, const FkRequest& request);
IkResult inverse(const RobotDefinition& robot, const IkRequest& request);

/// Mobility of the shipped topology matching the robot kind.
DofReport robot_dof(const RobotDefinition& robot);

/// Throws Error(actuator_limit) naming the first actuator outside its
/// configured interval.
void check_actuator_limits(const RobotDefinition& robot, std::span<const double> actuators);

}  // namespace modkin::service
