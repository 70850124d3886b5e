#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "modkin/core_math.hpp"
#include "modkin/module_kin.hpp"

namespace modkin {

/// Joint vector of the simplified RPRP chain (two stacked modules).
struct SerialJoints4 {
  double theta1 = 0.0;  // rad
  double d2 = 0.0;      // mm
  double theta3 = 0.0;  // rad
  double d4 = 0.0;      // mm
};

/// Joint vector of the simplified RPRPRP chain (three stacked modules).
struct SerialJoints6 {
  double theta1 = 0.0;
  double d2 = 0.0;
  double theta3 = 0.0;
  double d4 = 0.0;
  double theta5 = 0.0;
  double d6 = 0.0;
};

struct HybridGeometry {
  double l2 = 50.0;  // structural offset between the first two modules, mm
  std::vector<ModuleGeometry> modules = std::vector<ModuleGeometry>(2);

  /// `arity` is the expected module count (2 or 3).
  void validate(std::size_t arity) const;
};

/// DH rows of the RPRP chain, base to tip.
std::array<DhRow, 4> dh_rows(const SerialJoints4& j, double l2);
/// DH rows of the RPRPRP chain, base to tip.
std::array<DhRow, 6> dh_rows(const SerialJoints6& j, double l2);

/// End-effector pose of the RPRP chain, from the closed-form entries of
/// A1 A2 A3 A4.
HomTransform fk_rprp(const SerialJoints4& j, const HybridGeometry& g);

/// Inverse of fk_rprp. theta1 comes from the approach (a) column, so the pose
/// is singular when a_x = a_y = 0. Of the two angle branches the one with a
/// non-negative d2 is returned. Throws unreachable_pose when the recovered
/// joints do not reproduce `pose` within 1e-6.
SerialJoints4 ik_rprp(const HomTransform& pose, const HybridGeometry& g);

HomTransform fk_rprprp(const SerialJoints6& j, const HybridGeometry& g);

/// Inverse of fk_rprprp. d6 cannot be separated from d2/d4 by the position
/// equations and must come from the limb sensor of the last module.
SerialJoints6 ik_rprprp(const HomTransform& pose, double d6, const HybridGeometry& g);

/// Alternative d4 expression for the RPRPRP chain that splits the sum over
/// 2 sin(theta3) and 2 cos(theta3) denominators and uses p_z in the second
/// fraction. It disagrees with the elimination result whenever p_x cos(theta1)
/// differs from p_z cos(theta1); kept only so the discrepancy can be reported.
double d4_split_denominator_form(const HomTransform& pose, const SerialJoints6& angles,
                                 double l2);

/// Module actuators (one pair per module, base first) to end-effector pose.
HomTransform hybrid_actuators_fk(std::span<const ActuatorPair> actuators, const HybridGeometry& g);

/// Pose to module actuators. `d6` is required for three-module stacks.
std::vector<ActuatorPair> hybrid_actuators_ik(const HomTransform& pose, std::optional<double> d6,
                                              const HybridGeometry& g,
                                              ModuleBranch branch = ModuleBranch::ascending);

}  // namespace modkin
