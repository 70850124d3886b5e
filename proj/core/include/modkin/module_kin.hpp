#pragma once

#include "modkin/core_math.hpp"

namespace modkin {

/// Constants of one 2-DOF five-bar module. Two RR chains with four links of
/// length `a` share a base axis at `origin`; their common platform joint
/// carries a passive RP limb extended by `c` to the end effector.
struct ModuleGeometry {
  double a = 100.0038078;                   // five-bar link length, mm
  double c = 50.0;                          // end-effector extension, mm
  double theta_diff_max = deg_to_rad(170.0);  // max |theta_r2 - theta_r1|, rad
  Vec2 origin = Vec2::Zero();               // module base point, mm

  /// Throws Error(validation_error) naming the offending field.
  void validate() const;

  /// Shortest total limb length l_t (at the fold limit).
  double min_reach() const;
  /// Longest total limb length l_t (actuators coincident): 2a + c.
  double max_reach() const { return 2.0 * a + c; }
};

struct ActuatorPair {
  double theta_r1 = 0.0;  // rad
  double theta_r2 = 0.0;  // rad
};

/// Simplified serial coordinates of one module: RP-limb angle and total limb
/// length (including c), as used by the hybrid DH chains and parallel limbs.
struct SerialCoords {
  double theta = 0.0;  // rad
  double d = 0.0;      // mm
};

struct ModuleState {
  double theta_r1 = 0.0;
  double theta_r2 = 0.0;
  double theta = 0.0;  // RP-limb angle, (theta_r1 + theta_r2) / 2
  double l_t = 0.0;    // total limb length incl. c
  Vec2 tip = Vec2::Zero();
};

/// Which root of the separation arccos is returned by the inverse maps.
/// `ascending` gives theta_r2 >= theta_r1.
enum class ModuleBranch { ascending, descending };

ModuleState module_fk(double theta_r1, double theta_r2, const ModuleGeometry& geom);

ActuatorPair module_ik(const Vec2& tip, const ModuleGeometry& geom,
                       ModuleBranch branch = ModuleBranch::ascending);

ActuatorPair serial_to_actuators(const SerialCoords& serial, const ModuleGeometry& geom,
                                 ModuleBranch branch = ModuleBranch::ascending);

SerialCoords actuators_to_serial(const ActuatorPair& actuators, const ModuleGeometry& geom);

}  // namespace modkin
