#include "modkin/module_kin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "modkin/errors.hpp"

namespace modkin {

namespace {

// Slack allowed on the arccos argument before a length counts as unreachable.
constexpr double kReachSlack = 1e-9;

void check_separation(double theta_r1, double theta_r2, const ModuleGeometry& geom) {
  const double separation = std::abs(theta_r2 - theta_r1);
  if (!(separation <= geom.theta_diff_max)) {
    std::ostringstream msg;
    msg << "actuator separation " << rad_to_deg(separation) << " deg exceeds fold limit "
        << rad_to_deg(geom.theta_diff_max) << " deg";
    throw Error(ErrorCode::actuator_separation, msg.str());
  }
}

// Half of the actuator separation for a total limb length l_t.
double half_separation(double l_t, const ModuleGeometry& geom) {
  const double lo = geom.min_reach();
  const double hi = geom.max_reach();
  if (!(l_t >= lo - kReachSlack && l_t <= hi + kReachSlack)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "limb length " << l_t << " mm outside module workspace [" << lo << ", " << hi
        << "] mm: ";
    if (l_t > hi) {
      msg << "beyond the outer reach 2a + c = " << hi << " mm";
    } else {
      msg << "inside the inner reach 2a cos(fold/2) + c = " << lo << " mm";
    }
    throw Error(ErrorCode::out_of_workspace, msg.str());
  }
  const double ratio = std::clamp((l_t - geom.c) / (2.0 * geom.a), -1.0, 1.0);
  return std::acos(ratio);
}

}  // namespace

void ModuleGeometry::validate() const {
  if (!(std::isfinite(a) && a > 0.0)) {
    throw Error(ErrorCode::validation_error, "link length must be positive", "a");
  }
  if (!(std::isfinite(c) && c >= 0.0)) {
    throw Error(ErrorCode::validation_error, "extension must be non-negative", "c");
  }
  if (!(theta_diff_max > 0.0 && theta_diff_max < std::numbers::pi)) {
    throw Error(ErrorCode::validation_error, "fold limit must lie in (0, 180) deg",
                "theta_diff_max");
  }
  if (!origin.allFinite()) {
    throw Error(ErrorCode::validation_error, "origin must be finite", "origin");
  }
}

double ModuleGeometry::min_reach() const {
  return 2.0 * a * std::cos(theta_diff_max / 2.0) + c;
}

ModuleState module_fk(double theta_r1, double theta_r2, const ModuleGeometry& geom) {
  check_separation(theta_r1, theta_r2, geom);
  ModuleState s;
  s.theta_r1 = theta_r1;
  s.theta_r2 = theta_r2;
  s.theta = (theta_r1 + theta_r2) / 2.0;
  s.l_t = 2.0 * geom.a * std::cos((theta_r2 - theta_r1) / 2.0) + geom.c;
  s.tip = geom.origin + s.l_t * Vec2(std::cos(s.theta), std::sin(s.theta));
  return s;
}

ActuatorPair module_ik(const Vec2& tip, const ModuleGeometry& geom, ModuleBranch branch) {
  const Vec2 rel = tip - geom.origin;
  const double l_t = rel.norm();
  // Workspace check first so a tip at the origin reports the annulus bound.
  half_separation(l_t, geom);
  return serial_to_actuators({atan2q(rel.y(), rel.x()), l_t}, geom, branch);
}

ActuatorPair serial_to_actuators(const SerialCoords& serial, const ModuleGeometry& geom,
                                 ModuleBranch branch) {
  double half = half_separation(serial.d, geom);
  if (branch == ModuleBranch::descending) half = -half;
  return {serial.theta - half, serial.theta + half};
}

SerialCoords actuators_to_serial(const ActuatorPair& actuators, const ModuleGeometry& geom) {
  const ModuleState s = module_fk(actuators.theta_r1, actuators.theta_r2, geom);
  return {s.theta, s.l_t};
}

}  // namespace modkin
