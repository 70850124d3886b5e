#include "modkin/hybrid_kin.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "modkin/errors.hpp"

namespace modkin {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kResidualTol = 1e-6;
// |sin theta3| (resp. |cos theta3|) below this makes the theta1 formula degenerate.
constexpr double kSingularTol = 1e-9;

void check_residual(const HomTransform& target, const HomTransform& reached) {
  const double residual = max_abs_diff(target, reached);
  if (!(residual <= kResidualTol)) {
    std::ostringstream msg;
    msg << "pose not reachable by the chain (residual " << residual << ")";
    throw Error(ErrorCode::unreachable_pose, msg.str());
  }
}

SerialJoints4 solve_rprp(const HomTransform& pose, double l2, double theta1) {
  const Vec3 a = pose.a();
  const Vec3& p = pose.position();
  const double s1 = std::sin(theta1);
  const double c1 = std::cos(theta1);
  SerialJoints4 j;
  j.theta1 = theta1;
  j.theta3 = atan2q(a.z(), a.y() * s1 + a.x() * c1);
  const double s3 = std::sin(j.theta3);
  const double c3 = std::cos(j.theta3);
  j.d2 = p.x() * s1 - p.y() * c1;
  j.d4 = (p.z() - l2) * s3 - (-p.y() * s1 - p.x() * c1) * c3;
  return j;
}

SerialJoints6 solve_rprprp(const HomTransform& pose, double d6, double l2, double theta1) {
  const Vec3 n = pose.n();
  const Vec3 o = pose.o();
  const Vec3 a = pose.a();
  const Vec3& p = pose.position();
  const double s1 = std::sin(theta1);
  const double c1 = std::cos(theta1);
  SerialJoints6 j;
  j.theta1 = theta1;
  j.theta3 = atan2q(o.x() * c1 + o.y() * s1, -o.z());
  j.theta5 = atan2q(a.y() * c1 - a.x() * s1, n.x() * s1 - n.y() * c1);
  j.d6 = d6;
  const double s3 = std::sin(j.theta3);
  const double c3 = std::cos(j.theta3);
  const double s5 = std::sin(j.theta5);
  const double c5 = std::cos(j.theta5);
  j.d2 = d6 * s5 + p.x() * s1 - p.y() * c1;
  // (A1^-1 T) gives p_z - L2 = s3 (d4 + d6 c5) and p_x c1 + p_y s1 = c3 (d4 + d6 c5);
  // weighting by s3 and c3 combines both without a division.
  j.d4 = (p.z() - l2) * s3 + (p.x() * c1 + p.y() * s1) * c3 - d6 * c5;
  return j;
}

}  // namespace

void HybridGeometry::validate(std::size_t arity) const {
  if (!(std::isfinite(l2) && l2 >= 0.0)) {
    throw Error(ErrorCode::validation_error, "L2 offset must be non-negative", "l2");
  }
  if (modules.size() != arity) {
    throw Error(ErrorCode::validation_error,
                "expected " + std::to_string(arity) + " modules, got " +
                    std::to_string(modules.size()),
                "modules");
  }
  for (std::size_t i = 0; i < modules.size(); ++i) {
    try {
      modules[i].validate();
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), "modules[" + std::to_string(i) + "]." + e.field());
    }
  }
}

std::array<DhRow, 4> dh_rows(const SerialJoints4& j, double l2) {
  return {{
      {0.0, j.theta1, 0.0, kHalfPi},
      {j.d2, kHalfPi, l2, 0.0},
      {0.0, j.theta3, 0.0, kHalfPi},
      {j.d4, 0.0, 0.0, 0.0},
  }};
}

std::array<DhRow, 6> dh_rows(const SerialJoints6& j, double l2) {
  return {{
      {0.0, j.theta1, 0.0, kHalfPi},
      {j.d2, kHalfPi, l2, 0.0},
      {0.0, j.theta3, 0.0, kHalfPi},
      {j.d4, kHalfPi, 0.0, kHalfPi},
      {0.0, j.theta5, 0.0, -kHalfPi},
      {j.d6, 0.0, 0.0, 0.0},
  }};
}

HomTransform fk_rprp(const SerialJoints4& j, const HybridGeometry& g) {
  const double s1 = std::sin(j.theta1);
  const double c1 = std::cos(j.theta1);
  const double s3 = std::sin(j.theta3);
  const double c3 = std::cos(j.theta3);
  Mat3 r;
  r << -c1 * s3, s1, c1 * c3,
       -s1 * s3, -c1, s1 * c3,
       c3, 0.0, s3;
  const Vec3 p(j.d4 * c1 * c3 + j.d2 * s1,
               j.d4 * s1 * c3 - j.d2 * c1,
               j.d4 * s3 + g.l2);
  return {r, p};
}

SerialJoints4 ik_rprp(const HomTransform& pose, const HybridGeometry& g) {
  const Vec3 a = pose.a();
  if (std::hypot(a.x(), a.y()) < kSingularTol) {
    throw Error(ErrorCode::singular_orientation,
                "approach vector is vertical (a_x = a_y = 0): theta1 undefined");
  }
  SerialJoints4 j = solve_rprp(pose, g.l2, atan2q(a.y(), a.x()));
  if (j.d2 < -kSingularTol) {
    j = solve_rprp(pose, g.l2, wrap_angle(j.theta1 + std::numbers::pi));
  }
  check_residual(pose, fk_rprp(j, g));
  return j;
}

HomTransform fk_rprprp(const SerialJoints6& j, const HybridGeometry& g) {
  const double s1 = std::sin(j.theta1);
  const double c1 = std::cos(j.theta1);
  const double s3 = std::sin(j.theta3);
  const double c3 = std::cos(j.theta3);
  const double s5 = std::sin(j.theta5);
  const double c5 = std::cos(j.theta5);
  Mat3 r;
  r << c1 * c3 * s5 + s1 * c5, c1 * s3, c1 * c3 * c5 - s1 * s5,
       s1 * c3 * s5 - c1 * c5, s1 * s3, c1 * s5 + s1 * c3 * c5,
       s3 * s5, -c3, s3 * c5;
  const double reach = j.d6 * c5 + j.d4;
  const double lateral = j.d2 - j.d6 * s5;
  const Vec3 p(s1 * lateral + c1 * c3 * reach,
               s1 * c3 * reach - c1 * lateral,
               s3 * reach + g.l2);
  return {r, p};
}

SerialJoints6 ik_rprprp(const HomTransform& pose, double d6, const HybridGeometry& g) {
  const Vec3 o = pose.o();
  if (std::hypot(o.x(), o.y()) < kSingularTol) {
    throw Error(ErrorCode::singular_orientation,
                "orientation singular (o_x = o_y = 0, sin(theta3) = 0): theta1 undefined");
  }
  SerialJoints6 j = solve_rprprp(pose, d6, g.l2, atan2q(o.y(), o.x()));
  // The theta1 + pi branch negates both d2 and d4.
  if (j.d2 + j.d4 < -kSingularTol) {
    j = solve_rprprp(pose, d6, g.l2, wrap_angle(j.theta1 + std::numbers::pi));
  }
  check_residual(pose, fk_rprprp(j, g));
  return j;
}

double d4_split_denominator_form(const HomTransform& pose, const SerialJoints6& angles,
                                 double l2) {
  const Vec3& p = pose.position();
  const double s1 = std::sin(angles.theta1);
  const double c1 = std::cos(angles.theta1);
  const double s3 = std::sin(angles.theta3);
  const double c3 = std::cos(angles.theta3);
  const double c5 = std::cos(angles.theta5);
  return (p.z() - l2) / (2.0 * s3) - angles.d6 * c5 + (p.y() * s1 + p.z() * c1) / (2.0 * c3);
}

HomTransform hybrid_actuators_fk(std::span<const ActuatorPair> actuators,
                                 const HybridGeometry& g) {
  if (actuators.size() != g.modules.size()) {
    throw Error(ErrorCode::invalid_argument,
                "expected " + std::to_string(g.modules.size()) + " actuator pairs, got " +
                    std::to_string(actuators.size()));
  }
  std::vector<SerialCoords> serial;
  serial.reserve(actuators.size());
  for (std::size_t i = 0; i < actuators.size(); ++i) {
    serial.push_back(actuators_to_serial(actuators[i], g.modules[i]));
  }
  if (serial.size() == 2) {
    return fk_rprp({serial[0].theta, serial[0].d, serial[1].theta, serial[1].d}, g);
  }
  if (serial.size() == 3) {
    return fk_rprprp({serial[0].theta, serial[0].d, serial[1].theta, serial[1].d,
                      serial[2].theta, serial[2].d},
                     g);
  }
  throw Error(ErrorCode::invalid_argument, "hybrid stacks have two or three modules");
}

std::vector<ActuatorPair> hybrid_actuators_ik(const HomTransform& pose, std::optional<double> d6,
                                              const HybridGeometry& g, ModuleBranch branch) {
  std::vector<SerialCoords> serial;
  if (g.modules.size() == 2) {
    const SerialJoints4 j = ik_rprp(pose, g);
    serial = {{j.theta1, j.d2}, {j.theta3, j.d4}};
  } else if (g.modules.size() == 3) {
    if (!d6) {
      throw Error(ErrorCode::invalid_argument,
                  "three-module inverse kinematics needs the measured d6 limb length");
    }
    const SerialJoints6 j = ik_rprprp(pose, *d6, g);
    serial = {{j.theta1, j.d2}, {j.theta3, j.d4}, {j.theta5, j.d6}};
  } else {
    throw Error(ErrorCode::invalid_argument, "hybrid stacks have two or three modules");
  }
  std::vector<ActuatorPair> out;
  out.reserve(serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    out.push_back(serial_to_actuators(serial[i], g.modules[i], branch));
  }
  return out;
}

}  // namespace modkin
