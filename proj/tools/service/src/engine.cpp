#include "modkin/service/engine.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "modkin/errors.hpp"
#include "modkin/hybrid_kin.hpp"

namespace modkin::service {

namespace {

constexpr double kLimitSlackDeg = 1e-9;

void check_count(const RobotDefinition& robot, std::size_t got) {
  const std::size_t want = actuator_count(robot.kind);
  if (got != want) {
    throw Error(ErrorCode::invalid_argument,
                std::string(to_string(robot.kind)) + " robots take " + std::to_string(want) +
                    " actuator values, got " + std::to_string(got),
                "actuators");
  }
}

std::vector<ActuatorPair> pairs_of(std::span<const double> actuators) {
  std::vector<ActuatorPair> out;
  for (std::size_t i = 0; i + 1 < actuators.size(); i += 2) {
    out.push_back({actuators[i], actuators[i + 1]});
  }
  return out;
}

void append(std::vector<double>& flat, const ActuatorPair& p) {
  flat.push_back(p.theta_r1);
  flat.push_back(p.theta_r2);
}

// Shift a pair by whole turns so both values fall inside the limits of
// actuators `first` and `first + 1`, when such a shift exists.
ActuatorPair fit_to_limits(const RobotDefinition& robot, std::size_t first, ActuatorPair p) {
  const auto inside = [&](const ActuatorPair& c) {
    const auto& l1 = robot.actuator_limits_deg.at(first);
    const auto& l2 = robot.actuator_limits_deg.at(first + 1);
    return l1.contains(rad_to_deg(c.theta_r1)) && l2.contains(rad_to_deg(c.theta_r2));
  };
  if (inside(p)) return p;
  for (int k : {-1, 1, -2, 2}) {
    const double shift = 2.0 * std::numbers::pi * k;
    const ActuatorPair c{p.theta_r1 + shift, p.theta_r2 + shift};
    if (inside(c)) return c;
  }
  return p;
}

ModuleBranch branch_of(const ActuatorPair& p) {
  return p.theta_r2 >= p.theta_r1 ? ModuleBranch::ascending : ModuleBranch::descending;
}

FkResult forward_parallel(const RobotDefinition& robot, const FkRequest& request) {
  const ParallelGeometry g = parallel_geometry(robot);
  FkResult out;
  out.kind = robot.kind;

  std::array<double, 3> q_bar{};
  std::optional<std::array<double, 3>> q;
  const auto pairs = pairs_of(request.actuators);
  if (request.limb_lengths) {
    q_bar = *request.limb_lengths;
  } else {
    q.emplace();
    for (std::size_t i = 0; i < 3; ++i) {
      const SerialCoords s = actuators_to_serial(pairs[i], g.limbs[i]);
      (*q)[i] = s.theta;
      q_bar[i] = s.d;
    }
  }

  ForwardOptions options;
  options.seed = request.seed;
  options.previous = request.previous;
  ForwardResult fr = parallel_fk(q_bar, q, g, options);
  if (fr.solutions.empty()) {
    throw Error(ErrorCode::constraint_violation,
                q ? "actuator command is inconsistent with the rigid platform (no assembly "
                    "reproduces the commanded limb angles)"
                  : "no assembly of the platform exists for the commanded limb lengths");
  }

  const auto limbs_of = [&](const ForwardSolution& sol) {
    std::array<LimbState, 3> limbs;
    for (std::size_t i = 0; i < 3; ++i) limbs[i] = {sol.limb_angles[i], q_bar[i], sol.corners[i]};
    return limbs;
  };

  int selected = 0;
  if (q) {
    out.actuators = request.actuators;
  } else {
    // Limb angles are passive in this mode. Report the assembly nearest the
    // reference pose whose actuator pairs fit the limits, keeping each
    // module's branch.
    const PlatformPose reference = request.previous ? *request.previous
                                   : request.seed   ? *request.seed
                                                    : nominal_home_pose(g);
    std::vector<int> order(fr.solutions.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return pose_distance(fr.solutions[a].pose, reference) <
             pose_distance(fr.solutions[b].pose, reference);
    });
    std::optional<Error> first_failure;
    for (int k : order) {
      const auto limbs = limbs_of(fr.solutions[static_cast<std::size_t>(k)]);
      std::vector<double> act;
      for (std::size_t i = 0; i < 3; ++i) {
        const ModuleBranch b = i < pairs.size() ? branch_of(pairs[i]) : ModuleBranch::ascending;
        append(act, fit_to_limits(robot, 2 * i, limb_actuators(limbs[i], g.limbs[i], b)));
      }
      try {
        check_actuator_limits(robot, act);
      } catch (const Error& e) {
        if (!first_failure) first_failure = e;
        continue;
      }
      selected = k;
      out.actuators = std::move(act);
      break;
    }
    if (out.actuators.empty()) throw *first_failure;
  }
  const ForwardSolution& sol = fr.solutions[static_cast<std::size_t>(selected)];
  out.limbs = limbs_of(sol);
  out.pose = sol.pose.transform();
  out.selected = selected;
  out.parallel = std::move(fr);
  return out;
}

}  // namespace

void check_actuator_limits(const RobotDefinition& robot, std::span<const double> actuators) {
  for (std::size_t i = 0; i < actuators.size() && i < robot.actuator_limits_deg.size(); ++i) {
    const ActuatorLimit& lim = robot.actuator_limits_deg[i];
    const double deg = rad_to_deg(actuators[i]);
    if (!(deg >= lim.min_deg - kLimitSlackDeg && deg <= lim.max_deg + kLimitSlackDeg)) {
      std::ostringstream msg;
      msg << "actuator " << i + 1 << " at " << deg << " deg is outside its limits [" << lim.min_deg
          << ", " << lim.max_deg << "] deg";
      throw Error(ErrorCode::actuator_limit, msg.str(), "actuators[" + std::to_string(i) + "]");
    }
  }
}

FkResult forward(const RobotDefinition& robot, const FkRequest& request) {
  if (robot.kind == RobotKind::parallel && request.limb_lengths) {
    if (!request.actuators.empty()) check_count(robot, request.actuators.size());
  } else {
    check_count(robot, request.actuators.size());
    check_actuator_limits(robot, request.actuators);
  }

  FkResult out;
  out.kind = robot.kind;
  switch (robot.kind) {
    case RobotKind::module: {
      out.actuators = request.actuators;
      out.module = module_fk(request.actuators[0], request.actuators[1],
                             module_geometry(robot.modules[0]));
      return out;
    }
    case RobotKind::hybrid4:
    case RobotKind::hybrid6: {
      const HybridGeometry g = hybrid_geometry(robot);
      const auto pairs = pairs_of(request.actuators);
      out.actuators = request.actuators;
      out.pose = base_transform(robot) * hybrid_actuators_fk(pairs, g);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const SerialCoords s = actuators_to_serial(pairs[i], g.modules[i]);
        out.serial.push_back(s.theta);
        out.serial.push_back(s.d);
      }
      return out;
    }
    case RobotKind::parallel: {
      out = forward_parallel(robot, request);
      check_actuator_limits(robot, out.actuators);
      return out;
    }
  }
  return out;
}

IkResult inverse(const RobotDefinition& robot, const IkRequest& request) {
  IkResult out;
  out.kind = robot.kind;
  switch (robot.kind) {
    case RobotKind::module: {
      if (!request.tip) throw Error(ErrorCode::invalid_argument, "module IK needs a tip", "tip");
      append(out.actuators, module_ik(*request.tip, module_geometry(robot.modules[0]), request.branch));
      break;
    }
    case RobotKind::hybrid4:
    case RobotKind::hybrid6: {
      if (!request.pose) throw Error(ErrorCode::invalid_argument, "hybrid IK needs a pose", "pose");
      const HybridGeometry g = hybrid_geometry(robot);
      const HomTransform chain = base_transform(robot).inverse() * *request.pose;
      std::vector<SerialCoords> serial;
      if (robot.kind == RobotKind::hybrid4) {
        const SerialJoints4 j = ik_rprp(chain, g);
        serial = {{j.theta1, j.d2}, {j.theta3, j.d4}};
      } else {
        if (!request.d6) {
          throw Error(ErrorCode::invalid_argument,
                      "hybrid6 IK needs the measured d6 limb length", "d6");
        }
        const SerialJoints6 j = ik_rprprp(chain, *request.d6, g);
        serial = {{j.theta1, j.d2}, {j.theta3, j.d4}, {j.theta5, j.d6}};
      }
      for (std::size_t i = 0; i < serial.size(); ++i) {
        out.serial.push_back(serial[i].theta);
        out.serial.push_back(serial[i].d);
        append(out.actuators, serial_to_actuators(serial[i], g.modules[i], request.branch));
      }
      break;
    }
    case RobotKind::parallel: {
      if (!request.pose) throw Error(ErrorCode::invalid_argument, "parallel IK needs a pose", "pose");
      const ParallelGeometry g = parallel_geometry(robot);
      out.limbs = parallel_ik(PlatformPose::from_transform(*request.pose), g);
      for (std::size_t i = 0; i < 3; ++i) {
        append(out.actuators,
               fit_to_limits(robot, 2 * i, limb_actuators(out.limbs[i], g.limbs[i], request.branch)));
      }
      break;
    }
  }
  check_actuator_limits(robot, out.actuators);
  return out;
}

DofReport robot_dof(const RobotDefinition& robot) {
  return mechanism_dof(shipped_topology(to_string(robot.kind)));
}

}  // namespace modkin::service
