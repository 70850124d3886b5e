#include "modkin/service/service.hpp"

#include "modkin/errors.hpp"

namespace modkin::service {

FkResult solve_target(const RobotDefinition& robot, const std::vector<double>& actuators,
                      const std::optional<PlatformPose>& previous) {
  FkRequest req;
  req.actuators = actuators;
  if (robot.kind != RobotKind::parallel) return forward(robot, req);

  if (actuators.size() != actuator_count(robot.kind)) return forward(robot, req);
  check_actuator_limits(robot, actuators);
  const ParallelGeometry g = parallel_geometry(robot);
  std::array<double, 3> q_bar{};
  for (std::size_t i = 0; i < 3; ++i) {
    q_bar[i] = actuators_to_serial({actuators[2 * i], actuators[2 * i + 1]}, g.limbs[i]).d;
  }
  req.limb_lengths = q_bar;
  req.previous = previous;
  return forward(robot, req);
}

Service::Service(std::vector<RobotDefinition> robots) {
  for (RobotDefinition& def : robots) {
    std::string name = def.name;
    robots_[name] = std::make_shared<const RobotDefinition>(std::move(def));
  }
}

std::vector<RobotPtr> Service::robots() const {
  std::shared_lock lock(robots_mutex_);
  std::vector<RobotPtr> out;
  for (const auto& [_, def] : robots_) out.push_back(def);
  return out;
}

RobotPtr Service::robot(const std::string& name) const {
  std::shared_lock lock(robots_mutex_);
  const auto it = robots_.find(name);
  if (it == robots_.end()) throw NotFound("unknown_robot", "no robot named '" + name + "'");
  return it->second;
}

bool Service::put_robot(RobotDefinition def) {
  validate_definition(def);
  std::unique_lock lock(robots_mutex_);
  std::string name = def.name;
  const bool fresh = robots_.find(name) == robots_.end();
  robots_[name] = std::make_shared<const RobotDefinition>(std::move(def));
  return fresh;
}

SessionState Service::create_session(const std::string& name,
                                     const std::optional<std::vector<double>>& actuators) {
  auto s = std::make_shared<Session>();
  s->state.robot = robot(name);
  const RobotDefinition& def = *s->state.robot;

  std::optional<PlatformPose> previous;
  std::vector<double> target;
  if (def.kind == RobotKind::parallel) {
    const ParallelGeometry g = parallel_geometry(def);
    previous = nominal_home_pose(g);
    if (actuators) {
      target = *actuators;
    } else {
      IkRequest ik;
      ik.pose = previous->transform();
      target = inverse(def, ik).actuators;
    }
  } else {
    target = actuators.value_or(std::vector<double>(actuator_count(def.kind), 0.0));
  }
  s->state.last = solve_target(def, target, previous);
  s->state.actuators = s->state.last.actuators;

  std::unique_lock lock(sessions_mutex_);
  s->state.id = "s" + std::to_string(next_session_++);
  sessions_[s->state.id] = s;
  return s->state;
}

std::shared_ptr<Service::Session> Service::find_session(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown_session", "no session '" + id + "'");
  return it->second;
}

SessionState Service::session(const std::string& id) const {
  const auto s = find_session(id);
  std::shared_lock lock(s->mutex);
  return s->state;
}

SessionState Service::set_actuators(const std::string& id, const std::vector<double>& actuators) {
  const auto s = find_session(id);
  std::unique_lock lock(s->mutex);
  const RobotDefinition& def = *s->state.robot;
  std::optional<PlatformPose> previous;
  if (s->state.last.pose) previous = PlatformPose::from_transform(*s->state.last.pose);
  // Solve before touching the state so a failure leaves the session as it was.
  FkResult next = solve_target(def, actuators, previous);
  s->state.actuators = next.actuators;
  s->state.last = std::move(next);
  ++s->state.revision;
  return s->state;
}

SessionState Service::jog(const std::string& id, std::size_t index, double delta) {
  const auto s = find_session(id);
  std::unique_lock lock(s->mutex);
  const RobotDefinition& def = *s->state.robot;
  if (index >= s->state.actuators.size()) {
    throw Error(ErrorCode::invalid_argument,
                "actuator index " + std::to_string(index) + " out of range for " +
                    std::to_string(s->state.actuators.size()) + " actuators",
                "jog.index");
  }
  std::vector<double> target = s->state.actuators;
  target[index] += delta;
  std::optional<PlatformPose> previous;
  if (s->state.last.pose) previous = PlatformPose::from_transform(*s->state.last.pose);
  FkResult next = solve_target(def, target, previous);
  s->state.actuators = next.actuators;
  s->state.last = std::move(next);
  ++s->state.revision;
  return s->state;
}

}  // namespace modkin::service
