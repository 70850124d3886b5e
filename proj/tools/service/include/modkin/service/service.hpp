#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "modkin/service/engine.hpp"

namespace modkin::service {

/// Unknown robot or session name. Maps to HTTP 404.
class NotFound : public std::runtime_error {
 public:
  NotFound(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

using RobotPtr = std::shared_ptr<const RobotDefinition>;

struct SessionState {
  std::string id;
  RobotPtr robot;
  std::vector<double> actuators;  // rad, always within limits
  FkResult last;                  // solve that produced `actuators`
  std::uint64_t revision = 0;
};

/// Robot registry and jog sessions. Every member is safe to call from
/// several threads; updates to one session are serialized, reads of a
/// session run concurrently with each other.
class Service {
 public:
  explicit Service(std::vector<RobotDefinition> robots = builtin_presets());

  std::vector<RobotPtr> robots() const;
  RobotPtr robot(const std::string& name) const;
  /// Adds or replaces; returns true when the name was new.
  bool put_robot(RobotDefinition def);

  /// Starts at the given actuators, or at the robot's home configuration
  /// (all zero for serial kinds, nominal_home_pose for the platform).
  SessionState create_session(const std::string& robot,
                              const std::optional<std::vector<double>>& actuators = {});
  SessionState session(const std::string& id) const;
  SessionState set_actuators(const std::string& id, const std::vector<double>& actuators);
  SessionState jog(const std::string& id, std::size_t index, double delta);

 private:
  struct Session {
    mutable std::shared_mutex mutex;
    SessionState state;
  };

  std::shared_ptr<Session> find_session(const std::string& id) const;

  mutable std::shared_mutex robots_mutex_;
  std::map<std::string, RobotPtr> robots_;

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_session_ = 1;
};

/// Solve for a jog target. Serial kinds run forward() on the actuators.
/// Parallel robots are driven by the limb lengths the actuator pairs set;
/// the assembly mode nearest `previous` is kept and the passive limb angles
/// are folded back into the reported actuators.
FkResult solve_target(const RobotDefinition& robot, const std::vector<double>& actuators,
                      const std::optional<PlatformPose>& previous);

}  // namespace modkin::service
