#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace modkin {

/// Machine-readable failure reasons. The string form (to_string) is what the
/// CLI and the HTTP service report to clients.
enum class ErrorCode {
  domain,                  // math helper called outside its domain
  invalid_argument,        // malformed call (empty chain, wrong arity, ...)
  actuator_separation,     // |theta_r2 - theta_r1| beyond the module fold limit
  actuator_limit,          // actuator value outside its configured interval
  out_of_workspace,        // module tip / limb length outside the reachable annulus
  unreachable_pose,        // IK residual above tolerance
  singular_orientation,    // IK angle formula degenerate for this pose
  limb_stroke,             // parallel limb length outside module range
  constraint_violation,    // pose violates the passive base revolute constraint
  degenerate_direction,    // limb direction undefined
  no_convergence,          // no numerical start converged
  collinear_points,        // platform corners do not span a plane
  annotation_mismatch,     // POC direction vocabularies cannot be combined
  unsupported_rule,        // topology outside the implemented POC rule set
  unknown_joint,           // joint label not present in the topology
  parse_error,             // malformed document
  validation_error,        // document violates an invariant
};

std::string_view to_string(ErrorCode code);

/// True for failures of the kinematic model itself (as opposed to malformed
/// input documents or usage errors).
bool is_kinematic(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }

  /// Dotted path of the offending field for validation errors, e.g.
  /// "modules[1].a_mm". Empty otherwise.
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace modkin
