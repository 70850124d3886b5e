#include "modkin/errors.hpp"

namespace modkin {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::actuator_separation: return "actuator_separation";
    case ErrorCode::actuator_limit: return "actuator_limit";
    case ErrorCode::out_of_workspace: return "out_of_workspace";
    case ErrorCode::unreachable_pose: return "unreachable_pose";
    case ErrorCode::singular_orientation: return "singular_orientation";
    case ErrorCode::limb_stroke: return "limb_stroke";
    case ErrorCode::constraint_violation: return "constraint_violation";
    case ErrorCode::degenerate_direction: return "degenerate_direction";
    case ErrorCode::no_convergence: return "no_convergence";
    case ErrorCode::collinear_points: return "collinear_points";
    case ErrorCode::annotation_mismatch: return "annotation_mismatch";
    case ErrorCode::unsupported_rule: return "unsupported_rule";
    case ErrorCode::unknown_joint: return "unknown_joint";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::validation_error: return "validation_error";
  }
  return "unknown";
}

bool is_kinematic(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse_error:
    case ErrorCode::validation_error:
    case ErrorCode::invalid_argument:
      return false;
    default:
      return true;
  }
}

}  // namespace modkin
