#include "modkin/service/codec.hpp"

#include <algorithm>
#include <initializer_list>

namespace modkin::service {

namespace {

void only_keys(const json& body, std::initializer_list<std::string> allowed) {
  if (!body.is_object()) {
    throw Error(ErrorCode::parse_error, "request body must be a JSON object");
  }
  for (const auto& [key, _] : body.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::validation_error, "unknown field '" + key + "'", key);
    }
  }
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json limbs_json(const Codec& codec, const std::array<LimbState, 3>& limbs) {
  json out = json::array();
  for (const LimbState& l : limbs) {
    out.push_back({{codec.angle_key("q"), codec.angle_out(l.q)},
                   {"q_bar_mm", l.q_bar},
                   {"corner_mm", vec_json(l.c)}});
  }
  return out;
}

json serial_json(const Codec& codec, const std::vector<double>& serial) {
  json out = json::array();
  for (std::size_t i = 0; i + 1 < serial.size(); i += 2) {
    out.push_back({{codec.angle_key("theta"), codec.angle_out(serial[i])},
                   {"d_mm", serial[i + 1]}});
  }
  return out;
}

json actuators_json(const Codec& codec, const std::vector<double>& actuators) {
  json out = json::array();
  for (double a : actuators) out.push_back(codec.angle_out(a));
  return out;
}

}  // namespace

std::string Codec::angle_key(const std::string& stem) const {
  return stem + (unit == AngleUnit::degrees ? "_deg" : "_rad");
}

double Codec::angle_in(double value) const {
  return unit == AngleUnit::degrees ? deg_to_rad(value) : value;
}

double Codec::angle_out(double rad) const {
  return unit == AngleUnit::degrees ? rad_to_deg(rad) : rad;
}

double number_at(const json& value, const std::string& field) {
  if (!value.is_number()) throw Error(ErrorCode::parse_error, "expected a number", field);
  return value.get<double>();
}

std::vector<double> numbers_at(const json& value, const std::string& field) {
  if (!value.is_array()) throw Error(ErrorCode::parse_error, "expected an array of numbers", field);
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(number_at(value[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> Codec::actuators(const json& values, const std::string& field) const {
  std::vector<double> out = numbers_at(values, field);
  for (double& v : out) v = angle_in(v);
  return out;
}

ModuleBranch branch_from_string(const std::string& text) {
  if (text == "ascending") return ModuleBranch::ascending;
  if (text == "descending") return ModuleBranch::descending;
  throw Error(ErrorCode::validation_error,
              "branch must be 'ascending' or 'descending', got '" + text + "'", "branch");
}

json pose_json(const HomTransform& pose) {
  const auto m = pose.row_major();
  return {{"matrix", json(std::vector<double>(m.begin(), m.end()))}};
}

HomTransform pose_from_json(const json& value, const std::string& field) {
  if (!value.is_object() || !value.contains("matrix")) {
    throw Error(ErrorCode::parse_error, "pose must be an object with a 'matrix' member", field);
  }
  const std::vector<double> m = numbers_at(value.at("matrix"), field + ".matrix");
  if (m.size() != 16) {
    throw Error(ErrorCode::validation_error,
                "pose matrix needs 16 row-major values, got " + std::to_string(m.size()),
                field + ".matrix");
  }
  try {
    return HomTransform::from_row_major(std::span<const double, 16>(m.data(), 16));
  } catch (const Error& e) {
    throw Error(ErrorCode::validation_error, e.what(), field + ".matrix");
  }
}

FkRequest Codec::fk_request(const json& body) const {
  only_keys(body, {angle_key("actuators"), "limb_lengths_mm", "seed", "previous"});
  FkRequest req;
  if (body.contains(angle_key("actuators"))) {
    req.actuators = actuators(body.at(angle_key("actuators")), angle_key("actuators"));
  }
  if (body.contains("limb_lengths_mm")) {
    const auto q_bar = numbers_at(body.at("limb_lengths_mm"), "limb_lengths_mm");
    if (q_bar.size() != 3) {
      throw Error(ErrorCode::validation_error, "limb_lengths_mm needs 3 values", "limb_lengths_mm");
    }
    req.limb_lengths = std::array<double, 3>{q_bar[0], q_bar[1], q_bar[2]};
  } else if (!body.contains(angle_key("actuators"))) {
    throw Error(ErrorCode::validation_error, "missing " + angle_key("actuators"),
                angle_key("actuators"));
  }
  if (body.contains("seed")) {
    req.seed = PlatformPose::from_transform(pose_from_json(body.at("seed"), "seed"));
  }
  if (body.contains("previous")) {
    req.previous = PlatformPose::from_transform(pose_from_json(body.at("previous"), "previous"));
  }
  return req;
}

IkRequest Codec::ik_request(const json& body) const {
  only_keys(body, {"tip_mm", "pose", "d6_mm", "branch"});
  IkRequest req;
  if (body.contains("tip_mm")) {
    const auto tip = numbers_at(body.at("tip_mm"), "tip_mm");
    if (tip.size() != 2) throw Error(ErrorCode::validation_error, "tip_mm needs 2 values", "tip_mm");
    req.tip = Vec2(tip[0], tip[1]);
  }
  if (body.contains("pose")) req.pose = pose_from_json(body.at("pose"), "pose");
  if (body.contains("d6_mm")) req.d6 = number_at(body.at("d6_mm"), "d6_mm");
  if (body.contains("branch")) {
    if (!body.at("branch").is_string()) throw Error(ErrorCode::parse_error, "expected a string", "branch");
    req.branch = branch_from_string(body.at("branch").get<std::string>());
  }
  return req;
}

json Codec::fk_result(const RobotDefinition& robot, const FkResult& r) const {
  json out = {{"robot", robot.name},
              {"kind", std::string(to_string(r.kind))},
              {angle_key("actuators"), actuators_json(*this, r.actuators)}};
  if (r.module) {
    out["module"] = {{angle_key("theta"), angle_out(r.module->theta)},
                     {"l_t_mm", r.module->l_t},
                     {"tip_mm", json::array({r.module->tip.x(), r.module->tip.y()})}};
  }
  if (!r.serial.empty()) out["serial_joints"] = serial_json(*this, r.serial);
  if (r.pose) out["pose"] = pose_json(*r.pose);
  if (r.parallel) {
    out["limbs"] = limbs_json(*this, r.limbs);
    out["selected"] = r.selected;
    json solutions = json::array();
    double worst = 0.0;
    for (const ForwardSolution& s : r.parallel->solutions) {
      worst = std::max(worst, s.max_residual);
      solutions.push_back({{"pose", pose_json(s.pose.transform())},
                           {"max_residual", s.max_residual},
                           {"residuals", json(std::vector<double>(s.residuals.data(),
                                                                  s.residuals.data() + 9))},
                           {"iterations", s.iterations}});
    }
    out["solutions"] = std::move(solutions);
    out["diagnostics"] = {{"starts_tried", r.parallel->starts_tried},
                          {"starts_converged", r.parallel->starts_converged},
                          {"solution_count", r.parallel->solutions.size()},
                          {"max_residual", worst}};
  }
  return out;
}

json Codec::ik_result(const RobotDefinition& robot, const IkResult& r) const {
  json out = {{"robot", robot.name},
              {"kind", std::string(to_string(r.kind))},
              {angle_key("actuators"), actuators_json(*this, r.actuators)}};
  if (!r.serial.empty()) out["serial_joints"] = serial_json(*this, r.serial);
  if (r.kind == RobotKind::parallel) out["limbs"] = limbs_json(*this, r.limbs);
  return out;
}

json Codec::dof(const DofReport& report) const {
  json out = {{"dof", report.dof},
              {"joint_freedoms", report.joint_freedoms},
              {"constraint_equations", report.constraint_equations},
              {"loop_equations", report.loop_equations},
              {"limb_dimensions", report.limb_dimensions},
              {"independent_loops", report.independent_loops}};
  out["grubler"] = report.grubler ? json(*report.grubler) : json(nullptr);
  return out;
}

json error_json(std::string_view code, const std::string& message, const std::string& field) {
  json e = {{"code", std::string(code)}, {"message", message}};
  e["field"] = field.empty() ? json(nullptr) : json(field);
  return {{"error", std::move(e)}};
}

json error_json(const Error& e) { return error_json(to_string(e.code()), e.what(), e.field()); }

}  // namespace modkin::service
