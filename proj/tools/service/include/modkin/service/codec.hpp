#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "modkin/errors.hpp"
#include "modkin/service/engine.hpp"

namespace modkin::service {

using nlohmann::json;

// JSON payloads. Angle fields carry their unit in the name (`_deg` or
// `_rad`), lengths are `_mm`, poses are {"matrix": [16 values, row-major]}.
// The HTTP service always speaks degrees; the CLI can switch to radians.

enum class AngleUnit { degrees, radians };

struct Codec {
  AngleUnit unit = AngleUnit::degrees;

  std::string angle_key(const std::string& stem) const;
  double angle_in(double value) const;   // wire -> rad
  double angle_out(double rad) const;    // rad -> wire

  FkRequest fk_request(const json& body) const;
  IkRequest ik_request(const json& body) const;

  json fk_result(const RobotDefinition& robot, const FkResult& result) const;
  json ik_result(const RobotDefinition& robot, const IkResult& result) const;
  json dof(const DofReport& report) const;

  std::vector<double> actuators(const json& values, const std::string& field) const;
};

json pose_json(const HomTransform& pose);
HomTransform pose_from_json(const json& value, const std::string& field);

json error_json(std::string_view code, const std::string& message, const std::string& field = {});
json error_json(const Error& e);

/// Reads a required or optional member with a typed error naming `field`.
double number_at(const json& value, const std::string& field);
std::vector<double> numbers_at(const json& value, const std::string& field);

ModuleBranch branch_from_string(const std::string& text);

}  // namespace modkin::service
