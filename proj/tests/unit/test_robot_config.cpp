#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "modkin/errors.hpp"
#include "modkin/robot_config.hpp"

using namespace modkin;

namespace {

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected modkin::Error");
  return Error(ErrorCode::domain, "");
}

RobotDefinition preset(const std::string& name) {
  for (auto& def : builtin_presets()) {
    if (def.name == name) return def;
  }
  FAIL("missing preset " << name);
  return {};
}

}  // namespace

TEST_CASE("builtin presets") {
  const auto all = builtin_presets();
  REQUIRE(all.size() == 4);
  const RobotDefinition h4 = preset("paper-hybrid4");
  CHECK(h4.kind == RobotKind::hybrid4);
  CHECK(h4.modules.size() == 2);
  CHECK(h4.modules[0].a_mm == 100.0038078);
  CHECK(h4.modules[0].c_mm == 50.0);
  CHECK(h4.l2_mm == 50.0);
  CHECK(h4.actuator_limits_deg.size() == 4);

  const std::vector<ActuatorPair> act(2, {deg_to_rad(22.0), deg_to_rad(23.0)});
  const HomTransform t = hybrid_actuators_fk(act, hybrid_geometry(h4));
  CHECK(t.position().x() == doctest::Approx(309.059).epsilon(1e-5));
  CHECK(t.position().y() == doctest::Approx(-142.581).epsilon(1e-5));
  CHECK(t.position().z() == doctest::Approx(145.67).epsilon(1e-4));

  const RobotDefinition par = preset("paper-parallel");
  REQUIRE(par.parallel.has_value());
  const ParallelGeometry g = parallel_geometry(par);
  CHECK(g.base_anchors[0].x() == doctest::Approx(200.0));
  CHECK(g.edge == 150.0);
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("defaults are filled in") {
  const RobotDefinition def = load_definition(R"({"kind": "module"})");
  CHECK(def.schema_version == 1);
  CHECK(def.name.empty());
  REQUIRE(def.modules.size() == 1);
  CHECK(def.modules[0] == ModuleSpec{});
  CHECK(def.actuator_limits_deg == std::vector<ActuatorLimit>(2));
  CHECK_FALSE(def.parallel.has_value());

  const RobotDefinition par = load_definition(R"({"kind": "parallel", "name": "p"})");
  REQUIRE(par.parallel.has_value());
  CHECK(*par.parallel == ParallelSpec::symmetric(200.0, 150.0));
}

TEST_CASE("save and load round trip") {
  for (const auto& def : builtin_presets()) {
    CHECK(load_definition(save_definition(def)) == def);
  }
  RobotDefinition mutated = preset("paper-hybrid6");
  mutated.actuator_limits_deg[3] = {-12.25, 97.125};
  mutated.modules[1].a_mm = 99.123456789012345;
  CHECK(load_definition(save_definition(mutated)) == mutated);

  RobotDefinition unnamed = preset("paper-module");
  unnamed.name.clear();
  const RobotDefinition back = load_definition(save_definition(unnamed));
  CHECK(back.name.empty());
  CHECK(back == unnamed);
}

TEST_CASE("validation names the field") {
  auto field_of = [](const char* text) { return error_of([&] { load_definition(text); }).field(); };
  CHECK(field_of(R"({"kind": "module", "modules": [{"a_mm": 0}]})") == "modules[0].a_mm");
  CHECK(field_of(R"({"kind": "hybrid4", "modules": [{}, {"c_mm": -1}]})") == "modules[1].c_mm");
  CHECK(field_of(R"({"kind": "module", "modules": [{"theta_diff_max_deg": 180}]})") ==
        "modules[0].theta_diff_max_deg");
  CHECK(field_of(R"({"kind": "hybrid6", "modules": [{}, {}]})") == "modules");
  CHECK(field_of(R"({"kind": "module", "actuator_limits_deg": [[10, 0], [0, 1]]})") ==
        "actuator_limits_deg[0]");
  CHECK(field_of(R"({"kind": "module", "actuator_limits_deg": [[0, 1]]})") == "actuator_limits_deg");
  CHECK(field_of(R"({"kind": "robot"})") == "kind");
  CHECK(field_of(R"({"kind": "module", "colour": "red"})") == "colour");
  CHECK(field_of(R"({"kind": "module", "schema_version": 2})") == "schema_version");
  CHECK(field_of(R"({"kind": "module", "parallel": {}})") == "parallel");
  CHECK(field_of(R"({"kind": "parallel", "parallel": {"edge_mm": -3}})") == "parallel.edge");
  CHECK(field_of(R"({"kind": "hybrid4", "base_transform": [1,0,0,0, 0,2,0,0, 0,0,1,0, 0,0,0,1]})") ==
        "base_transform");
  CHECK(error_of([] { load_definition(R"({"kind": "module", "modules": [{"a_mm": 0}]})"); }).code() ==
        ErrorCode::validation_error);
}

TEST_CASE("parse errors") {
  CHECK(error_of([] { load_definition("{"); }).code() == ErrorCode::parse_error);
  CHECK(error_of([] { load_definition("[]"); }).code() == ErrorCode::parse_error);
  CHECK(error_of([] { load_definition(R"({"kind": "module", "l2_mm": "far"})"); }).code() ==
        ErrorCode::parse_error);
  CHECK(error_of([] { load_definition(R"({"kind": "module", "modules": [{"origin_mm": [1]}]})"); })
            .field() == "modules[0].origin_mm");
}

TEST_CASE("catalog files") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "modkin_catalog_test.json";
  {
    std::ofstream out(path);
    out << R"({"robots": [{"name": "a", "kind": "module"}, {"name": "b", "kind": "hybrid4"}]})";
  }
  const auto robots = load_catalog(path);
  REQUIRE(robots.size() == 2);
  CHECK(robots[1].kind == RobotKind::hybrid4);

  {
    std::ofstream out(path);
    out << R"({"robots": [{"name": "a", "kind": "module"}, {"name": "a", "kind": "module"}]})";
  }
  CHECK(error_of([&] { load_catalog(path); }).field() == "robots[1].name");
  {
    std::ofstream out(path);
    out << R"({"robots": [{"name": "a", "kind": "module", "modules": [{"a_mm": -1}]}]})";
  }
  CHECK(error_of([&] { load_catalog(path); }).field() == "robots[0].modules[0].a_mm");
  std::filesystem::remove(path);
  CHECK(error_of([&] { load_catalog(path); }).code() == ErrorCode::parse_error);
}
