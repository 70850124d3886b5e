#include "modkin/robot_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "embedded_data.hpp"
#include "modkin/errors.hpp"

namespace modkin {

namespace {

using nlohmann::json;

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::validation_error, field + ": " + message, field);
}

// Typed accessors that report the field path on type errors.
double number_at(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw Error(ErrorCode::parse_error, path + ": expected a number", path);
  return v.get<double>();
}

template <std::size_t N>
std::array<double, N> numbers_at(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != N) {
    throw Error(ErrorCode::parse_error, path + ": expected " + std::to_string(N) + " numbers",
                path);
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) {
      throw Error(ErrorCode::parse_error, index_path(path, i) + ": expected a number",
                  index_path(path, i));
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

std::array<std::array<double, 3>, 3> triple_at(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) {
    throw Error(ErrorCode::parse_error, path + ": expected three 3-vectors", path);
  }
  std::array<std::array<double, 3>, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = numbers_at<3>(v[i], index_path(path, i));
  return out;
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> known,
                         const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || k == key;
    if (!ok) invalid(path.empty() ? key : path + "." + key, "unknown field");
  }
}

ModuleSpec parse_module(const json& j, const std::string& path) {
  if (!j.is_object()) throw Error(ErrorCode::parse_error, path + ": expected an object", path);
  reject_unknown_keys(j, {"a_mm", "c_mm", "theta_diff_max_deg", "origin_mm"}, path);
  ModuleSpec m;
  if (j.contains("a_mm")) m.a_mm = number_at(j, "a_mm", path + ".a_mm");
  if (j.contains("c_mm")) m.c_mm = number_at(j, "c_mm", path + ".c_mm");
  if (j.contains("theta_diff_max_deg")) {
    m.theta_diff_max_deg = number_at(j, "theta_diff_max_deg", path + ".theta_diff_max_deg");
  }
  if (j.contains("origin_mm")) m.origin_mm = numbers_at<2>(j.at("origin_mm"), path + ".origin_mm");
  return m;
}

ParallelSpec parse_parallel(const json& j) {
  const std::string path = "parallel";
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "parallel: expected an object", path);
  reject_unknown_keys(j,
                      {"base_radius_mm", "edge_mm", "base_anchors_mm", "base_axes",
                       "platform_anchors_mm"},
                      path);
  const double edge = j.contains("edge_mm") ? number_at(j, "edge_mm", "parallel.edge_mm") : 150.0;
  const double radius =
      j.contains("base_radius_mm") ? number_at(j, "base_radius_mm", "parallel.base_radius_mm") : 200.0;
  ParallelSpec p = ParallelSpec::symmetric(radius, edge);
  if (j.contains("base_anchors_mm")) {
    p.base_anchors_mm = triple_at(j.at("base_anchors_mm"), "parallel.base_anchors_mm");
  }
  if (j.contains("base_axes")) p.base_axes = triple_at(j.at("base_axes"), "parallel.base_axes");
  if (j.contains("platform_anchors_mm")) {
    p.platform_anchors_mm = triple_at(j.at("platform_anchors_mm"), "parallel.platform_anchors_mm");
  }
  return p;
}

Vec3 to_vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

json to_json(const std::array<std::array<double, 3>, 3>& t) {
  json out = json::array();
  for (const auto& row : t) out.push_back(row);
  return out;
}

}  // namespace

std::string_view to_string(RobotKind kind) {
  switch (kind) {
    case RobotKind::module: return "module";
    case RobotKind::hybrid4: return "hybrid4";
    case RobotKind::hybrid6: return "hybrid6";
    case RobotKind::parallel: return "parallel";
  }
  return "module";
}

std::optional<RobotKind> robot_kind_from_string(std::string_view text) {
  for (RobotKind k : {RobotKind::module, RobotKind::hybrid4, RobotKind::hybrid6, RobotKind::parallel}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::size_t module_count(RobotKind kind) {
  switch (kind) {
    case RobotKind::module: return 1;
    case RobotKind::hybrid4: return 2;
    case RobotKind::hybrid6: return 3;
    case RobotKind::parallel: return 3;
  }
  return 1;
}

ParallelSpec ParallelSpec::symmetric(double base_radius_mm, double edge_mm) {
  const ParallelGeometry g = ParallelGeometry::symmetric(base_radius_mm, edge_mm);
  ParallelSpec p;
  p.edge_mm = edge_mm;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      const auto ki = static_cast<Eigen::Index>(k);
      p.base_anchors_mm[i][k] = g.base_anchors[i][ki];
      p.base_axes[i][k] = g.base_axes[i][ki];
      p.platform_anchors_mm[i][k] = g.platform_anchors[i][ki];
    }
  }
  return p;
}

ModuleGeometry module_geometry(const ModuleSpec& spec) {
  ModuleGeometry g;
  g.a = spec.a_mm;
  g.c = spec.c_mm;
  g.theta_diff_max = deg_to_rad(spec.theta_diff_max_deg);
  g.origin = Vec2(spec.origin_mm[0], spec.origin_mm[1]);
  return g;
}

HybridGeometry hybrid_geometry(const RobotDefinition& def) {
  HybridGeometry g;
  g.l2 = def.l2_mm;
  g.modules.clear();
  for (const auto& m : def.modules) g.modules.push_back(module_geometry(m));
  return g;
}

ParallelGeometry parallel_geometry(const RobotDefinition& def) {
  if (!def.parallel) {
    throw Error(ErrorCode::invalid_argument, "robot '" + def.name + "' has no parallel geometry");
  }
  const ParallelSpec& p = *def.parallel;
  ParallelGeometry g;
  g.edge = p.edge_mm;
  for (std::size_t i = 0; i < 3; ++i) {
    g.base_anchors[i] = to_vec(p.base_anchors_mm[i]);
    g.base_axes[i] = to_vec(p.base_axes[i]);
    g.platform_anchors[i] = to_vec(p.platform_anchors_mm[i]);
    if (i < def.modules.size()) g.limbs[i] = module_geometry(def.modules[i]);
  }
  return g;
}

HomTransform base_transform(const RobotDefinition& def) {
  return HomTransform::from_row_major(std::span<const double, 16>(def.base_transform), 1e-9);
}

void validate_definition(const RobotDefinition& def) {
  if (def.schema_version != kSchemaVersion) {
    invalid("schema_version", "unsupported schema version " + std::to_string(def.schema_version));
  }
  const std::size_t expected = module_count(def.kind);
  if (def.modules.size() != expected) {
    invalid("modules", "kind " + std::string(to_string(def.kind)) + " needs " +
                           std::to_string(expected) + " modules, got " +
                           std::to_string(def.modules.size()));
  }
  for (std::size_t i = 0; i < def.modules.size(); ++i) {
    const ModuleSpec& m = def.modules[i];
    const std::string path = index_path("modules", i);
    if (!(std::isfinite(m.a_mm) && m.a_mm > 0.0)) invalid(path + ".a_mm", "must be > 0");
    if (!(std::isfinite(m.c_mm) && m.c_mm >= 0.0)) invalid(path + ".c_mm", "must be >= 0");
    if (!(m.theta_diff_max_deg > 0.0 && m.theta_diff_max_deg < 180.0)) {
      invalid(path + ".theta_diff_max_deg", "must lie in (0, 180)");
    }
    if (!std::isfinite(m.origin_mm[0]) || !std::isfinite(m.origin_mm[1])) {
      invalid(path + ".origin_mm", "must be finite");
    }
  }
  if (!(std::isfinite(def.l2_mm) && def.l2_mm >= 0.0)) invalid("l2_mm", "must be >= 0");
  try {
    if (!base_transform(def).is_valid(1e-9)) invalid("base_transform", "not a rigid transform");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::validation_error) throw;
    invalid("base_transform", e.what());
  }
  if (def.kind == RobotKind::parallel) {
    if (!def.parallel) invalid("parallel", "parallel robots need a platform geometry");
    try {
      parallel_geometry(def).validate();
    } catch (const Error& e) {
      const std::string field = "parallel." + e.field();
      throw Error(ErrorCode::validation_error, field + ": " + e.what(), field);
    }
  } else if (def.parallel) {
    invalid("parallel", "only parallel robots carry a platform geometry");
  }
  if (def.actuator_limits_deg.size() != actuator_count(def.kind)) {
    invalid("actuator_limits_deg", "expected " + std::to_string(actuator_count(def.kind)) +
                                       " intervals, got " +
                                       std::to_string(def.actuator_limits_deg.size()));
  }
  for (std::size_t i = 0; i < def.actuator_limits_deg.size(); ++i) {
    const ActuatorLimit& l = def.actuator_limits_deg[i];
    if (!(std::isfinite(l.min_deg) && std::isfinite(l.max_deg) && l.min_deg <= l.max_deg)) {
      invalid(index_path("actuator_limits_deg", i), "interval is empty");
    }
  }
}

RobotDefinition load_definition(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("definition is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::parse_error, "definition must be a JSON object");
  reject_unknown_keys(doc,
                      {"schema_version", "name", "kind", "modules", "l2_mm", "base_transform",
                       "parallel", "actuator_limits_deg"},
                      "");

  RobotDefinition def;
  try {
    if (doc.contains("schema_version")) {
      if (!doc.at("schema_version").is_number_integer()) {
        throw Error(ErrorCode::parse_error, "schema_version: expected an integer", "schema_version");
      }
      def.schema_version = doc.at("schema_version").get<int>();
    }
    if (doc.contains("name")) {
      if (!doc.at("name").is_string()) {
        throw Error(ErrorCode::parse_error, "name: expected a string", "name");
      }
      def.name = doc.at("name").get<std::string>();
    }
    if (!doc.contains("kind") || !doc.at("kind").is_string()) {
      invalid("kind", "required, one of module | hybrid4 | hybrid6 | parallel");
    }
    const auto kind = robot_kind_from_string(doc.at("kind").get<std::string>());
    if (!kind) invalid("kind", "must be one of module | hybrid4 | hybrid6 | parallel");
    def.kind = *kind;

    if (doc.contains("modules")) {
      const json& mods = doc.at("modules");
      if (!mods.is_array()) throw Error(ErrorCode::parse_error, "modules: expected an array", "modules");
      for (std::size_t i = 0; i < mods.size(); ++i) {
        def.modules.push_back(parse_module(mods[i], index_path("modules", i)));
      }
    } else {
      def.modules.assign(module_count(def.kind), ModuleSpec{});
    }
    if (doc.contains("l2_mm")) def.l2_mm = number_at(doc, "l2_mm", "l2_mm");
    if (doc.contains("base_transform")) {
      def.base_transform = numbers_at<16>(doc.at("base_transform"), "base_transform");
    }
    if (doc.contains("parallel")) {
      def.parallel = parse_parallel(doc.at("parallel"));
    } else if (def.kind == RobotKind::parallel) {
      def.parallel = ParallelSpec::symmetric(200.0, 150.0);
    }
    if (doc.contains("actuator_limits_deg")) {
      const json& lims = doc.at("actuator_limits_deg");
      if (!lims.is_array()) {
        throw Error(ErrorCode::parse_error, "actuator_limits_deg: expected an array",
                    "actuator_limits_deg");
      }
      for (std::size_t i = 0; i < lims.size(); ++i) {
        const auto pair = numbers_at<2>(lims[i], index_path("actuator_limits_deg", i));
        def.actuator_limits_deg.push_back({pair[0], pair[1]});
      }
    } else {
      def.actuator_limits_deg.assign(actuator_count(def.kind), ActuatorLimit{});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed definition: ") + e.what());
  }
  validate_definition(def);
  return def;
}

std::string save_definition(const RobotDefinition& def) {
  json doc;
  doc["schema_version"] = def.schema_version;
  doc["name"] = def.name;
  doc["kind"] = std::string(to_string(def.kind));
  json mods = json::array();
  for (const auto& m : def.modules) {
    mods.push_back({{"a_mm", m.a_mm},
                    {"c_mm", m.c_mm},
                    {"theta_diff_max_deg", m.theta_diff_max_deg},
                    {"origin_mm", m.origin_mm}});
  }
  doc["modules"] = mods;
  doc["l2_mm"] = def.l2_mm;
  doc["base_transform"] = def.base_transform;
  if (def.parallel) {
    doc["parallel"] = {{"edge_mm", def.parallel->edge_mm},
                       {"base_anchors_mm", to_json(def.parallel->base_anchors_mm)},
                       {"base_axes", to_json(def.parallel->base_axes)},
                       {"platform_anchors_mm", to_json(def.parallel->platform_anchors_mm)}};
  }
  json limits = json::array();
  for (const auto& l : def.actuator_limits_deg) limits.push_back({l.min_deg, l.max_deg});
  doc["actuator_limits_deg"] = limits;
  return doc.dump(2) + "\n";
}

std::vector<RobotDefinition> load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, path.string() + " is not valid JSON: " + e.what());
  }
  if (doc.is_object() && doc.contains("robots")) {
    std::vector<RobotDefinition> out;
    std::set<std::string> names;
    const json& robots = doc.at("robots");
    for (std::size_t i = 0; i < robots.size(); ++i) {
      try {
        out.push_back(load_definition(robots[i].dump()));
      } catch (const Error& e) {
        const std::string field = index_path("robots", i) + (e.field().empty() ? "" : "." + e.field());
        throw Error(e.code(), index_path("robots", i) + ": " + e.what(), field);
      }
      if (!names.insert(out.back().name).second) {
        invalid(index_path("robots", i) + ".name", "duplicate robot name " + out.back().name);
      }
    }
    return out;
  }
  return {load_definition(text)};
}

std::vector<RobotDefinition> builtin_presets() {
  std::vector<RobotDefinition> out;
  for (const auto& f : detail::embedded_presets()) out.push_back(load_definition(f.contents));
  return out;
}

}  // namespace modkin
