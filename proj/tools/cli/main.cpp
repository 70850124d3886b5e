#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "modkin/mobility.hpp"
#include "modkin/service/codec.hpp"
#include "modkin/service/http_server.hpp"

namespace svc = modkin::service;
using modkin::Error;
using modkin::ErrorCode;
using nlohmann::json;

namespace {

enum Exit { ok = 0, usage = 2, config = 3, kinematic = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string robot;
  std::string format = "text";
  bool radians = false;

  std::vector<std::string> fk_values;
  std::string fk_lengths;
  std::string ik_tip;
  std::vector<std::string> ik_pose;
  std::optional<double> ik_d6;
  std::string branch = "ascending";
  std::string topology;
  std::vector<std::string> fixed;
  std::string host;
  int port = 0;
};

std::vector<double> parse_numbers(const std::vector<std::string>& parts, const std::string& what) {
  std::vector<double> out;
  for (const std::string& part : parts) {
    std::stringstream ss(part);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      try {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw UsageError(what + ": '" + item + "' is not a number");
      }
    }
  }
  return out;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<modkin::RobotDefinition> load_robots(const Options& o) {
  std::map<std::string, modkin::RobotDefinition> by_name;
  for (auto& def : modkin::builtin_presets()) by_name[def.name] = def;
  if (!o.config.empty()) {
    try {
      for (auto& def : modkin::load_catalog(o.config)) by_name[def.name] = def;
    } catch (const Error& e) {
      std::string where = e.field().empty() ? "" : " (" + e.field() + ")";
      throw ConfigError(o.config + ": " + e.what() + where);
    }
  }
  std::vector<modkin::RobotDefinition> out;
  for (auto& [_, def] : by_name) out.push_back(def);
  return out;
}

modkin::RobotDefinition pick_robot(const Options& o) {
  const auto robots = load_robots(o);
  std::string name = o.robot;
  if (name.empty() && !o.config.empty()) {
    const auto mine = modkin::load_catalog(o.config);
    if (mine.size() == 1) name = mine.front().name;
  }
  if (name.empty()) throw UsageError("--robot is required for this command");
  for (const auto& def : robots) {
    if (def.name == name) return def;
  }
  throw ConfigError("unknown robot '" + name + "'");
}

std::string angle_unit(const svc::Codec& codec) {
  return codec.unit == svc::AngleUnit::degrees ? "deg" : "rad";
}

void print_matrix(std::ostream& os, const modkin::HomTransform& t) {
  const auto m = t.row_major();
  for (int r = 0; r < 4; ++r) {
    os << "  ";
    for (int c = 0; c < 4; ++c) os << fmt("%12.6f", m[4 * r + c]);
    os << "\n";
  }
}

void print_actuators(std::ostream& os, const svc::Codec& codec, const std::vector<double>& a) {
  os << "actuators (" << angle_unit(codec) << "):";
  for (double v : a) os << " " << fmt("%.10g", codec.angle_out(v));
  os << "\n";
}

void print_serial(std::ostream& os, const svc::Codec& codec, const std::vector<double>& s) {
  if (s.empty()) return;
  os << "serial joints:";
  for (std::size_t i = 0; i + 1 < s.size(); i += 2) {
    os << (i ? ", " : " ") << "theta" << i + 1 << " = " << fmt("%.10g", codec.angle_out(s[i]))
       << " " << angle_unit(codec) << ", d" << i + 2 << " = " << fmt("%.10g", s[i + 1]) << " mm";
  }
  os << "\n";
}

void print_limbs(std::ostream& os, const svc::Codec& codec,
                 const std::array<modkin::LimbState, 3>& limbs) {
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& l = limbs[i];
    os << "limb " << i + 1 << ": q = " << fmt("%.10g", codec.angle_out(l.q)) << " "
       << angle_unit(codec) << ", length = " << fmt("%.10g", l.q_bar) << " mm, corner = ("
       << fmt("%.6f", l.c.x()) << ", " << fmt("%.6f", l.c.y()) << ", " << fmt("%.6f", l.c.z())
       << ") mm\n";
  }
}

int run_fk(const Options& o, const svc::Codec& codec) {
  const auto robot = pick_robot(o);
  svc::FkRequest req;
  req.actuators = parse_numbers(o.fk_values, "actuators");
  for (double& v : req.actuators) v = codec.angle_in(v);
  if (!o.fk_lengths.empty()) {
    const auto q_bar = parse_numbers({o.fk_lengths}, "--lengths");
    if (q_bar.size() != 3) throw UsageError("--lengths needs 3 values");
    req.limb_lengths = std::array<double, 3>{q_bar[0], q_bar[1], q_bar[2]};
  }
  const svc::FkResult r = svc::forward(robot, req);
  if (o.format == "structured") {
    std::cout << codec.fk_result(robot, r).dump(2) << "\n";
    return ok;
  }
  std::cout << robot.name << " (" << modkin::to_string(robot.kind) << ")\n";
  print_actuators(std::cout, codec, r.actuators);
  if (r.module) {
    std::cout << "limb angle: " << fmt("%.10g", codec.angle_out(r.module->theta)) << " "
              << angle_unit(codec) << "\nlimb length: " << fmt("%.10g", r.module->l_t)
              << " mm\ntip (mm): " << fmt("%.6f", r.module->tip.x()) << " "
              << fmt("%.6f", r.module->tip.y()) << "\n";
  }
  print_serial(std::cout, codec, r.serial);
  if (r.parallel) print_limbs(std::cout, codec, r.limbs);
  if (r.pose) {
    std::cout << "pose:\n";
    print_matrix(std::cout, *r.pose);
  }
  if (r.parallel) {
    double worst = 0.0;
    for (const auto& s : r.parallel->solutions) worst = std::max(worst, s.max_residual);
    std::cout << "assembly modes: " << r.parallel->solutions.size() << " (showing "
              << r.selected + 1 << "), max residual " << fmt("%.3e", worst) << "\n";
  }
  return ok;
}

int run_ik(const Options& o, const svc::Codec& codec) {
  const auto robot = pick_robot(o);
  svc::IkRequest req;
  req.branch = svc::branch_from_string(o.branch);
  if (!o.ik_tip.empty()) {
    const auto tip = parse_numbers({o.ik_tip}, "--tip");
    if (tip.size() != 2) throw UsageError("--tip needs 2 values");
    req.tip = modkin::Vec2(tip[0], tip[1]);
  }
  if (!o.ik_pose.empty()) {
    std::vector<double> m = parse_numbers(o.ik_pose, "--pose");
    if (m.size() == 12) m.insert(m.end(), {0.0, 0.0, 0.0, 1.0});
    if (m.size() != 16) throw UsageError("--pose needs 16 (or 12) row-major values");
    req.pose = modkin::HomTransform::from_row_major(std::span<const double, 16>(m.data(), 16), 1e-9);
  }
  if (!req.tip && !req.pose) throw UsageError("ik needs --tip or --pose");
  req.d6 = o.ik_d6;
  const svc::IkResult r = svc::inverse(robot, req);
  if (o.format == "structured") {
    std::cout << codec.ik_result(robot, r).dump(2) << "\n";
    return ok;
  }
  std::cout << robot.name << " (" << modkin::to_string(robot.kind) << ")\n";
  print_actuators(std::cout, codec, r.actuators);
  print_serial(std::cout, codec, r.serial);
  if (r.kind == modkin::RobotKind::parallel) print_limbs(std::cout, codec, r.limbs);
  return ok;
}

modkin::Topology pick_topology(const Options& o) {
  if (o.topology.empty()) return modkin::shipped_topology(modkin::to_string(pick_robot(o).kind));
  if (std::filesystem::exists(o.topology)) {
    try {
      return modkin::load_topology_file(o.topology);
    } catch (const Error& e) {
      throw ConfigError(o.topology + ": " + e.what());
    }
  }
  for (const auto& name : modkin::shipped_topology_names()) {
    if (name == o.topology) return modkin::shipped_topology(name);
  }
  throw ConfigError("no topology file or fixture named '" + o.topology + "'");
}

int run_dof(const Options& o) {
  const modkin::Topology t = pick_topology(o);
  const modkin::DofReport report = modkin::mechanism_dof(t);
  std::optional<int> frozen;
  if (!o.fixed.empty()) frozen = modkin::frozen_dof(t, o.fixed);
  if (o.format == "structured") {
    json out = svc::Codec{}.dof(report);
    out["topology"] = t.name;
    if (frozen) {
      out["fixed"] = o.fixed;
      out["dof_after_fixing"] = *frozen;
      out["driving_pairs"] = *frozen == 0;
    }
    std::cout << out.dump(2) << "\n";
    return ok;
  }
  std::cout << "dof: " << report.dof << "\n";
  std::cout << "topology: " << t.name << "\n";
  std::cout << "joint freedoms: " << report.joint_freedoms
            << ", independent equations: " << report.constraint_equations << "\n";
  if (!report.loop_equations.empty()) {
    std::cout << "loop equations:";
    for (int x : report.loop_equations) std::cout << " " << x;
    std::cout << "\n";
  }
  if (!report.limb_dimensions.empty()) {
    std::cout << "limb dimensions:";
    for (int x : report.limb_dimensions) std::cout << " " << x;
    std::cout << "\n";
  }
  if (report.grubler) std::cout << "grubler: " << *report.grubler << "\n";
  if (frozen) {
    std::cout << "dof with fixed joints: " << *frozen
              << (*frozen == 0 ? " (valid driving pairs)" : "") << "\n";
  }
  return ok;
}

int run_show(const Options& o) {
  if (o.robot.empty() && o.config.empty()) {
    for (const auto& def : load_robots(o)) {
      std::cout << def.name << "  " << modkin::to_string(def.kind) << "\n";
    }
    return ok;
  }
  std::cout << modkin::save_definition(pick_robot(o)) << "\n";
  return ok;
}

int run_serve(const Options& o) {
  std::string host = o.host;
  int port = o.port;
  if (host.empty()) {
    const char* env = std::getenv("MODKIN_HOST");
    host = env ? env : "127.0.0.1";
  }
  if (port == 0) {
    const char* env = std::getenv("MODKIN_PORT");
    port = env ? std::atoi(env) : 8080;
  }
  if (port <= 0 || port > 65535) throw UsageError("invalid port");
  svc::Service service(load_robots(o));
  return svc::serve(service, host, port) == 0 ? ok : usage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinematics of modular five-bar manipulators", "modkin"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--config", o.config, "Robot definition or catalog file")->check(CLI::ExistingFile);
  app.add_option("--robot", o.robot, "Robot name (preset or from --config)");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "structured"}));
  auto* deg = app.add_flag("--degrees", "Angles in degrees (default)");
  auto* rad = app.add_flag("--radians", o.radians, "Angles in radians");
  deg->excludes(rad);

  auto* fk = app.add_subcommand("fk", "Forward kinematics from actuator angles");
  fk->add_option("actuators", o.fk_values, "Actuator values, comma or space separated");
  fk->add_option("--lengths", o.fk_lengths, "Parallel robots: drive by limb lengths q1,q2,q3 (mm)");

  auto* ik = app.add_subcommand("ik", "Inverse kinematics to actuator angles");
  auto* tip = ik->add_option("--tip", o.ik_tip, "Module tip x,y (mm)");
  auto* pose = ik->add_option("--pose", o.ik_pose, "End-effector pose, 16 or 12 row-major values");
  tip->excludes(pose);
  ik->add_option("--d6", o.ik_d6, "Measured limb length of the third module (mm)");
  ik->add_option("--branch", o.branch, "Actuator branch")
      ->check(CLI::IsMember({"ascending", "descending"}));

  auto* dof = app.add_subcommand("dof", "Degrees of freedom of a topology");
  dof->add_option("--topology", o.topology, "Fixture name or topology file");
  dof->add_option("--fixed", o.fixed, "Joints frozen for a driving-pair check")->delimiter(',');

  auto* show = app.add_subcommand("show", "Print a robot definition, or list robots");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", o.host, "Bind address (default $MODKIN_HOST or 127.0.0.1)");
  serve->add_option("--port", o.port, "Port (default $MODKIN_PORT or 8080)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  const svc::Codec codec{o.radians ? svc::AngleUnit::radians : svc::AngleUnit::degrees};
  try {
    if (fk->parsed()) return run_fk(o, codec);
    if (ik->parsed()) return run_ik(o, codec);
    if (dof->parsed()) return run_dof(o);
    if (show->parsed()) return run_show(o);
    if (serve->parsed()) return run_serve(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return usage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config;
  } catch (const Error& e) {
    std::cerr << "error [" << modkin::to_string(e.code()) << "]: " << e.what();
    if (!e.field().empty()) std::cerr << " (" << e.field() << ")";
    std::cerr << "\n";
    switch (e.code()) {
      case ErrorCode::invalid_argument:
        return usage;
      case ErrorCode::parse_error:
      case ErrorCode::validation_error:
        return config;
      default:
        return kinematic;
    }
  }
  return usage;
}
