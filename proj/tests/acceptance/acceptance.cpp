// One line per acceptance criterion. Exit status is nonzero when any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <sys/wait.h>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "modkin/hybrid_kin.hpp"
#include "modkin/mobility.hpp"
#include "modkin/module_kin.hpp"
#include "modkin/parallel_kin.hpp"
#include "modkin/robot_config.hpp"
#include "modkin/service/codec.hpp"
#include "modkin/service/http_server.hpp"
#include "oracles.hpp"
#include "platform_fixtures.hpp"

// After Eigen: resolv.h defines _res as a macro.
#include <httplib.h>

using namespace modkin;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
  std::printf("%s  %-28s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void info(const std::string& name, const std::string& detail) {
  std::printf("INFO  %-28s %s\n", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string format(const char* spec, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, spec, args...);
  return buf;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

const RobotDefinition& preset(const std::string& name) {
  static const auto all = builtin_presets();
  for (const auto& d : all) {
    if (d.name == name) return d;
  }
  throw std::runtime_error("missing preset " + name);
}

const double kPrinted[12] = {-0.3535, 0.3827, 0.8535, 309.059,  -0.1464, -0.9239,
                             0.3535,  -142.581, 0.9239, 0.0,     0.3827,  145.67};

void golden_fk() {
  const auto t0 = Clock::now();
  const HybridGeometry g = hybrid_geometry(preset("paper-hybrid4"));
  const ActuatorPair act[] = {{deg_to_rad(22.0), deg_to_rad(23.0)}, {deg_to_rad(22.0), deg_to_rad(23.0)}};
  const SerialCoords s1 = actuators_to_serial(act[0], g.modules[0]);
  const SerialCoords s2 = actuators_to_serial(act[1], g.modules[1]);
  const HomTransform t = fk_rprp({s1.theta, s1.d, s2.theta, s2.d}, g);
  const double elapsed = ms_since(t0);

  const double joint_err = std::max({std::abs(rad_to_deg(s1.theta) - 22.5), std::abs(s1.d - 250.0),
                                     std::abs(rad_to_deg(s2.theta) - 22.5), std::abs(s2.d - 250.0)});
  const auto m = t.row_major();
  double matrix_err = 0.0;
  for (int i = 0; i < 12; ++i) matrix_err = std::max(matrix_err, std::abs(m[i] - kPrinted[i]));
  report(joint_err < 1e-6 && matrix_err < 1e-3 && elapsed < 1.0, "golden-fk",
         format("serial joint err %.2e (tol 1e-6), matrix err %.2e (tol 1e-3), %.4f ms (tol 1 ms)",
                joint_err, matrix_err, elapsed));
}

void golden_ik() {
  const HybridGeometry g = hybrid_geometry(preset("paper-hybrid4"));
  const ActuatorPair act[] = {{deg_to_rad(22.0), deg_to_rad(23.0)}, {deg_to_rad(22.0), deg_to_rad(23.0)}};
  const HomTransform pose = hybrid_actuators_fk(act, g);
  const SerialJoints4 j = ik_rprp(pose, g);
  const ActuatorPair back[] = {serial_to_actuators({j.theta1, j.d2}, g.modules[0]),
                               serial_to_actuators({j.theta3, j.d4}, g.modules[1])};
  double err = 0.0;
  for (const auto& p : back) {
    err = std::max({err, std::abs(rad_to_deg(p.theta_r1) - 22.0), std::abs(rad_to_deg(p.theta_r2) - 23.0)});
  }
  report(err < 1e-4, "golden-ik", format("actuator err %.2e deg (tol 1e-4) from the fk matrix", err));

  std::array<double, 16> printed{};
  std::copy(std::begin(kPrinted), std::end(kPrinted), printed.begin());
  printed[15] = 1.0;
  const HomTransform rounded = HomTransform::from_row_major(printed);
  try {
    ik_rprp(rounded, g);
    info("golden-ik-printed", "4-digit printed matrix accepted by ik_rprp");
  } catch (const Error& e) {
    info("golden-ik-printed", format("4-digit printed matrix rejected: %s", e.what()));
  }
}

void dof_table() {
  const std::pair<const char*, int> want[] = {{"module", 2}, {"hybrid4", 4}, {"hybrid6", 6}, {"parallel", 6}};
  bool ok = true;
  std::string got;
  for (const auto& [name, dof] : want) {
    const int d = mechanism_dof(shipped_topology(name)).dof;
    ok = ok && d == dof;
    got += format("%s=%d ", name, d);
  }
  const int gr = grubler(7, 8, 1);
  const auto loops = mechanism_dof(shipped_topology("module")).loop_equations;
  const auto limbs = mechanism_dof(shipped_topology("parallel")).limb_dimensions;
  ok = ok && gr == 2 && loops == std::vector<int>{3, 3} && !limbs.empty() &&
       std::all_of(limbs.begin(), limbs.end(), [](int x) { return x == 10; });
  std::string loop_text, limb_text;
  for (int x : loops) loop_text += std::to_string(x) + " ";
  for (int x : limbs) limb_text += std::to_string(x) + " ";
  report(ok, "dof-table",
         got + format("grubler(7,8,1)=%d module loops [%s] parallel limbs [%s]", gr,
                      loop_text.c_str(), limb_text.c_str()));
}

void module_suite() {
  const ModuleGeometry g = module_geometry(preset("paper-module").modules[0]);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> base(-2.5, 2.5);
  std::uniform_real_distribution<double> sep(-g.theta_diff_max, g.theta_diff_max);
  std::uniform_real_distribution<double> radius(g.min_reach(), g.max_reach());
  std::uniform_real_distribution<double> heading(-std::numbers::pi, std::numbers::pi);
  const int n = 10000;
  double ikfk = 0.0, fkik = 0.0, oracle_err = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r1 = base(rng);
    const double r2 = r1 + sep(rng);
    const ModuleState s = module_fk(r1, r2, g);
    const ActuatorPair back =
        module_ik(s.tip, g, r2 >= r1 ? ModuleBranch::ascending : ModuleBranch::descending);
    ikfk = std::max({ikfk, std::abs(wrap_angle(back.theta_r1 - r1)), std::abs(wrap_angle(back.theta_r2 - r2))});
    oracle_err = std::max(oracle_err, (s.tip - oracle::five_bar_tip(r1, r2, g.a, g.c, g.origin)).norm());

    const double r = radius(rng), h = heading(rng);
    const Vec2 tip = g.origin + r * Vec2(std::cos(h), std::sin(h));
    const ActuatorPair a = module_ik(tip, g);
    fkik = std::max(fkik, (module_fk(a.theta_r1, a.theta_r2, g).tip - tip).norm());
  }
  report(ikfk < 1e-9 && fkik < 1e-9 && oracle_err < 1e-9, "module-properties",
         format("%d samples: IK(FK) %.2e rad, FK(IK) %.2e mm, five-bar oracle %.2e mm (tol 1e-9)", n,
                ikfk, fkik, oracle_err));
}

void hybrid6_suite() {
  const HybridGeometry g = hybrid_geometry(preset("paper-hybrid6"));
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> ang(-3.1, 3.1);
  std::uniform_real_distribution<double> len(g.modules[0].min_reach(), g.modules[0].max_reach());
  const int n = 10000;
  double dh_err = 0.0, rt_err = 0.0, d4_gap = 0.0, d4_gap_min = 1e300;
  int skipped = 0, tested = 0;
  while (tested < n) {
    const SerialJoints6 j{ang(rng), len(rng), ang(rng), len(rng), ang(rng), len(rng)};
    const HomTransform t = fk_rprprp(j, g);
    const oracle::Mat4 ref = oracle::rprprp_table_product(j.theta1, j.d2, j.theta3, j.d4, j.theta5, j.d6, g.l2);
    dh_err = std::max(dh_err, (t.matrix() - ref).cwiseAbs().maxCoeff());
    if (std::abs(std::sin(j.theta3)) < 1e-3 || std::abs(std::cos(j.theta3)) < 1e-3) {
      ++skipped;
      continue;
    }
    ++tested;
    const SerialJoints6 b = ik_rprprp(t, j.d6, g);
    rt_err = std::max({rt_err, std::abs(wrap_angle(b.theta1 - j.theta1)), std::abs(wrap_angle(b.theta3 - j.theta3)),
                       std::abs(wrap_angle(b.theta5 - j.theta5)), std::abs(b.d2 - j.d2), std::abs(b.d4 - j.d4)});
    const double gap = std::abs(d4_split_denominator_form(t, b, g.l2) - j.d4);
    if (std::isfinite(gap)) {
      d4_gap = std::max(d4_gap, gap);
      d4_gap_min = std::min(d4_gap_min, gap);
    }
  }
  report(dh_err < 1e-12, "hybrid6-dh-oracle",
         format("%d samples, max entry err %.2e (tol 1e-12)", tested + skipped, dh_err));
  report(rt_err < 1e-6, "hybrid6-ik-round-trip",
         format("%d samples (%d in the sin/cos(theta3) < 1e-3 bands skipped), max err %.2e (tol 1e-6)",
                tested, skipped, rt_err));
  info("hybrid6-printed-d4",
       format("printed d4 expression vs elimination result: |diff| from %.3g to %.3g mm over %d poses",
              d4_gap_min, d4_gap, tested));
}

void parallel_suite() {
  const ParallelGeometry g = parallel_geometry(preset("paper-parallel"));
  const int n = 1000;
  const auto t0 = Clock::now();
  const auto inst = fixtures::instances(g, n, 107);
  int seeded_ok = 0, unseeded_ok = 0;
  double worst_residual = 0.0, worst_pos = 0.0, worst_rot = 0.0;
  std::size_t most = 0;
  const auto consume = [&](const ForwardResult& res) {
    most = std::max(most, res.solutions.size());
    for (const auto& s : res.solutions) worst_residual = std::max(worst_residual, s.max_residual);
  };
  for (const auto& in : inst) {
    const PlatformPose truth = fixtures::to_pose(in.pose);
    ForwardOptions seeded;
    seeded.seed = truth;
    const ForwardResult a = parallel_fk(in.q_bar, std::nullopt, g, seeded);
    consume(a);
    const int k = nearest_solution(a, truth);
    if (k >= 0) {
      const auto& p = a.solutions[static_cast<std::size_t>(k)].pose;
      const double dp = (p.position - truth.position).norm();
      const double dr = (p.rotation - truth.rotation).norm();
      worst_pos = std::max(worst_pos, dp);
      worst_rot = std::max(worst_rot, dr);
      if (dp < 1e-6 && dr < 1e-6) ++seeded_ok;
    }
    const ForwardResult b = parallel_fk(in.q_bar, std::nullopt, g);
    consume(b);
    for (const auto& s : b.solutions) {
      if ((s.pose.position - truth.position).norm() < 1e-6 && (s.pose.rotation - truth.rotation).norm() < 1e-6) {
        ++unseeded_ok;
        break;
      }
    }
  }
  const double seconds = ms_since(t0) / 1000.0;
  report(seeded_ok == n, "parallel-seeded",
         format("%d/%d recovered, worst position %.2e mm, rotation %.2e (tol 1e-6)", seeded_ok, n,
                worst_pos, worst_rot));
  report(unseeded_ok >= 0.99 * n, "parallel-unseeded",
         format("%d/%d found without a seed (need >= 99%%)", unseeded_ok, n));
  report(worst_residual < 1e-8, "parallel-residuals", format("max residual %.2e (tol 1e-8)", worst_residual));
  report(most <= 16, "parallel-solution-count", format("at most %zu distinct solutions (bound 16)", most));
  report(seconds < 60.0, "parallel-runtime", format("%.2f s for the suite (limit 60 s)", seconds));
}

struct Run {
  int exit_code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MODKIN_CLI_PATH + "\" " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<double> to_deg(const std::vector<ActuatorPair>& pairs) {
  std::vector<double> out;
  for (const auto& p : pairs) {
    out.push_back(rad_to_deg(p.theta_r1));
    out.push_back(rad_to_deg(p.theta_r2));
  }
  return out;
}

void service_conformance() {
  service::Service svc;
  httplib::Server server;
  service::mount_routes(server, svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  const auto post = [&](const std::string& path, const json& body) {
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res || res->status != 200) {
      throw std::runtime_error("request failed: " + path + (res ? " " + res->body : std::string()));
    }
    return json::parse(res->body);
  };

  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> base(-60.0, 60.0);
  std::uniform_real_distribution<double> sep(1.0, 120.0);
  int compared = 0, mismatched = 0;
  std::string failure;
  try {
    for (const char* name : {"paper-hybrid4", "paper-hybrid6"}) {
      const RobotDefinition& def = preset(name);
      const HybridGeometry g = hybrid_geometry(def);
      for (int i = 0; i < 50; ++i) {
        std::vector<double> deg;
        std::vector<ActuatorPair> pairs;
        for (std::size_t k = 0; k < g.modules.size(); ++k) {
          const double r1 = base(rng), r2 = r1 + sep(rng);
          deg.insert(deg.end(), {r1, r2});
          pairs.push_back({deg_to_rad(r1), deg_to_rad(r2)});
        }
        const HomTransform lib = hybrid_actuators_fk(pairs, g);
        const json fk = post(std::string("/api/robots/") + name + "/fk", {{"actuators_deg", deg}});
        const auto m = lib.row_major();
        ++compared;
        if (fk.at("pose").at("matrix").get<std::vector<double>>() != std::vector<double>(m.begin(), m.end())) {
          ++mismatched;
        }
        json ik_body = {{"pose", service::pose_json(lib)}};
        std::optional<double> d6;
        if (g.modules.size() == 3) {
          d6 = actuators_to_serial(pairs[2], g.modules[2]).d;
          ik_body["d6_mm"] = *d6;
        }
        const json ik = post(std::string("/api/robots/") + name + "/ik", ik_body);
        ++compared;
        if (ik.at("actuators_deg").get<std::vector<double>>() != to_deg(hybrid_actuators_ik(lib, d6, g))) {
          ++mismatched;
        }
      }
    }
    const ModuleGeometry mg = module_geometry(preset("paper-module").modules[0]);
    for (int i = 0; i < 50; ++i) {
      const double r1 = base(rng), r2 = r1 + sep(rng);
      const ModuleState s = module_fk(deg_to_rad(r1), deg_to_rad(r2), mg);
      const json fk = post("/api/robots/paper-module/fk", {{"actuators_deg", {r1, r2}}});
      ++compared;
      if (fk.at("module").at("tip_mm") != json::array({s.tip.x(), s.tip.y()})) ++mismatched;
      const ActuatorPair a = module_ik(s.tip, mg);
      const json ik = post("/api/robots/paper-module/ik", {{"tip_mm", {s.tip.x(), s.tip.y()}}});
      ++compared;
      if (ik.at("actuators_deg") != json::array({rad_to_deg(a.theta_r1), rad_to_deg(a.theta_r2)})) ++mismatched;
    }
    const ParallelGeometry pg = parallel_geometry(preset("paper-parallel"));
    for (const auto& in : fixtures::instances(pg, 20, 113)) {
      const ForwardResult lib = parallel_fk(in.q_bar, std::nullopt, pg);
      const json fk = post("/api/robots/paper-parallel/fk", {{"limb_lengths_mm", in.q_bar}});
      ++compared;
      bool same = fk.at("solutions").size() == lib.solutions.size();
      for (std::size_t k = 0; same && k < lib.solutions.size(); ++k) {
        const auto m = lib.solutions[k].pose.transform().row_major();
        same = fk.at("solutions")[k].at("pose").at("matrix").get<std::vector<double>>() ==
               std::vector<double>(m.begin(), m.end());
      }
      if (!same) ++mismatched;
      const auto limbs = parallel_ik(fixtures::to_pose(in.pose), pg);
      const json ik = post("/api/robots/paper-parallel/ik", {{"pose", service::pose_json(fixtures::to_pose(in.pose).transform())}});
      ++compared;
      for (int k = 0; k < 3; ++k) {
        if (ik.at("limbs")[k].at("q_bar_mm").get<double>() != limbs[k].q_bar) {
          ++mismatched;
          break;
        }
      }
    }
  } catch (const std::exception& e) {
    failure = e.what();
  }
  server.stop();
  thread.join();
  report(failure.empty() && mismatched == 0, "service-bit-identical",
         failure.empty() ? format("%d FK/IK responses compared, %d differ", compared, mismatched)
                         : failure);

  const Run fk = cli("--robot paper-hybrid4 --format structured fk 22,23,22,23");
  double err = 1e300;
  if (fk.exit_code == 0) {
    const auto m = json::parse(fk.out).at("pose").at("matrix").get<std::vector<double>>();
    err = 0.0;
    for (int i = 0; i < 12; ++i) err = std::max(err, std::abs(m[i] - kPrinted[i]));
  }
  report(fk.exit_code == 0 && err < 1e-3, "cli-golden-fk",
         format("exit %d, matrix err %.2e (tol 1e-3)", fk.exit_code, err));

  const Run dof = cli("--robot paper-parallel dof");
  report(dof.exit_code == 0 && dof.out.rfind("dof: 6\n", 0) == 0, "cli-golden-dof",
         format("exit %d, first line '%s'", dof.exit_code, dof.out.substr(0, dof.out.find('\n')).c_str()));

  const Run ik = cli("--robot paper-module ik --tip 1000,0");
  const bool names_bound = ik.out.find("outer reach") != std::string::npos;
  report(ik.exit_code == 4 && names_bound, "cli-golden-ik-unreachable",
         format("exit %d, message '%s'", ik.exit_code, ik.out.substr(0, ik.out.find('\n')).c_str()));
}

}  // namespace

int main() {
  const std::pair<const char*, void (*)()> suites[] = {
      {"golden-fk", golden_fk},         {"golden-ik", golden_ik},
      {"dof-table", dof_table},         {"module-properties", module_suite},
      {"hybrid6", hybrid6_suite},       {"parallel", parallel_suite},
      {"service", service_conformance},
  };
  for (const auto& [name, run] : suites) {
    try {
      run();
    } catch (const std::exception& e) {
      report(false, name, std::string("threw: ") + e.what());
    }
  }
  std::printf("%s  %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
