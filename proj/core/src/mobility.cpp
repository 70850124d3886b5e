#include "modkin/mobility.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "embedded_data.hpp"
#include "modkin/errors.hpp"

namespace modkin {

namespace {

using nlohmann::json;

std::vector<std::string> merged(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return {s.begin(), s.end()};
}

[[noreturn]] void mismatch(const PocSet& a, const PocSet& b, const char* op) {
  throw Error(ErrorCode::annotation_mismatch,
              std::string("no POC ") + op + " rule for " + a.describe() + " and " + b.describe());
}

void require_normals(const PocSet& a, const PocSet& b, const char* op) {
  if (a.t_normal.empty() || b.t_normal.empty()) mismatch(a, b, op);
}

char kind_of(std::string_view label) { return label.empty() ? '\0' : label.front(); }

// Lone joints are only understood at the ends of a limb between two
// platforms: a base revolute before the module(s) and a spherical joint
// after them.
void check_lone_joint_pattern(const Topology& t, const std::vector<TopologyElement>& limb) {
  for (std::size_t k = 0; k < limb.size(); ++k) {
    const TopologyElement& e = limb[k];
    if (e.is_module()) continue;
    const bool base_revolute = k == 0 && kind_of(e.joint) == 'R' && limb.size() > 1;
    const bool platform_spherical =
        k + 1 == limb.size() && kind_of(e.joint) == 'S' && limb.size() > 1;
    if (t.limbs.size() < 2 || !(base_revolute || platform_spherical)) {
      throw Error(ErrorCode::unsupported_rule,
                  "lone joint " + e.joint +
                      " outside the base-revolute / platform-spherical limb pattern");
    }
  }
}

std::vector<std::string> string_list(const json& j, const std::string& field) {
  if (!j.is_array()) throw Error(ErrorCode::parse_error, "expected an array of labels", field);
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) throw Error(ErrorCode::parse_error, "expected a joint label", field);
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

int grubler(int links, int joints, int grounded) { return 3 * links - 2 * joints - 3 * grounded; }

std::string PocSet::describe() const {
  std::ostringstream out;
  out << "(t^" << t_dim;
  if (!t_normal.empty() && t_dim > 0 && t_dim < 3) out << " perp " << t_normal;
  for (const auto& p : t_along) out << " par " << p;
  out << "; r^" << r_dim;
  if (r_dim > 0 && r_dim < 3) {
    out << " par ";
    if (r_members.size() > 1) {
      out << "<>(";
      for (std::size_t i = 0; i < r_members.size(); ++i) out << (i ? "," : "") << r_members[i];
      out << ")";
    } else if (!r_members.empty()) {
      out << r_members.front();
    } else {
      out << r_axis;
    }
  }
  out << ")";
  return out.str();
}

PocSet poc_union(const PocSet& a, const PocSet& b) {
  PocSet out;
  // Translations.
  if (a.t_dim == 3 || b.t_dim == 3) {
    out.t_dim = 3;
  } else if (a.t_dim == 0 || b.t_dim == 0) {
    const PocSet& src = a.t_dim == 0 ? b : a;
    out.t_dim = src.t_dim;
    out.t_normal = src.t_normal;
    out.t_along = src.t_along;
  } else {
    require_normals(a, b, "union");
    if (a.t_normal == b.t_normal) {
      out.t_normal = a.t_normal;
      out.t_along = merged(a.t_along, b.t_along);
      const bool same_line = a.t_dim == 1 && b.t_dim == 1 && a.t_along == b.t_along;
      out.t_dim = same_line ? 1 : 2;
    } else {
      out.t_dim = std::min(3, a.t_dim + b.t_dim);
      if (out.t_dim < 3) mismatch(a, b, "union");
    }
  }
  // Rotations.
  if (a.r_dim == 3 || b.r_dim == 3) {
    out.r_dim = 3;
  } else if (a.r_dim == 0 || b.r_dim == 0) {
    const PocSet& src = a.r_dim == 0 ? b : a;
    out.r_dim = src.r_dim;
    out.r_axis = src.r_axis;
    out.r_members = src.r_members;
  } else if (a.r_dim == 1 && b.r_dim == 1) {
    out.r_members = merged(a.r_members, b.r_members);
    if (a.r_axis == b.r_axis && !a.r_axis.empty()) {
      out.r_dim = 1;
      out.r_axis = a.r_axis;
    } else {
      out.r_dim = 2;
    }
  } else {
    mismatch(a, b, "union");
  }
  return out;
}

PocSet poc_intersect(const PocSet& a, const PocSet& b) {
  PocSet out;
  // Translations.
  if (a.t_dim == 0 || b.t_dim == 0) {
    out.t_dim = 0;
  } else if (a.t_dim == 3 || b.t_dim == 3) {
    const PocSet& src = a.t_dim == 3 ? b : a;
    out.t_dim = src.t_dim;
    out.t_normal = src.t_normal;
    out.t_along = src.t_along;
  } else {
    require_normals(a, b, "intersection");
    if (a.t_normal != b.t_normal) {
      if (a.t_dim == 2 && b.t_dim == 2) {
        out.t_dim = 1;  // two non-parallel planes meet in a line
      } else {
        mismatch(a, b, "intersection");
      }
    } else {
      out.t_normal = a.t_normal;
      if (a.t_dim == 2 && b.t_dim == 2) {
        if (a.t_along == b.t_along) {
          out.t_dim = 2;
          out.t_along = a.t_along;
        } else {
          out.t_dim = 1;
        }
      } else if (a.t_dim == 1 && b.t_dim == 1) {
        out.t_dim = a.t_along == b.t_along ? 1 : 0;
        if (out.t_dim == 1) out.t_along = a.t_along;
      } else {
        const PocSet& line = a.t_dim == 1 ? a : b;
        out.t_dim = 1;
        out.t_along = line.t_along;
      }
    }
  }
  // Rotations.
  if (a.r_dim == 0 || b.r_dim == 0) {
    out.r_dim = 0;
  } else if (a.r_dim == 3 || b.r_dim == 3) {
    const PocSet& src = a.r_dim == 3 ? b : a;
    out.r_dim = src.r_dim;
    out.r_axis = src.r_axis;
    out.r_members = src.r_members;
  } else if (a.r_dim == 1 && b.r_dim == 1) {
    if (a.r_axis == b.r_axis && !a.r_axis.empty()) {
      out.r_dim = 1;
      out.r_axis = a.r_axis;
      out.r_members = merged(a.r_members, b.r_members);
    }
  } else {
    mismatch(a, b, "intersection");
  }
  return out;
}

std::vector<int> loop_independent_eqs(std::span<const PocSet> branches) {
  if (branches.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "loop equations need at least two branches");
  }
  std::vector<int> xi;
  PocSet common = branches[0];
  for (std::size_t j = 1; j < branches.size(); ++j) {
    xi.push_back(poc_union(common, branches[j]).dim());
    common = poc_intersect(common, branches[j]);
  }
  return xi;
}

int joint_freedom(std::string_view label) {
  switch (kind_of(label)) {
    case 'R':
    case 'P':
      return 1;
    case 'S':
      return 3;
    default:
      throw Error(ErrorCode::validation_error, "joint label must start with R, P or S",
                  std::string(label));
  }
}

std::vector<std::string> Topology::joints() const {
  std::vector<std::string> out;
  for (const auto& limb : limbs) {
    for (const auto& e : limb) {
      if (!e.is_module()) {
        out.push_back(e.joint);
        continue;
      }
      for (const auto& branch : e.branches) out.insert(out.end(), branch.begin(), branch.end());
    }
  }
  return out;
}

bool Topology::has_joint(std::string_view label) const {
  const auto all = joints();
  return std::find(all.begin(), all.end(), label) != all.end();
}

std::string Topology::axis_group(std::string_view label) const {
  for (const auto& group : parallel_groups) {
    if (std::find(group.begin(), group.end(), label) != group.end()) return group.front();
  }
  return std::string(label);
}

bool Topology::is_perpendicular(std::string_view a, std::string_view b) const {
  return std::any_of(perpendicular.begin(), perpendicular.end(), [&](const auto& pair) {
    return (pair.first == a && pair.second == b) || (pair.first == b && pair.second == a);
  });
}

int Topology::independent_loops() const {
  int loops = limbs.empty() ? 0 : static_cast<int>(limbs.size()) - 1;
  for (const auto& limb : limbs) {
    for (const auto& e : limb) {
      if (e.is_module()) loops += static_cast<int>(e.branches.size()) - 1;
    }
  }
  return loops;
}

void validate_topology(const Topology& t) {
  if (t.limbs.empty()) throw Error(ErrorCode::validation_error, "no limbs", "limbs");
  const auto all = t.joints();
  std::set<std::string> seen;
  for (const auto& label : all) {
    joint_freedom(label);
    if (!seen.insert(label).second) {
      throw Error(ErrorCode::validation_error, "joint " + label + " appears in more than one branch",
                  "limbs");
    }
  }
  for (std::size_t g = 0; g < t.parallel_groups.size(); ++g) {
    for (const auto& label : t.parallel_groups[g]) {
      if (!seen.count(label)) {
        throw Error(ErrorCode::validation_error, "annotation references unknown joint " + label,
                    "parallel[" + std::to_string(g) + "]");
      }
    }
  }
  for (std::size_t k = 0; k < t.perpendicular.size(); ++k) {
    for (const auto& label : {t.perpendicular[k].first, t.perpendicular[k].second}) {
      if (!seen.count(label)) {
        throw Error(ErrorCode::validation_error, "annotation references unknown joint " + label,
                    "perpendicular[" + std::to_string(k) + "]");
      }
    }
  }
  const int v = t.independent_loops();
  if (v < 0) throw Error(ErrorCode::validation_error, "negative loop count", "limbs");
  if (t.links) {
    const int from_counts = static_cast<int>(all.size()) - *t.links + 1;
    if (from_counts != v) {
      throw Error(ErrorCode::validation_error,
                  "link count implies " + std::to_string(from_counts) + " loops, structure has " +
                      std::to_string(v),
                  "links");
    }
  }
}

PocSet branch_poc(const Topology& t, std::span<const std::string> branch) {
  if (branch.empty()) throw Error(ErrorCode::validation_error, "empty branch", "limbs");
  PocSet poc;
  if (branch.size() == 1) {
    const std::string& j = branch.front();
    switch (kind_of(j)) {
      case 'R':
        poc.t_dim = 1;
        poc.t_normal = t.axis_group(j);
        poc.r_dim = 1;
        poc.r_axis = t.axis_group(j);
        poc.r_members = {j};
        return poc;
      case 'P':
        poc.t_dim = 1;
        poc.t_along = {j};
        return poc;
      default:
        poc.t_dim = 3;
        poc.r_dim = 3;
        return poc;
    }
  }
  // Planar branch: all revolutes parallel, every prismatic perpendicular to them.
  std::vector<std::string> revolutes;
  std::vector<std::string> prismatics;
  for (const auto& j : branch) {
    const char kind = kind_of(j);
    if (kind == 'R') revolutes.push_back(j);
    else if (kind == 'P') prismatics.push_back(j);
    else throw Error(ErrorCode::unsupported_rule, "spherical joint " + j + " inside a branch");
  }
  if (revolutes.empty()) {
    throw Error(ErrorCode::unsupported_rule, "branch without revolute joints");
  }
  const std::string group = t.axis_group(revolutes.front());
  for (const auto& r : revolutes) {
    if (t.axis_group(r) != group) {
      throw Error(ErrorCode::unsupported_rule, "branch revolutes " + revolutes.front() + " and " +
                                                   r + " are not parallel");
    }
  }
  for (const auto& p : prismatics) {
    const bool perp = std::any_of(revolutes.begin(), revolutes.end(),
                                  [&](const std::string& r) { return t.is_perpendicular(p, r); });
    if (!perp) {
      throw Error(ErrorCode::unsupported_rule,
                  "prismatic " + p + " not declared perpendicular to the branch revolutes");
    }
  }
  poc.t_dim = 2;
  poc.t_normal = group;
  poc.t_along = merged(prismatics, {});
  poc.r_dim = 1;
  poc.r_axis = group;
  poc.r_members = {revolutes.front()};
  return poc;
}

namespace {

std::vector<int> module_loops(const Topology& t, const TopologyElement& module) {
  std::vector<PocSet> pocs;
  for (const auto& branch : module.branches) pocs.push_back(branch_poc(t, branch));
  return loop_independent_eqs(pocs);
}

}  // namespace

int limb_serial_dimension(const Topology& t, std::size_t limb) {
  if (limb >= t.limbs.size()) {
    throw Error(ErrorCode::invalid_argument, "limb index out of range");
  }
  const auto& elements = t.limbs[limb];
  check_lone_joint_pattern(t, elements);
  int dim = 0;
  for (const auto& e : elements) {
    if (e.is_module()) {
      for (int xi : module_loops(t, e)) dim += xi;
    } else if (kind_of(e.joint) == 'R') {
      dim += branch_poc(t, std::span<const std::string>(&e.joint, 1)).dim();
    } else {
      // Spherical joint at the moving platform: counted with two
      // independent equations in the limb sum.
      dim += 2;
    }
  }
  return dim;
}

DofReport mechanism_dof(const Topology& t) {
  validate_topology(t);
  DofReport report;
  const auto all = t.joints();
  for (const auto& j : all) report.joint_freedoms += joint_freedom(j);
  for (std::size_t l = 0; l < t.limbs.size(); ++l) {
    for (const auto& e : t.limbs[l]) {
      if (!e.is_module()) continue;
      const auto xi = module_loops(t, e);
      report.loop_equations.insert(report.loop_equations.end(), xi.begin(), xi.end());
    }
    report.limb_dimensions.push_back(limb_serial_dimension(t, l));
    report.constraint_equations += report.limb_dimensions.back();
  }
  report.dof = report.joint_freedoms - report.constraint_equations;
  report.independent_loops = t.independent_loops();
  const bool planar = std::none_of(all.begin(), all.end(),
                                   [](const std::string& j) { return kind_of(j) == 'S'; });
  if (t.links && planar && t.limbs.size() == 1 && t.limbs.front().size() == 1) {
    report.grubler = grubler(*t.links, static_cast<int>(all.size()), t.grounded);
  }
  return report;
}

int frozen_dof(const Topology& t, std::span<const std::string> fixed) {
  const DofReport report = mechanism_dof(t);
  int removed = 0;
  for (const auto& j : fixed) {
    if (!t.has_joint(j)) throw Error(ErrorCode::unknown_joint, "unknown joint " + j);
    removed += joint_freedom(j);
  }
  return report.joint_freedoms - removed - report.constraint_equations;
}

bool driving_pair_check(const Topology& t, std::span<const std::string> fixed) {
  return frozen_dof(t, fixed) == 0;
}

Topology parse_topology(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("topology is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::parse_error, "topology must be a JSON object");

  Topology t;
  try {
    t.name = doc.value("name", std::string{});
    if (doc.contains("links")) t.links = doc.at("links").get<int>();
    t.grounded = doc.value("grounded", 1);
    if (doc.contains("parallel")) {
      const auto& groups = doc.at("parallel");
      for (std::size_t g = 0; g < groups.size(); ++g) {
        t.parallel_groups.push_back(string_list(groups[g], "parallel[" + std::to_string(g) + "]"));
      }
    }
    if (doc.contains("perpendicular")) {
      const auto& pairs = doc.at("perpendicular");
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto labels = string_list(pairs[k], "perpendicular[" + std::to_string(k) + "]");
        if (labels.size() != 2) {
          throw Error(ErrorCode::parse_error, "perpendicular entries are label pairs",
                      "perpendicular[" + std::to_string(k) + "]");
        }
        t.perpendicular.emplace_back(labels[0], labels[1]);
      }
    }
    const auto& limbs = doc.at("limbs");
    for (std::size_t l = 0; l < limbs.size(); ++l) {
      std::vector<TopologyElement> limb;
      for (std::size_t k = 0; k < limbs[l].size(); ++k) {
        const auto& item = limbs[l][k];
        const std::string field = "limbs[" + std::to_string(l) + "][" + std::to_string(k) + "]";
        TopologyElement e;
        if (item.is_string()) {
          e.joint = item.get<std::string>();
        } else if (item.is_object() && item.contains("module")) {
          const auto& branches = item.at("module");
          for (std::size_t b = 0; b < branches.size(); ++b) {
            e.branches.push_back(string_list(branches[b], field + ".module[" + std::to_string(b) + "]"));
          }
          if (e.branches.size() < 2) {
            throw Error(ErrorCode::parse_error, "a module needs at least two branches", field);
          }
        } else {
          throw Error(ErrorCode::parse_error, "limb element must be a joint label or {\"module\": ...}",
                      field);
        }
        limb.push_back(std::move(e));
      }
      t.limbs.push_back(std::move(limb));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed topology: ") + e.what());
  }
  validate_topology(t);
  return t;
}

Topology load_topology_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open topology file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_topology(buffer.str());
}

std::vector<std::string> shipped_topology_names() {
  std::vector<std::string> names;
  for (const auto& f : detail::embedded_topologies()) names.emplace_back(f.name);
  return names;
}

Topology shipped_topology(std::string_view name) {
  for (const auto& f : detail::embedded_topologies()) {
    if (f.name == name) return parse_topology(f.contents);
  }
  throw Error(ErrorCode::invalid_argument, "no shipped topology named " + std::string(name));
}

}  // namespace modkin
