#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace modkin {

/// Planar mobility M = 3L - 2J - 3G. Returned as-is, including values <= 0.
int grubler(int links, int joints, int grounded);

/// Position-and-orientation characteristic set of an end link: a translation
/// part t^k and a rotation part r^k with their direction annotations.
///
/// Axis groups are named after the first joint label of the group in the
/// topology ("R11" stands for every axis parallel to R11).
struct PocSet {
  int t_dim = 0;
  int r_dim = 0;
  std::string t_normal;                // translations lie perpendicular to this group
  std::vector<std::string> t_along;    // prismatic directions spanning the translations
  std::string r_axis;                  // rotations are parallel to this group
  std::vector<std::string> r_members;  // joints merged into the rotation annotation

  int dim() const { return t_dim + r_dim; }
  std::string describe() const;

  bool operator==(const PocSet&) const = default;
};

/// Union of two POC sets. Translations perpendicular to the same axis group
/// stay planar; rotations about parallel axes merge into one composite
/// direction. Throws Error(annotation_mismatch) where no rule applies.
PocSet poc_union(const PocSet& a, const PocSet& b);

/// Intersection of two POC sets. Two planar translation sets with different
/// prismatic annotations intersect in a line.
PocSet poc_intersect(const PocSet& a, const PocSet& b);

/// Independent displacement equations per loop:
/// xi_j = dim((M_b1 n ... n M_bj) u M_b(j+1)) for j = 1 .. branches - 1.
std::vector<int> loop_independent_eqs(std::span<const PocSet> branches);

/// One element of a limb: a lone joint (label) or a five-bar style module
/// given as its branches between the two platforms.
struct TopologyElement {
  std::string joint;
  std::vector<std::vector<std::string>> branches;

  bool is_module() const { return !branches.empty(); }
};

/// Declarative mechanism description. Joint labels start with their kind:
/// R (revolute), P (prismatic) or S (spherical).
struct Topology {
  std::string name;
  std::optional<int> links;  // total link count incl. ground, for Grubler
  int grounded = 1;
  std::vector<std::vector<std::string>> parallel_groups;
  std::vector<std::pair<std::string, std::string>> perpendicular;
  std::vector<std::vector<TopologyElement>> limbs;  // one limb for serial stacks

  std::vector<std::string> joints() const;
  bool has_joint(std::string_view label) const;
  std::string axis_group(std::string_view label) const;
  bool is_perpendicular(std::string_view a, std::string_view b) const;
  /// Structural independent loop count: module loops plus limb loops.
  int independent_loops() const;
};

/// Degrees of freedom of a joint label from its kind letter (R/P: 1, S: 3).
int joint_freedom(std::string_view label);

/// Throws Error(validation_error) for duplicate or malformed labels,
/// dangling annotations, or a loop count inconsistent with `links`.
void validate_topology(const Topology& t);

/// POC set of one serial branch, derived from its joint kinds and the axis
/// annotations of the topology.
PocSet branch_poc(const Topology& t, std::span<const std::string> branch);

/// Number of independent displacement equations a limb contributes.
int limb_serial_dimension(const Topology& t, std::size_t limb);

struct DofReport {
  int dof = 0;
  int joint_freedoms = 0;        // sum of f_i
  int constraint_equations = 0;  // sum of xi over all loops / limbs
  std::vector<int> loop_equations;   // xi per module loop, in topology order
  std::vector<int> limb_dimensions;  // per limb
  int independent_loops = 0;
  std::optional<int> grubler;    // when the link count is known and the mechanism is planar
};

DofReport mechanism_dof(const Topology& t);

/// Mobility left after freezing `fixed` joints. Throws Error(unknown_joint).
int frozen_dof(const Topology& t, std::span<const std::string> fixed);

/// True when freezing `fixed` leaves zero mobility, i.e. the joints can act
/// together as the driving pairs.
bool driving_pair_check(const Topology& t, std::span<const std::string> fixed);

Topology parse_topology(std::string_view json_text);
Topology load_topology_file(const std::filesystem::path& path);

/// Topology fixtures compiled into the library: "module", "hybrid4",
/// "hybrid6", "parallel".
std::vector<std::string> shipped_topology_names();
Topology shipped_topology(std::string_view name);

}  // namespace modkin
