#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "modkin/core_math.hpp"
#include "modkin/module_kin.hpp"

namespace modkin {

/// Geometry of the 3-RRPS platform. Limb i runs from the base anchor b_i,
/// through a passive revolute with axis u_i, along a module RP limb, to a
/// spherical joint at platform anchor d_i (moving frame).
///
/// Each limb moves in the plane through b_i normal to u_i. Inside that plane
/// the limb angle q is measured from the radial direction
/// i_hat = normalize(u_i x z) towards k_hat = i_hat x u_i.
struct ParallelGeometry {
  std::array<Vec3, 3> base_anchors;     // b_i, world frame, mm
  std::array<Vec3, 3> base_axes;        // u_i, unit
  std::array<Vec3, 3> platform_anchors; // d_i, moving frame, mm
  double edge = 150.0;                  // platform triangle edge e, mm
  std::array<ModuleGeometry, 3> limbs{};

  /// Anchors at 0, 120 and 240 deg on a base circle, axes horizontal and
  /// tangential, platform an equilateral triangle of edge `edge` aligned
  /// with the base anchors.
  static ParallelGeometry symmetric(double base_radius, double edge,
                                    const ModuleGeometry& limb = {});

  void validate() const;

  Vec3 limb_radial(int i) const;    // i_hat of limb i
  Vec3 limb_vertical(int i) const;  // k_hat of limb i
};

struct LimbState {
  double q = 0.0;      // limb angle in its plane, rad
  double q_bar = 0.0;  // limb length |c - b|, mm
  Vec3 c = Vec3::Zero();  // spherical joint centre, world, mm
};

struct PlatformPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 position = Vec3::Zero();  // moving-platform centre, mm

  HomTransform transform() const { return {rotation, position}; }
  static PlatformPose from_transform(const HomTransform& t) { return {t.rotation(), t.position()}; }
};

/// |dr| + ||dR||_F, millimetres plus a dimensionless rotation term. Used both
/// for solution deduplication and for nearest-branch selection while jogging.
double pose_distance(const PlatformPose& lhs, const PlatformPose& rhs);

using Corners = std::array<Vec3, 3>;
using Residuals = Eigen::Matrix<double, 9, 1>;

/// Limb state reached by commanding (q, q_bar) on limb i.
Vec3 limb_corner(int i, double q, double q_bar, const ParallelGeometry& g);

std::array<LimbState, 3> parallel_ik(const PlatformPose& pose, const ParallelGeometry& g);

/// Residuals ordered (revolute constraint x3, loop closure x3, compatibility
/// x3 for the pairs (1,2), (2,3), (3,1)). Units: mm for the first block,
/// mm^2 for the other two.
Residuals constraint_residuals(const Corners& c, const std::array<double, 3>& q_bar,
                               const ParallelGeometry& g);

PlatformPose pose_from_corners(const Corners& c, const ParallelGeometry& g);

ActuatorPair limb_actuators(const LimbState& limb, const ModuleGeometry& geom,
                            ModuleBranch branch = ModuleBranch::ascending);

/// Identity orientation, centred above the base, limbs at mid stroke.
PlatformPose nominal_home_pose(const ParallelGeometry& g);

struct ForwardOptions {
  std::optional<PlatformPose> seed;
  std::optional<PlatformPose> previous;  // last accepted solution while jogging
  int random_starts = 64;
  std::uint64_t rng_seed = 0x6d6f646b696eULL;
  int max_iterations = 200;
  double step_tolerance = 1e-10;     // mm
  double residual_tolerance = 1e-8;  // max |residual| accepted as a solution
  double dedup_tolerance = 1e-4;     // pose_distance below which poses merge
  double angle_tolerance = 1e-6;     // commanded q must be reproduced this well
};

struct ForwardSolution {
  PlatformPose pose;
  Corners corners;
  Residuals residuals;
  double max_residual = 0.0;
  std::array<double, 3> limb_angles{};  // q of each limb at this pose
  int iterations = 0;
};

struct ForwardResult {
  std::vector<ForwardSolution> solutions;  // canonical order, deduplicated
  int starts_tried = 0;
  int starts_converged = 0;
  bool certified_infeasible = false;
};

/// Forward position analysis. The limb lengths q_bar drive the nine
/// constraint equations, which are solved by damped Newton iteration from
/// several starts.
///
/// Without `q`, every distinct assembly mode found is returned. With `q`,
/// the limb angles fully determine the corners and only a solution that
/// reproduces them within `angle_tolerance` is returned (an empty list means
/// the command is inconsistent with the rigid platform).
///
/// Throws limb_stroke for lengths outside module range and no_convergence
/// when no start converged and infeasibility could not be certified.
ForwardResult parallel_fk(const std::array<double, 3>& q_bar,
                          const std::optional<std::array<double, 3>>& q,
                          const ParallelGeometry& g, const ForwardOptions& options = {});

/// Index of the solution closest to `reference` (pose_distance), or -1 when
/// the list is empty.
int nearest_solution(const ForwardResult& result, const PlatformPose& reference);

}  // namespace modkin
