#include "modkin/parallel_kin.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "modkin/errors.hpp"

namespace modkin {

namespace {

using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

constexpr double kConstraintTol = 1e-6;
constexpr double kStrokeSlack = 1e-9;
constexpr std::array<std::pair<int, int>, 3> kPairs{{{0, 1}, {1, 2}, {2, 0}}};

std::string limb_name(int i) { return "limb " + std::to_string(i + 1); }

void check_stroke(int i, double q_bar, const ParallelGeometry& g) {
  const ModuleGeometry& m = g.limbs[static_cast<std::size_t>(i)];
  if (!(q_bar >= m.min_reach() - kStrokeSlack && q_bar <= m.max_reach() + kStrokeSlack)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << limb_name(i) << " length " << q_bar << " mm outside stroke [" << m.min_reach()
        << ", " << m.max_reach() << "] mm";
    throw Error(ErrorCode::limb_stroke, msg.str());
  }
}

Corners unpack(const Vec9& x) {
  return {x.segment<3>(0), x.segment<3>(3), x.segment<3>(6)};
}

Vec9 pack(const Corners& c) {
  Vec9 x;
  x << c[0], c[1], c[2];
  return x;
}

// Orthonormal frame attached to a point triangle: x along p1->p2, z along the
// triangle normal (right-handed in the point order).
Mat3 triangle_frame(const Corners& p) {
  const Vec3 e1 = p[1] - p[0];
  const Vec3 e2 = p[2] - p[0];
  const Vec3 normal = e1.cross(e2);
  if (normal.norm() <= 1e-9 * e1.norm() * e2.norm() || e1.norm() == 0.0) {
    throw Error(ErrorCode::collinear_points, "platform corners are collinear");
  }
  Mat3 f;
  f.col(0) = e1.normalized();
  f.col(2) = normal.normalized();
  f.col(1) = f.col(2).cross(f.col(0));
  return f;
}

Vec3 centroid(const Corners& p) { return (p[0] + p[1] + p[2]) / 3.0; }

struct NewtonOutcome {
  Corners corners;
  int iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt damped Newton iteration on the nine constraint
// equations. Rows are scaled to millimetres so that the three blocks are
// weighted comparably.
class ConstraintSystem {
 public:
  ConstraintSystem(const std::array<double, 3>& q_bar, const ParallelGeometry& g)
      : q_bar_(q_bar), g_(g) {
    for (int i = 0; i < 3; ++i) {
      scale_[i] = 1.0;
      scale_[3 + i] = 1.0 / (2.0 * std::max(q_bar[static_cast<std::size_t>(i)], 1.0));
      scale_[6 + i] = 1.0 / (2.0 * std::max(g.edge, 1.0));
    }
  }

  Vec9 scaled_residual(const Vec9& x) const {
    return constraint_residuals(unpack(x), q_bar_, g_).cwiseProduct(scale_);
  }

  Mat9 scaled_jacobian(const Vec9& x) const {
    const Corners c = unpack(x);
    Mat9 j = Mat9::Zero();
    for (int i = 0; i < 3; ++i) {
      const auto si = static_cast<std::size_t>(i);
      j.block<1, 3>(i, 3 * i) = g_.base_axes[si].transpose();
      j.block<1, 3>(3 + i, 3 * i) = 2.0 * (c[si] - g_.base_anchors[si]).transpose();
    }
    for (int k = 0; k < 3; ++k) {
      const auto [a, b] = kPairs[static_cast<std::size_t>(k)];
      const Vec3 diff = c[static_cast<std::size_t>(a)] - c[static_cast<std::size_t>(b)];
      j.block<1, 3>(6 + k, 3 * a) = 2.0 * diff.transpose();
      j.block<1, 3>(6 + k, 3 * b) = -2.0 * diff.transpose();
    }
    return scale_.asDiagonal() * j;
  }

  NewtonOutcome solve(const Corners& start, const ForwardOptions& opt) const {
    Vec9 x = pack(start);
    Vec9 f = scaled_residual(x);
    double cost = f.squaredNorm();
    double lambda = 1e-3;
    NewtonOutcome out;
    for (int it = 1; it <= opt.max_iterations; ++it) {
      out.iterations = it;
      const Mat9 jac = scaled_jacobian(x);
      const Mat9 jtj = jac.transpose() * jac;
      const Vec9 grad = jac.transpose() * f;
      bool accepted = false;
      Vec9 step;
      while (lambda < 1e12) {
        Mat9 damped = jtj;
        damped.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
        step = -damped.ldlt().solve(grad);
        const Vec9 trial = x + step;
        const Vec9 f_trial = scaled_residual(trial);
        const double trial_cost = f_trial.squaredNorm();
        if (std::isfinite(trial_cost) && trial_cost <= cost) {
          x = trial;
          f = f_trial;
          cost = trial_cost;
          lambda = std::max(lambda * 0.1, 1e-15);
          accepted = true;
          break;
        }
        lambda *= 10.0;
      }
      if (!accepted || step.norm() < opt.step_tolerance) break;
    }
    out.corners = unpack(x);
    const Residuals raw = constraint_residuals(out.corners, q_bar_, g_);
    out.converged = raw.cwiseAbs().maxCoeff() < opt.residual_tolerance;
    return out;
  }

 private:
  std::array<double, 3> q_bar_;
  const ParallelGeometry& g_;
  Vec9 scale_;
};

Corners corners_of(const PlatformPose& pose, const ParallelGeometry& g) {
  Corners c;
  for (std::size_t i = 0; i < 3; ++i) c[i] = pose.rotation * g.platform_anchors[i] + pose.position;
  return c;
}

double limb_angle(int i, const Vec3& corner, const ParallelGeometry& g) {
  const Vec3 v = corner - g.base_anchors[static_cast<std::size_t>(i)];
  const double x = v.dot(g.limb_radial(i));
  const double z = v.dot(g.limb_vertical(i));
  if (x == 0.0 && z == 0.0) {
    throw Error(ErrorCode::degenerate_direction, limb_name(i) + " direction undefined");
  }
  return atan2q(z, x);
}

// Pairwise bounds on corner distance; e outside them means no assembly exists.
bool certify_infeasible(const std::array<double, 3>& q_bar, const ParallelGeometry& g) {
  for (const auto& [a, b] : kPairs) {
    const auto sa = static_cast<std::size_t>(a);
    const auto sb = static_cast<std::size_t>(b);
    const double base = (g.base_anchors[sa] - g.base_anchors[sb]).norm();
    const double hi = base + q_bar[sa] + q_bar[sb];
    const double lo = base - q_bar[sa] - q_bar[sb];
    if (g.edge > hi || g.edge < lo) return true;
  }
  return false;
}

bool canonical_less(const ForwardSolution& lhs, const ForwardSolution& rhs) {
  const Vec3& a = lhs.pose.position;
  const Vec3& b = rhs.pose.position;
  if (a.z() != b.z()) return a.z() > b.z();
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  const auto ra = lhs.pose.rotation.reshaped();
  const auto rb = rhs.pose.rotation.reshaped();
  return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
}

}  // namespace

ParallelGeometry ParallelGeometry::symmetric(double base_radius, double edge,
                                             const ModuleGeometry& limb) {
  ParallelGeometry g;
  g.edge = edge;
  const double circumradius = edge / std::sqrt(3.0);
  for (std::size_t i = 0; i < 3; ++i) {
    const double phi = deg_to_rad(120.0 * static_cast<double>(i));
    const Vec3 radial(std::cos(phi), std::sin(phi), 0.0);
    g.base_anchors[i] = base_radius * radial;
    g.base_axes[i] = Vec3(-std::sin(phi), std::cos(phi), 0.0);
    g.platform_anchors[i] = circumradius * radial;
    g.limbs[i] = limb;
  }
  return g;
}

void ParallelGeometry::validate() const {
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string idx = "[" + std::to_string(i) + "]";
    if (!base_anchors[i].allFinite()) {
      throw Error(ErrorCode::validation_error, "base anchor not finite", "base_anchors" + idx);
    }
    if (!platform_anchors[i].allFinite()) {
      throw Error(ErrorCode::validation_error, "platform anchor not finite",
                  "platform_anchors" + idx);
    }
    if (!(std::abs(base_axes[i].norm() - 1.0) <= 1e-12)) {
      throw Error(ErrorCode::validation_error, "base axis must be a unit vector",
                  "base_axes" + idx);
    }
    if (base_axes[i].cross(Vec3::UnitZ()).norm() < 1e-9) {
      throw Error(ErrorCode::validation_error, "base axis must not be vertical",
                  "base_axes" + idx);
    }
    try {
      limbs[i].validate();
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), "limbs" + idx + "." + e.field());
    }
  }
  if (!(std::isfinite(edge) && edge > 0.0)) {
    throw Error(ErrorCode::validation_error, "platform edge must be positive", "edge");
  }
  for (const auto& [a, b] : kPairs) {
    const double len =
        (platform_anchors[static_cast<std::size_t>(a)] - platform_anchors[static_cast<std::size_t>(b)])
            .norm();
    if (std::abs(len - edge) > 1e-9 * std::max(1.0, edge)) {
      throw Error(ErrorCode::validation_error,
                  "platform anchors must form an equilateral triangle of the given edge",
                  "platform_anchors");
    }
  }
}

Vec3 ParallelGeometry::limb_radial(int i) const {
  return base_axes[static_cast<std::size_t>(i)].cross(Vec3::UnitZ()).normalized();
}

Vec3 ParallelGeometry::limb_vertical(int i) const {
  return limb_radial(i).cross(base_axes[static_cast<std::size_t>(i)]);
}

double pose_distance(const PlatformPose& lhs, const PlatformPose& rhs) {
  return (lhs.position - rhs.position).norm() + (lhs.rotation - rhs.rotation).norm();
}

Vec3 limb_corner(int i, double q, double q_bar, const ParallelGeometry& g) {
  return g.base_anchors[static_cast<std::size_t>(i)] +
         q_bar * (std::cos(q) * g.limb_radial(i) + std::sin(q) * g.limb_vertical(i));
}

std::array<LimbState, 3> parallel_ik(const PlatformPose& pose, const ParallelGeometry& g) {
  const Corners c = corners_of(pose, g);
  std::array<LimbState, 3> out;
  for (int i = 0; i < 3; ++i) {
    const auto si = static_cast<std::size_t>(i);
    const Vec3 v = c[si] - g.base_anchors[si];
    const double off_plane = v.dot(g.base_axes[si]);
    if (!(std::abs(off_plane) <= kConstraintTol)) {
      std::ostringstream msg;
      msg << limb_name(i) << " leaves its revolute plane by " << off_plane << " mm";
      throw Error(ErrorCode::constraint_violation, msg.str());
    }
    out[si].c = c[si];
    out[si].q_bar = v.norm();
    out[si].q = limb_angle(i, c[si], g);
    check_stroke(i, out[si].q_bar, g);
  }
  return out;
}

Residuals constraint_residuals(const Corners& c, const std::array<double, 3>& q_bar,
                               const ParallelGeometry& g) {
  Residuals r;
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec3 v = c[i] - g.base_anchors[i];
    r[static_cast<Eigen::Index>(i)] = v.dot(g.base_axes[i]);
    r[static_cast<Eigen::Index>(3 + i)] = v.squaredNorm() - q_bar[i] * q_bar[i];
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const auto [a, b] = kPairs[k];
    r[static_cast<Eigen::Index>(6 + k)] =
        (c[static_cast<std::size_t>(a)] - c[static_cast<std::size_t>(b)]).squaredNorm() -
        g.edge * g.edge;
  }
  return r;
}

PlatformPose pose_from_corners(const Corners& c, const ParallelGeometry& g) {
  const Mat3 world = triangle_frame(c);
  const Mat3 moving = triangle_frame(g.platform_anchors);
  PlatformPose pose;
  pose.rotation = world * moving.transpose();
  pose.position = centroid(c) - pose.rotation * centroid(g.platform_anchors);
  return pose;
}

ActuatorPair limb_actuators(const LimbState& limb, const ModuleGeometry& geom,
                            ModuleBranch branch) {
  return serial_to_actuators({limb.q, limb.q_bar}, geom, branch);
}

PlatformPose nominal_home_pose(const ParallelGeometry& g) {
  const Vec3 base_centre = centroid(g.base_anchors);
  const ModuleGeometry& m = g.limbs[0];
  const double length = 0.5 * (m.min_reach() + m.max_reach());
  const Vec3 offset = g.base_anchors[0] - (base_centre + g.platform_anchors[0]);
  const double horizontal = std::hypot(offset.x(), offset.y());
  const double height =
      length > horizontal ? std::sqrt(length * length - horizontal * horizontal) : 0.5 * length;
  PlatformPose pose;
  pose.position = base_centre + Vec3(0.0, 0.0, height);
  return pose;
}

ForwardResult parallel_fk(const std::array<double, 3>& q_bar,
                          const std::optional<std::array<double, 3>>& q,
                          const ParallelGeometry& g, const ForwardOptions& options) {
  for (int i = 0; i < 3; ++i) check_stroke(i, q_bar[static_cast<std::size_t>(i)], g);

  ForwardResult result;
  if (certify_infeasible(q_bar, g)) {
    result.certified_infeasible = true;
    return result;
  }

  std::vector<Corners> starts;
  if (q) {
    Corners direct;
    for (int i = 0; i < 3; ++i) {
      const auto si = static_cast<std::size_t>(i);
      direct[si] = limb_corner(i, (*q)[si], q_bar[si], g);
    }
    starts.push_back(direct);
  }
  if (options.seed) starts.push_back(corners_of(*options.seed, g));
  if (options.previous) starts.push_back(corners_of(*options.previous, g));
  if (!q) {
    // Home limb angles, then pseudo-random perturbations of them; every start
    // already satisfies the revolute and loop-closure equations.
    std::array<double, 3> home{};
    const Corners home_corners = corners_of(nominal_home_pose(g), g);
    for (int i = 0; i < 3; ++i) {
      const auto si = static_cast<std::size_t>(i);
      const Vec3 v = home_corners[si] - g.base_anchors[si];
      home[si] = std::atan2(v.dot(g.limb_vertical(i)), v.dot(g.limb_radial(i)));
    }
    std::mt19937_64 rng(options.rng_seed);
    std::uniform_real_distribution<double> perturb(-std::numbers::pi, std::numbers::pi);
    for (int s = 0; s <= options.random_starts; ++s) {
      Corners c;
      for (int i = 0; i < 3; ++i) {
        const auto si = static_cast<std::size_t>(i);
        const double delta = s == 0 ? 0.0 : perturb(rng);
        c[si] = limb_corner(i, home[si] + delta, q_bar[si], g);
      }
      starts.push_back(c);
    }
  }

  const ConstraintSystem system(q_bar, g);
  for (const Corners& start : starts) {
    ++result.starts_tried;
    const NewtonOutcome outcome = system.solve(start, options);
    if (!outcome.converged) continue;

    ForwardSolution sol;
    sol.corners = outcome.corners;
    try {
      sol.pose = pose_from_corners(sol.corners, g);
      for (int i = 0; i < 3; ++i) {
        sol.limb_angles[static_cast<std::size_t>(i)] =
            limb_angle(i, sol.corners[static_cast<std::size_t>(i)], g);
      }
    } catch (const Error&) {
      continue;  // degenerate corner triple
    }
    ++result.starts_converged;
    sol.residuals = constraint_residuals(sol.corners, q_bar, g);
    sol.max_residual = sol.residuals.cwiseAbs().maxCoeff();
    sol.iterations = outcome.iterations;

    if (q) {
      double worst = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        worst = std::max(worst, std::abs(wrap_angle(sol.limb_angles[i] - (*q)[i])));
      }
      if (worst > options.angle_tolerance) continue;
    }

    const bool duplicate = std::any_of(
        result.solutions.begin(), result.solutions.end(), [&](const ForwardSolution& other) {
          return pose_distance(other.pose, sol.pose) < options.dedup_tolerance;
        });
    if (!duplicate) result.solutions.push_back(sol);
  }

  if (result.starts_converged == 0 && !q) {
    throw Error(ErrorCode::no_convergence,
                "no start converged to an assembly of the platform for the commanded lengths");
  }
  if (q && result.solutions.empty()) result.certified_infeasible = true;

  std::sort(result.solutions.begin(), result.solutions.end(), canonical_less);
  return result;
}

int nearest_solution(const ForwardResult& result, const PlatformPose& reference) {
  int best = -1;
  double best_distance = 0.0;
  for (std::size_t i = 0; i < result.solutions.size(); ++i) {
    const double d = pose_distance(result.solutions[i].pose, reference);
    if (best < 0 || d < best_distance) {
      best = static_cast<int>(i);
      best_distance = d;
    }
  }
  return best;
}

}  // namespace modkin
