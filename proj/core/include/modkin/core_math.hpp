#pragma once

#include <array>
#include <numbers>
#include <span>

#include <Eigen/Dense>

namespace modkin {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Wraps an angle into (-pi, pi].
double wrap_angle(double rad);

/// Quadrant-aware inverse tangent returning an angle in (-pi, pi].
/// Throws Error(domain) when both arguments are zero (direction undefined).
double atan2q(double y, double x);

Mat3 rot_x(double rad);
Mat3 rot_z(double rad);

/// Rigid homogeneous transform: rotation block R (columns n, o, a) and
/// position p in millimetres. The implicit bottom row is (0, 0, 0, 1).
class HomTransform {
 public:
  HomTransform() : r_(Mat3::Identity()), p_(Vec3::Zero()) {}
  HomTransform(const Mat3& r, const Vec3& p) : r_(r), p_(p) {}

  static HomTransform identity() { return {}; }

  /// Builds from a full 4x4 matrix; the bottom row must be (0,0,0,1) exactly
  /// up to `tol`, otherwise Error(invalid_argument).
  static HomTransform from_matrix(const Mat4& m, double tol = 1e-12);

  /// Row-major 16 element form used by every serialized interface.
  static HomTransform from_row_major(std::span<const double, 16> values, double tol = 1e-12);
  std::array<double, 16> row_major() const;

  const Mat3& rotation() const { return r_; }
  const Vec3& position() const { return p_; }

  Vec3 n() const { return r_.col(0); }
  Vec3 o() const { return r_.col(1); }
  Vec3 a() const { return r_.col(2); }

  Mat4 matrix() const;
  HomTransform inverse() const;

  Vec3 apply(const Vec3& point) const { return r_ * point + p_; }

  /// Orthonormal rotation with det = +1, both within `tol`.
  bool is_valid(double tol = 1e-9) const;

  friend HomTransform operator*(const HomTransform& lhs, const HomTransform& rhs) {
    return {lhs.r_ * rhs.r_, lhs.r_ * rhs.p_ + lhs.p_};
  }

 private:
  Mat3 r_;
  Vec3 p_;
};

/// Largest absolute elementwise difference over the 12 free entries.
double max_abs_diff(const HomTransform& lhs, const HomTransform& rhs);

/// One Denavit-Hartenberg row. Angles in radians, lengths in millimetres.
struct DhRow {
  double d = 0.0;
  double theta = 0.0;
  double a = 0.0;
  double alpha = 0.0;
};

/// Standard DH link transform Rot_z(theta) Trans_z(d) Trans_x(a) Rot_x(alpha),
/// evaluated from its closed-form entries.
HomTransform dh_transform(const DhRow& row);

/// Left-to-right product of a non-empty chain.
HomTransform compose(std::span<const HomTransform> chain);

}  // namespace modkin
