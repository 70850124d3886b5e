#include "modkin/core_math.hpp"

#include <cmath>

#include "modkin/errors.hpp"

namespace modkin {

double wrap_angle(double rad) {
  double wrapped = std::remainder(rad, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

double atan2q(double y, double x) {
  if (y == 0.0 && x == 0.0) {
    throw Error(ErrorCode::domain, "atan2q: direction undefined for (0, 0)");
  }
  double angle = std::atan2(y, x);
  // atan2 returns -pi for (-0, negative x); fold onto the half-open range.
  if (angle <= -std::numbers::pi) angle = std::numbers::pi;
  return angle;
}

Mat3 rot_x(double rad) {
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  Mat3 m;
  m << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return m;
}

Mat3 rot_z(double rad) {
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  Mat3 m;
  m << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return m;
}

HomTransform HomTransform::from_matrix(const Mat4& m, double tol) {
  const bool bottom_ok = std::abs(m(3, 0)) <= tol && std::abs(m(3, 1)) <= tol &&
                         std::abs(m(3, 2)) <= tol && std::abs(m(3, 3) - 1.0) <= tol;
  if (!bottom_ok) {
    throw Error(ErrorCode::invalid_argument, "homogeneous matrix bottom row must be (0, 0, 0, 1)");
  }
  return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

HomTransform HomTransform::from_row_major(std::span<const double, 16> values, double tol) {
  Mat4 m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m(i, j) = values[static_cast<std::size_t>(4 * i + j)];
  }
  return from_matrix(m, tol);
}

std::array<double, 16> HomTransform::row_major() const {
  std::array<double, 16> out{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out[static_cast<std::size_t>(4 * i + j)] = r_(i, j);
    out[static_cast<std::size_t>(4 * i + 3)] = p_(i);
  }
  out[15] = 1.0;
  return out;
}

Mat4 HomTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = r_;
  m.topRightCorner<3, 1>() = p_;
  return m;
}

HomTransform HomTransform::inverse() const {
  const Mat3 rt = r_.transpose();
  return {rt, -(rt * p_)};
}

bool HomTransform::is_valid(double tol) const {
  if (!r_.allFinite() || !p_.allFinite()) return false;
  const Mat3 gram = r_.transpose() * r_;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(r_.determinant() - 1.0) <= tol;
}

double max_abs_diff(const HomTransform& lhs, const HomTransform& rhs) {
  const double dr = (lhs.rotation() - rhs.rotation()).cwiseAbs().maxCoeff();
  const double dp = (lhs.position() - rhs.position()).cwiseAbs().maxCoeff();
  return std::max(dr, dp);
}

HomTransform dh_transform(const DhRow& row) {
  const double ct = std::cos(row.theta);
  const double st = std::sin(row.theta);
  const double ca = std::cos(row.alpha);
  const double sa = std::sin(row.alpha);
  Mat3 r;
  r << ct, -ca * st, sa * st,
       st, ca * ct, -sa * ct,
       0.0, sa, ca;
  return {r, Vec3(row.a * ct, row.a * st, row.d)};
}

HomTransform compose(std::span<const HomTransform> chain) {
  if (chain.empty()) {
    throw Error(ErrorCode::invalid_argument, "compose: empty transform chain");
  }
  HomTransform out = chain.front();
  for (std::size_t i = 1; i < chain.size(); ++i) out = out * chain[i];
  return out;
}

}  // namespace modkin
