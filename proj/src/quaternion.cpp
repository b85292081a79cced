#include "tqnav/quaternion.hpp"

#include <cmath>

namespace tqnav {

namespace {

// sin(t)/t
double sinc(double t) {
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

// (t cos t - sin t) / t^3, the derivative of sinc divided by t
double sinc_slope_over_t(double t) {
  if (std::abs(t) < 1e-3) {
    const double t2 = t * t;
    return -1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0;
  }
  return (t * std::cos(t) - std::sin(t)) / (t * t * t);
}

}  // namespace

Quaternion Quaternion::exp_pure(const Vec3& u) {
  const double t = u.norm();
  return {std::cos(t), sinc(t) * u};
}

Quaternion exp_pure_derivative(const Vec3& u, const Vec3& a) {
  const double t = u.norm();
  const double ua = u.dot(a);
  return {-sinc(t) * ua, sinc(t) * a + sinc_slope_over_t(t) * ua * u};
}

double Quaternion::norm() const { return std::sqrt(squared_norm()); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

Mat3 Quaternion::to_matrix() const {
  const double ww = w * w, xx = x * x, yy = y * y, zz = z * z;
  const double xy = x * y, xz = x * z, yz = y * z, wx = w * x, wy = w * y, wz = w * z;
  Mat3 c;
  c << ww + xx - yy - zz, 2.0 * (xy - wz), 2.0 * (xz + wy),
       2.0 * (xy + wz), ww - xx + yy - zz, 2.0 * (yz - wx),
       2.0 * (xz - wy), 2.0 * (yz + wx), ww - xx - yy + zz;
  return c;
}

Quaternion Quaternion::from_matrix(const Mat3& c) {
  // Shepperd's method
  const double tr = c.trace();
  Quaternion q;
  if (tr >= c(0, 0) && tr >= c(1, 1) && tr >= c(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + tr);
    q = {0.25 * s, (c(2, 1) - c(1, 2)) / s, (c(0, 2) - c(2, 0)) / s, (c(1, 0) - c(0, 1)) / s};
  } else if (c(0, 0) >= c(1, 1) && c(0, 0) >= c(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + c(0, 0) - c(1, 1) - c(2, 2));
    q = {(c(2, 1) - c(1, 2)) / s, 0.25 * s, (c(0, 1) + c(1, 0)) / s, (c(0, 2) + c(2, 0)) / s};
  } else if (c(1, 1) >= c(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 - c(0, 0) + c(1, 1) - c(2, 2));
    q = {(c(0, 2) - c(2, 0)) / s, (c(0, 1) + c(1, 0)) / s, 0.25 * s, (c(1, 2) + c(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 - c(0, 0) - c(1, 1) + c(2, 2));
    q = {(c(1, 0) - c(0, 1)) / s, (c(0, 2) + c(2, 0)) / s, (c(1, 2) + c(2, 1)) / s, 0.25 * s};
  }
  q = q.normalized();
  return q.w < 0.0 ? -q : q;
}

Vec3 Quaternion::to_rotation_vector() const {
  Quaternion q = normalized();
  if (q.w < 0.0) q = -q;
  const Vec3 v = q.vec();
  const double s = v.norm();
  if (s < 1e-12) return 2.0 * v;
  const double angle = 2.0 * std::atan2(s, q.w);
  return angle / s * v;
}

Vec3 Quaternion::rotate(const Vec3& v) const { return (*this * pure(v) * conj()).vec(); }

Mat3 axis_rotation(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

Mat3 rotation_from_vector(const Vec3& phi) { return Quaternion::from_rotation_vector(phi).to_matrix(); }

Vec3 rotation_to_vector(const Mat3& c) { return Quaternion::from_matrix(c).to_rotation_vector(); }

}  // namespace tqnav
