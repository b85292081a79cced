#pragma once

#include <Eigen/Dense>

namespace tqnav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

/// Cross-product (skew-symmetric) matrix: skew(a) * b == a.cross(b).
inline Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

/// Hamilton quaternion, scalar first. A unit quaternion q_eb rotates body
/// vectors into the earth frame as v_e = q * v_b * conj(q).
struct Quaternion {
  double w{1.0};
  double x{0.0};
  double y{0.0};
  double z{0.0};

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}
  Quaternion(double w_, const Vec3& v) : w(w_), x(v.x()), y(v.y()), z(v.z()) {}

  static constexpr Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }
  static constexpr Quaternion zero() { return {0.0, 0.0, 0.0, 0.0}; }
  /// Vector quaternion [0, v].
  static Quaternion pure(const Vec3& v) { return {0.0, v}; }

  /// exp of the pure quaternion [0, half_angle_vec]; i.e. from_rotation_vector(2 * u).
  static Quaternion exp_pure(const Vec3& u);
  /// Unit quaternion for the rotation vector phi (angle |phi| about phi/|phi|).
  static Quaternion from_rotation_vector(const Vec3& phi) { return exp_pure(0.5 * phi); }
  /// Unit quaternion of a proper rotation matrix (body->earth convention).
  static Quaternion from_matrix(const Mat3& c);

  Vec3 vec() const { return {x, y, z}; }
  Vec4 coeffs() const { return {w, x, y, z}; }
  double squared_norm() const { return w * w + x * x + y * y + z * z; }
  double norm() const;
  Quaternion conj() const { return {w, -x, -y, -z}; }
  Quaternion normalized() const;

  /// Rotation matrix C such that C * v == vec(q * [0,v] * conj(q)).
  Mat3 to_matrix() const;
  /// Rotation vector with angle in [0, pi].
  Vec3 to_rotation_vector() const;
  /// Rotate a 3-vector by this (unit) quaternion.
  Vec3 rotate(const Vec3& v) const;

  Quaternion& operator+=(const Quaternion& o) {
    w += o.w; x += o.x; y += o.y; z += o.z;
    return *this;
  }
  Quaternion& operator-=(const Quaternion& o) {
    w -= o.w; x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  Quaternion& operator*=(double s) {
    w *= s; x *= s; y *= s; z *= s;
    return *this;
  }
};

/// Hamilton product.
inline Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Quaternion operator*(const Quaternion& a, const Quaternion& b) { return quat_mul(a, b); }
inline Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
inline Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
inline Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
inline Quaternion operator*(double s, Quaternion q) { return q *= s; }
inline Quaternion operator*(Quaternion q, double s) { return q *= s; }

/// Directional derivative of exp_pure at u along the pure direction a.
Quaternion exp_pure_derivative(const Vec3& u, const Vec3& a);

/// Rotation matrix about a single axis (right-handed, active): axis_rotation(Vec3::UnitZ(), a) * x
/// rotates x by a about z.
Mat3 axis_rotation(const Vec3& axis, double angle);

/// Matrix exponential of skew(phi) (Rodrigues).
Mat3 rotation_from_vector(const Vec3& phi);
/// Inverse of rotation_from_vector, angle in [0, pi].
Vec3 rotation_to_vector(const Mat3& c);

}  // namespace tqnav
