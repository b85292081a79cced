#pragma once

#include <stdexcept>
#include <utility>

#include "tqnav/quaternion.hpp"

namespace tqnav {

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// q + e1 q' + e2 q'' with e1^2 = e2^2 = e1 e2 = 0.
///
/// A pose-representing instance packs attitude, transformed velocity and
/// position as q_eb + e1 (1/2 v' o q_eb) + e2 (1/2 r_e o q_eb).
struct TridentQuaternion {
  Quaternion real{Quaternion::identity()};
  Quaternion eps1{Quaternion::zero()};
  Quaternion eps2{Quaternion::zero()};

  static TridentQuaternion identity() { return {}; }
};

/// Pure trident vector w + e1 a + e2 b. Used for twists and for error vectors.
struct TridentTwist {
  Vec3 real{Vec3::Zero()};
  Vec3 eps1{Vec3::Zero()};
  Vec3 eps2{Vec3::Zero()};

  TridentTwist scaled(double s) const { return {s * real, s * eps1, s * eps2}; }
};

/// Navigation state in the earth frame.
struct NavState {
  Quaternion q_eb{Quaternion::identity()};  // body -> earth
  Vec3 v_prime{Vec3::Zero()};               // C_i^e * d(r_i)/dt, m/s
  Vec3 r_e{Vec3::Zero()};                   // m
  double time{0.0};                         // s

  Mat3 c_be() const { return q_eb.to_matrix(); }
  /// Earth-referenced velocity v_e = v' - omega_ie x r_e.
  Vec3 velocity_e(double omega_ie) const { return v_prime - Vec3(0.0, 0.0, omega_ie).cross(r_e); }
  void set_velocity_e(const Vec3& v_e, double omega_ie) { v_prime = v_e + Vec3(0.0, 0.0, omega_ie).cross(r_e); }
};

/// Vector parts of a trident error (attitude, first and second imaginary slots).
struct ErrorTriple {
  Vec3 att{Vec3::Zero()};
  Vec3 vel{Vec3::Zero()};
  Vec3 pos{Vec3::Zero()};

  TridentTwist as_twist() const { return {att, vel, pos}; }
};

enum class Side { Left, Right };

TridentQuaternion tq_mul(const TridentQuaternion& a, const TridentQuaternion& b);
TridentQuaternion tq_conj(const TridentQuaternion& a);
TridentQuaternion tq_add(const TridentQuaternion& a, const TridentQuaternion& b);
TridentQuaternion tq_scale(const TridentQuaternion& a, double s);
TridentQuaternion tq_from_twist(const TridentTwist& t);

inline TridentQuaternion operator*(const TridentQuaternion& a, const TridentQuaternion& b) { return tq_mul(a, b); }

/// Exponential of a pure trident vector (exact; the e-slots carry the
/// directional derivative of the quaternion exponential).
TridentQuaternion tq_exp(const TridentTwist& half_twist);

/// Max over |1 - |real||, |scalar(eps1 o real*)|, |scalar(eps2 o real*)|.
double pose_defect(const TridentQuaternion& t);
bool is_pose(const TridentQuaternion& t, double tol = 1e-9);

/// Divide by |real| and project both e-slots so that eps_i o real* is a pure vector.
TridentQuaternion tq_normalize(const TridentQuaternion& t);

TridentQuaternion tq_from_nav(const NavState& s);
/// Throws InvalidInput when `t` is not pose-representing.
NavState tq_to_nav(const TridentQuaternion& t, double time = 0.0);

/// Right-hand side of 2 d(q)/dt = q o body_twist - earth_twist o q, returned as d(q)/dt.
TridentQuaternion tq_dot(const TridentQuaternion& t, const TridentTwist& body_twist, const TridentTwist& earth_twist);

struct TwistPair {
  TridentTwist body;
  TridentTwist earth;
};

/// body = w_ib + e1 f_b; earth = w_ie - e1 g_e - e2 v'.
TwistPair twists_first_type(const Vec3& omega_ib_b, const Vec3& f_b, const Vec3& g_e, const Vec3& v_prime,
                            double omega_ie);
/// body = w_ib + e1 f_b + e2 C_e^b v'; earth = w_ie - e1 g_e. The e2 body slot is the body-frame image
/// of v', which is what makes q o x1 equal v' o q.
TwistPair twists_second_type(const Vec3& omega_ib_b, const Vec3& f_b, const Vec3& g_e, const Vec3& v_prime,
                             const Quaternion& q_eb, double omega_ie);

/// 2 x vector parts of conj(est) o truth.
ErrorTriple tq_error_left(const TridentQuaternion& est, const TridentQuaternion& truth);
/// 2 x vector parts of truth o conj(est).
ErrorTriple tq_error_right(const TridentQuaternion& est, const TridentQuaternion& truth);
ErrorTriple tq_error(Side side, const TridentQuaternion& est, const TridentQuaternion& truth);

/// Retraction: left est o exp(delta/2), right exp(delta/2) o est, followed by tq_normalize.
TridentQuaternion tq_inject(const TridentQuaternion& est, const ErrorTriple& delta, Side side);

}  // namespace tqnav
