#include "tqnav/triquat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tqnav {

namespace {

// scalar part must vanish relative to the slot magnitude (|eps2| ~ |r|/2 ~ 3e6 m)
double relative_scalar(const Quaternion& eps, const Quaternion& real_conj) {
  const Quaternion p = eps * real_conj;
  return std::abs(p.w) / std::max(1.0, eps.norm());
}

Quaternion project_pure(const Quaternion& eps, const Quaternion& q) {
  Quaternion p = eps * q.conj();
  p.w = 0.0;
  return (1.0 / q.squared_norm()) * (p * q);
}

void require_pose(const TridentQuaternion& t, const char* what) {
  if (!is_pose(t)) throw InvalidInput(std::string(what) + ": trident quaternion is not pose-representing");
}

}  // namespace

TridentQuaternion tq_mul(const TridentQuaternion& a, const TridentQuaternion& b) {
  return {a.real * b.real, a.real * b.eps1 + a.eps1 * b.real, a.real * b.eps2 + a.eps2 * b.real};
}

TridentQuaternion tq_conj(const TridentQuaternion& a) { return {a.real.conj(), a.eps1.conj(), a.eps2.conj()}; }

TridentQuaternion tq_add(const TridentQuaternion& a, const TridentQuaternion& b) {
  return {a.real + b.real, a.eps1 + b.eps1, a.eps2 + b.eps2};
}

TridentQuaternion tq_scale(const TridentQuaternion& a, double s) { return {s * a.real, s * a.eps1, s * a.eps2}; }

TridentQuaternion tq_from_twist(const TridentTwist& t) {
  return {Quaternion::pure(t.real), Quaternion::pure(t.eps1), Quaternion::pure(t.eps2)};
}

TridentQuaternion tq_exp(const TridentTwist& half_twist) {
  // f(u + e1 a + e2 b) = f(u) + e1 Df(u)[a] + e2 Df(u)[b] since the e-units are nilpotent
  return {Quaternion::exp_pure(half_twist.real), exp_pure_derivative(half_twist.real, half_twist.eps1),
          exp_pure_derivative(half_twist.real, half_twist.eps2)};
}

double pose_defect(const TridentQuaternion& t) {
  const Quaternion qc = t.real.conj();
  return std::max({std::abs(1.0 - t.real.norm()), relative_scalar(t.eps1, qc), relative_scalar(t.eps2, qc)});
}

bool is_pose(const TridentQuaternion& t, double tol) {
  const double d = pose_defect(t);
  return std::isfinite(d) && d < tol;
}

TridentQuaternion tq_normalize(const TridentQuaternion& t) {
  const double n = t.real.norm();
  const Quaternion q = (1.0 / n) * t.real;
  return {q, project_pure((1.0 / n) * t.eps1, q), project_pure((1.0 / n) * t.eps2, q)};
}

TridentQuaternion tq_from_nav(const NavState& s) {
  if (!(std::abs(s.q_eb.norm() - 1.0) < 1e-9)) throw InvalidInput("tq_from_nav: attitude quaternion is not unit");
  return {s.q_eb, 0.5 * (Quaternion::pure(s.v_prime) * s.q_eb), 0.5 * (Quaternion::pure(s.r_e) * s.q_eb)};
}

NavState tq_to_nav(const TridentQuaternion& t, double time) {
  require_pose(t, "tq_to_nav");
  // dividing by |q|^2 keeps the residual norm error of q from scaling r (6e6 m)
  const Quaternion qc = t.real.conj();
  const double inv = 2.0 / t.real.squared_norm();
  NavState s;
  s.q_eb = t.real;
  s.v_prime = inv * (t.eps1 * qc).vec();
  s.r_e = inv * (t.eps2 * qc).vec();
  s.time = time;
  return s;
}

TridentQuaternion tq_dot(const TridentQuaternion& t, const TridentTwist& body_twist, const TridentTwist& earth_twist) {
  const TridentQuaternion a = tq_mul(t, tq_from_twist(body_twist));
  const TridentQuaternion b = tq_mul(tq_from_twist(earth_twist), t);
  return tq_scale(tq_add(a, tq_scale(b, -1.0)), 0.5);
}

TwistPair twists_first_type(const Vec3& omega_ib_b, const Vec3& f_b, const Vec3& g_e, const Vec3& v_prime,
                            double omega_ie) {
  TwistPair p;
  p.body = {omega_ib_b, f_b, Vec3::Zero()};
  p.earth = {Vec3(0.0, 0.0, omega_ie), -g_e, -v_prime};
  return p;
}

TwistPair twists_second_type(const Vec3& omega_ib_b, const Vec3& f_b, const Vec3& g_e, const Vec3& v_prime,
                             const Quaternion& q_eb, double omega_ie) {
  TwistPair p;
  p.body = {omega_ib_b, f_b, q_eb.conj().rotate(v_prime)};
  p.earth = {Vec3(0.0, 0.0, omega_ie), -g_e, Vec3::Zero()};
  return p;
}

ErrorTriple tq_error_left(const TridentQuaternion& est, const TridentQuaternion& truth) {
  require_pose(est, "tq_error_left");
  require_pose(truth, "tq_error_left");
  const TridentQuaternion d = tq_mul(tq_conj(est), truth);
  return {2.0 * d.real.vec(), 2.0 * d.eps1.vec(), 2.0 * d.eps2.vec()};
}

ErrorTriple tq_error_right(const TridentQuaternion& est, const TridentQuaternion& truth) {
  require_pose(est, "tq_error_right");
  require_pose(truth, "tq_error_right");
  const TridentQuaternion d = tq_mul(truth, tq_conj(est));
  return {2.0 * d.real.vec(), 2.0 * d.eps1.vec(), 2.0 * d.eps2.vec()};
}

ErrorTriple tq_error(Side side, const TridentQuaternion& est, const TridentQuaternion& truth) {
  return side == Side::Left ? tq_error_left(est, truth) : tq_error_right(est, truth);
}

TridentQuaternion tq_inject(const TridentQuaternion& est, const ErrorTriple& delta, Side side) {
  // The exact exponential is used at every magnitude. For right errors the
  // truncated form 1 + delta/2 moves the position by |delta|^2 |r| which is
  // metres at earth radius.
  const TridentQuaternion e = tq_exp(delta.as_twist().scaled(0.5));
  return tq_normalize(side == Side::Left ? tq_mul(est, e) : tq_mul(e, est));
}

}  // namespace tqnav
