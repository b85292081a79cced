#include "tqnav/meas.hpp"

#include <cmath>
#include <stdexcept>

namespace tqnav {

void OdoParams::validate() const {
  if (!(K > 0.0)) throw std::invalid_argument("odometer scale factor must be positive");
}

Mat3 m2(double psi) {
  const double c = std::cos(psi), s = std::sin(psi);
  Mat3 m;
  m << c, 0.0, -s,
       0.0, 1.0, 0.0,
       s, 0.0, c;
  return m;
}

Mat3 m3(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 m;
  m << c, s, 0.0,
       -s, c, 0.0,
       0.0, 0.0, 1.0;
  return m;
}

Mat3 d_m2(double psi) {
  const double c = std::cos(psi), s = std::sin(psi);
  Mat3 m;
  m << -s, 0.0, -c,
       0.0, 0.0, 0.0,
       c, 0.0, -s;
  return m;
}

Mat3 d_m3(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 m;
  m << -s, c, 0.0,
       -c, -s, 0.0,
       0.0, 0.0, 0.0;
  return m;
}

Mat3 c_bm(double psi, double theta) { return m3(theta) * m2(psi); }

Vec3 omega_eb_b(const NavState& s, const Vec3& gyro, const EarthParams& earth) {
  return gyro - s.q_eb.conj().rotate(earth.omega_vec());
}

namespace {

// body-frame velocity of the wheel point
Vec3 wheel_velocity_b(const NavState& s, const Vec3& w_eb, const Vec3& lever, const EarthParams& earth) {
  return s.c_be().transpose() * s.velocity_e(earth.omega_ie) + w_eb.cross(lever);
}

Mat3 scale_k(double k) { return Vec3(k, 1.0, 1.0).asDiagonal(); }

// Apply the robocentric attitude flip to a world-centric H.
Mat3x21 robocentric(ErrorModelKind kind, Mat3x21 h) {
  if (is_robocentric(kind)) h.leftCols<3>() *= -1.0;
  return h;
}

}  // namespace

Vec3 predict_odometer(const NavState& s, const ImuSample& imu, const OdoParams& p, const EarthParams& earth) {
  const Vec3 u = wheel_velocity_b(s, omega_eb_b(s, imu.gyro, earth), p.lever, earth);
  return scale_k(p.K) * c_bm(p.psi, p.theta) * u;
}

Vec3 predict_static(const NavState& s, const EarthParams& earth) { return s.velocity_e(earth.omega_ie); }

Mat3x21 h_static(ErrorModelKind kind, const NavState& s, const EarthParams& earth) {
  using namespace es;
  Mat3x21 h = Mat3x21::Zero();
  const Mat3 c = s.c_be();
  const Mat3 wx = skew(earth.omega_vec());
  switch (kind) {
    case ErrorModelKind::Traditional:
      h.block<3, 3>(0, VEL) = Mat3::Identity();
      return h;
    default:
      break;
  }
  if (backing_side(kind) == Side::Left) {
    h.block<3, 3>(0, VEL) = -c;
    h.block<3, 3>(0, POS) = wx * c;
  } else {
    h.block<3, 3>(0, ATT) = skew(s.v_prime) - wx * skew(s.r_e);
    h.block<3, 3>(0, VEL) = -Mat3::Identity();
    h.block<3, 3>(0, POS) = wx;
  }
  return robocentric(kind, h);
}

Mat3x21 h_odometer(ErrorModelKind kind, const NavState& s, const ImuSample& imu, const OdoParams& p,
                   const EarthParams& earth) {
  using namespace es;
  const Mat3 c = s.c_be(), ct = c.transpose();
  const Mat3 wx = skew(earth.omega_vec());
  const Vec3 w_eb = omega_eb_b(s, imu.gyro, earth);
  const Vec3 u = wheel_velocity_b(s, w_eb, p.lever, earth);
  const Mat3 cbm = c_bm(p.psi, p.theta);
  const Mat3 jv = scale_k(p.K) * cbm;
  const Mat3 lx = skew(p.lever);

  Mat3x21 h = Mat3x21::Zero();
  h.block<3, 3>(0, BG) = jv * lx;
  h.col(PSI) = scale_k(p.K) * m3(p.theta) * d_m2(p.psi) * u;
  h.col(THETA) = scale_k(p.K) * d_m3(p.theta) * m2(p.psi) * u;
  h.block<3, 3>(0, LEVER) = jv * skew(w_eb);
  h(0, K) = (cbm * u)(0);

  if (kind == ErrorModelKind::Traditional) {
    h.block<3, 3>(0, ATT) = jv * (ct * skew(s.velocity_e(earth.omega_ie)) + lx * ct * wx);
    h.block<3, 3>(0, VEL) = jv * ct;
    return h;
  }
  if (backing_side(kind) == Side::Left) {
    h.block<3, 3>(0, ATT) = jv * (-skew(ct * s.velocity_e(earth.omega_ie)) - lx * skew(ct * earth.omega_vec()));
    h.block<3, 3>(0, VEL) = -jv;
    h.block<3, 3>(0, POS) = jv * ct * wx * c;
  } else {
    h.block<3, 3>(0, ATT) = -jv * (ct * skew(s.r_e) * wx + lx * ct * wx);
    h.block<3, 3>(0, VEL) = -jv * ct;
    h.block<3, 3>(0, POS) = jv * ct * wx;
  }
  return robocentric(kind, h);
}

}  // namespace tqnav
