#include "tqnav/errmodel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace tqnav {

namespace {

using Vec9 = Eigen::Matrix<double, 9, 1>;

template <typename M>
void put(M& m, int r, int c, const Mat3& b) {
  m.template block<3, 3>(r, c) = b;
}

// Left model, body-frame quantities only apart from the gravity gradient.
void fill_left(SystemMatrices& s, const NavState& x, const ImuSample& imu, const EarthParams& earth) {
  using namespace es;
  const Mat3 c = x.c_be();
  const Mat3 eye = Mat3::Identity();
  const Mat3 wx = skew(imu.gyro);
  put(s.F, ATT, ATT, -wx);
  put(s.F, ATT, BG, eye);
  put(s.F, VEL, ATT, -skew(imu.accel));
  put(s.F, VEL, VEL, -wx);
  put(s.F, VEL, POS, c.transpose() * gravity_gradient(x.r_e, earth) * c);
  put(s.F, VEL, BA, eye);
  put(s.F, POS, VEL, eye);
  put(s.F, POS, POS, -wx);

  put(s.G, ATT, 0, -eye);
  put(s.G, VEL, 3, -eye);
  put(s.G, BG, 6, eye);
  put(s.G, BA, 9, eye);
}

void fill_right(SystemMatrices& s, const NavState& x, const ImuSample& imu, const EarthParams& earth) {
  using namespace es;
  (void)imu;
  const Mat3 c = x.c_be();
  const Mat3 eye = Mat3::Identity();
  const Mat3 wx = skew(earth.omega_vec());
  const Mat3 dg = gravity_gradient(x.r_e, earth);
  const Mat3 vx = skew(x.v_prime), rx = skew(x.r_e);
  put(s.F, ATT, ATT, -wx);
  put(s.F, ATT, BG, c);
  put(s.F, VEL, ATT, skew(gravitation_e(x.r_e, earth)) - dg * rx);
  put(s.F, VEL, VEL, -wx);
  put(s.F, VEL, POS, dg);
  put(s.F, VEL, BG, vx * c);
  put(s.F, VEL, BA, c);
  put(s.F, POS, VEL, eye);
  put(s.F, POS, POS, -wx);
  put(s.F, POS, BG, rx * c);

  put(s.G, ATT, 0, -c);
  put(s.G, VEL, 0, -vx * c);
  put(s.G, VEL, 3, -c);
  put(s.G, POS, 0, -rx * c);
  put(s.G, BG, 6, eye);
  put(s.G, BA, 9, eye);
}

// phi-angle model in the e-frame: C_hat = exp(dtheta x) C, dv = v_hat_e - v_e, dr = r_hat - r.
void fill_traditional(SystemMatrices& s, const NavState& x, const ImuSample& imu, const EarthParams& earth) {
  using namespace es;
  const Mat3 c = x.c_be();
  const Mat3 eye = Mat3::Identity();
  const Mat3 wx = skew(earth.omega_vec());
  put(s.F, ATT, ATT, -wx);
  put(s.F, ATT, BG, -c);
  put(s.F, VEL, ATT, -skew(c * imu.accel));
  put(s.F, VEL, VEL, -2.0 * wx);
  put(s.F, VEL, POS, gravity_gradient(x.r_e, earth) - wx * wx);
  put(s.F, VEL, BA, -c);
  put(s.F, POS, VEL, eye);

  put(s.G, ATT, 0, c);
  put(s.G, VEL, 3, c);
  put(s.G, BG, 6, eye);
  put(s.G, BA, 9, eye);
}

InvarianceReport compare_blocks(const Mat21& fa, const Mat21& fb) {
  InvarianceReport rep;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double d = (fa.block<3, 3>(3 * i, 3 * j) - fb.block<3, 3>(3 * i, 3 * j)).cwiseAbs().maxCoeff();
      rep.block_diff[i][j] = d;
      if (i == 1 && j == 2)
        rep.gradient_block = d;
      else
        rep.max_other = std::max(rep.max_other, d);
    }
  }
  return rep;
}

void require_psd(const Mat21& p) {
  if (!((p - p.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, p.cwiseAbs().maxCoeff())))
    throw std::invalid_argument("covariance is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Mat21> es(p, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, p.trace()))
    throw std::invalid_argument("covariance is not positive semi-definite");
}

Mat21 embed(const Mat9& j) {
  Mat21 out = Mat21::Identity();
  out.topLeftCorner<9, 9>() = j;
  return out;
}

Vec9 pack(const ErrorTriple& e) {
  Vec9 v;
  v << e.att, e.vel, e.pos;
  return v;
}

}  // namespace

const char* kind_name(ErrorModelKind k) {
  switch (k) {
    case ErrorModelKind::LeftTrident: return "LQEKF";
    case ErrorModelKind::RightTrident: return "RQEKF";
    case ErrorModelKind::RobocentricLeft: return "RC-LQEKF";
    case ErrorModelKind::RobocentricRight: return "RC-RQEKF";
    case ErrorModelKind::Traditional: return "EKF";
  }
  throw std::invalid_argument("unknown error model kind");
}

ErrorModelKind parse_kind(std::string_view s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char ch) { return std::toupper(ch); });
  for (ErrorModelKind k : all_kinds())
    if (u == kind_name(k)) return k;
  if (u == "LEFT") return ErrorModelKind::LeftTrident;
  if (u == "RIGHT") return ErrorModelKind::RightTrident;
  if (u == "TRADITIONAL") return ErrorModelKind::Traditional;
  throw std::invalid_argument("unknown filter kind '" + std::string(s) + "'");
}

std::vector<ErrorModelKind> all_kinds() {
  return {ErrorModelKind::LeftTrident, ErrorModelKind::RightTrident, ErrorModelKind::RobocentricLeft,
          ErrorModelKind::RobocentricRight, ErrorModelKind::Traditional};
}

Mat12 noise_psd(const ImuNoise& n) {
  Mat12 q = Mat12::Zero();
  q.diagonal() << Vec3::Constant(n.gyro_arw * n.gyro_arw), Vec3::Constant(n.accel_vrw * n.accel_vrw),
      Vec3::Constant(n.gyro_bias_rw * n.gyro_bias_rw), Vec3::Constant(n.accel_bias_rw * n.accel_bias_rw);
  return q;
}

Mat21 robocentric_map() {
  Mat21 t = Mat21::Identity();
  t.topLeftCorner<3, 3>() = -Mat3::Identity();
  return t;
}

bool is_robocentric(ErrorModelKind kind) {
  return kind == ErrorModelKind::RobocentricLeft || kind == ErrorModelKind::RobocentricRight;
}

Side backing_side(ErrorModelKind kind) {
  switch (kind) {
    case ErrorModelKind::LeftTrident:
    case ErrorModelKind::RobocentricRight: return Side::Left;
    case ErrorModelKind::RightTrident:
    case ErrorModelKind::RobocentricLeft: return Side::Right;
    case ErrorModelKind::Traditional: break;
  }
  throw std::invalid_argument("traditional model has no trident side");
}

SystemMatrices build_system(ErrorModelKind kind, const NavState& state, const ImuSample& imu,
                            const EarthParams& earth, const ImuNoise& noise) {
  SystemMatrices s;
  s.Q = noise_psd(noise);
  switch (kind) {
    case ErrorModelKind::LeftTrident: fill_left(s, state, imu, earth); break;
    case ErrorModelKind::RightTrident: fill_right(s, state, imu, earth); break;
    case ErrorModelKind::Traditional: fill_traditional(s, state, imu, earth); break;
    case ErrorModelKind::RobocentricLeft:
    case ErrorModelKind::RobocentricRight: {
      if (backing_side(kind) == Side::Left)
        fill_left(s, state, imu, earth);
      else
        fill_right(s, state, imu, earth);
      // T is its own inverse and only flips the attitude rows/columns
      s.F.topRows<3>() *= -1.0;
      s.F.leftCols<3>() *= -1.0;
      s.G.topRows<3>() *= -1.0;
      break;
    }
    default: throw std::invalid_argument("invalid error model kind");
  }
  return s;
}

InvarianceReport left_invariance_report(const NavState& a, const NavState& b, const ImuSample& imu,
                                        const EarthParams& earth) {
  return compare_blocks(build_system(ErrorModelKind::LeftTrident, a, imu, earth).F,
                        build_system(ErrorModelKind::LeftTrident, b, imu, earth).F);
}

InvarianceReport right_invariance_report(const NavState& a, const NavState& b, const ImuSample& imu,
                                         const EarthParams& earth) {
  return compare_blocks(build_system(ErrorModelKind::RightTrident, a, imu, earth).F,
                        build_system(ErrorModelKind::RightTrident, b, imu, earth).F);
}

Mat9 jacobian_left(const NavState& s, const EarthParams& earth) {
  const Mat3 ct = s.c_be().transpose();
  Mat9 j = Mat9::Zero();
  j.block<3, 3>(0, 0) = ct;
  j.block<3, 3>(3, 3) = ct;
  j.block<3, 3>(3, 6) = ct * skew(earth.omega_vec());
  j.block<3, 3>(6, 6) = ct;
  return j;
}

Mat9 jacobian_right(const NavState& s, const EarthParams& earth) {
  Mat9 j = Mat9::Identity();
  j.block<3, 3>(3, 0) = skew(s.v_prime);
  j.block<3, 3>(3, 6) = skew(earth.omega_vec());
  j.block<3, 3>(6, 0) = skew(s.r_e);
  return j;
}

Mat21 cov_transform_left(const Mat21& p_trad, const NavState& s, const EarthParams& earth) {
  require_psd(p_trad);
  const Mat21 j = embed(jacobian_left(s, earth));
  const Mat21 p = j * p_trad * j.transpose();
  return 0.5 * (p + p.transpose());
}

Mat21 cov_transform_right(const Mat21& p_trad, const NavState& s, const EarthParams& earth) {
  require_psd(p_trad);
  const Mat21 j = embed(jacobian_right(s, earth));
  const Mat21 p = j * p_trad * j.transpose();
  return 0.5 * (p + p.transpose());
}

Mat5 extended_pose(const NavState& s) {
  Mat5 x = Mat5::Identity();
  x.topLeftCorner<3, 3>() = s.c_be();
  x.block<3, 1>(0, 3) = s.v_prime;
  x.block<3, 1>(0, 4) = s.r_e;
  return x;
}

Se23Report se23_cross_check(const NavState& est, const NavState& truth) {
  const Mat5 xe = extended_pose(est), xt = extended_pose(truth);
  // the inverse of an extended pose is [C^T, -C^T v, -C^T r]
  Mat5 xe_inv = Mat5::Identity();
  const Mat3 cet = xe.topLeftCorner<3, 3>().transpose();
  xe_inv.topLeftCorner<3, 3>() = cet;
  xe_inv.block<3, 1>(0, 3) = -cet * est.v_prime;
  xe_inv.block<3, 1>(0, 4) = -cet * est.r_e;
  const Mat5 eta_l = xe_inv * xt;
  const Mat5 eta_r = xt * xe_inv;

  Se23Report rep;
  rep.group_left = {rotation_to_vector(eta_l.topLeftCorner<3, 3>()), eta_l.block<3, 1>(0, 3), eta_l.block<3, 1>(0, 4)};
  rep.group_right = {rotation_to_vector(eta_r.topLeftCorner<3, 3>()), eta_r.block<3, 1>(0, 3),
                     eta_r.block<3, 1>(0, 4)};
  const TridentQuaternion te = tq_from_nav(est), tt = tq_from_nav(truth);
  rep.trident_left = tq_error_left(te, tt);
  rep.trident_right = tq_error_right(te, tt);

  auto trans = [](const ErrorTriple& a, const ErrorTriple& b) {
    return std::max((a.vel - b.vel).cwiseAbs().maxCoeff(), (a.pos - b.pos).cwiseAbs().maxCoeff());
  };
  rep.left_discrepancy = trans(rep.group_left, rep.trident_left);
  rep.right_discrepancy = trans(rep.group_right, rep.trident_right);
  rep.attitude_discrepancy = std::max((rep.group_left.att - rep.trident_left.att).cwiseAbs().maxCoeff(),
                                      (rep.group_right.att - rep.trident_right.att).cwiseAbs().maxCoeff());
  return rep;
}

Eigen::Matrix<double, 9, 1> nav_error(ErrorModelKind kind, const NavState& est, const NavState& truth,
                                      const EarthParams& earth) {
  if (kind == ErrorModelKind::Traditional) {
    Vec9 e;
    e << rotation_to_vector(est.c_be() * truth.c_be().transpose()),
        est.velocity_e(earth.omega_ie) - truth.velocity_e(earth.omega_ie), est.r_e - truth.r_e;
    return e;
  }
  Vec9 e = pack(tq_error(backing_side(kind), tq_from_nav(est), tq_from_nav(truth)));
  if (is_robocentric(kind)) e.head<3>() *= -1.0;
  return e;
}

NavState nav_inject(ErrorModelKind kind, const NavState& est, const Eigen::Matrix<double, 9, 1>& dx,
                    const EarthParams& earth) {
  if (kind == ErrorModelKind::Traditional) {
    NavState out = est;
    out.q_eb = (Quaternion::from_rotation_vector(-dx.head<3>()) * est.q_eb).normalized();
    out.r_e = est.r_e - dx.tail<3>();
    out.set_velocity_e(est.velocity_e(earth.omega_ie) - dx.segment<3>(3), earth.omega_ie);
    return out;
  }
  ErrorTriple d{dx.head<3>(), dx.segment<3>(3), dx.tail<3>()};
  if (is_robocentric(kind)) d.att = -d.att;
  return tq_to_nav(tq_inject(tq_from_nav(est), d, backing_side(kind)), est.time);
}

}  // namespace tqnav
