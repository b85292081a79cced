#include "tqnav/mech.hpp"

#include <cmath>
#include <stdexcept>

namespace tqnav {

void MechConfig::validate() const {
  if (!(dt > 0.0 && dt <= 0.1)) throw std::invalid_argument("mech.dt must be in (0, 0.1]");
}

Vec3 velocity_rate(const NavState& s, const Vec3& f_b, const EarthParams& earth) {
  return s.q_eb.rotate(f_b) + gravitation_e(s.r_e, earth) - earth.omega_vec().cross(s.v_prime);
}

Vec3 position_rate(const NavState& s, const EarthParams& earth) {
  return s.v_prime - earth.omega_vec().cross(s.r_e);
}

NavState mech_step_trident(const NavState& state, const ImuSample& imu, const MechConfig& cfg,
                           const EarthParams& earth, const ImuSample* prev) {
  const double dt = cfg.dt;

  TridentTwist body{dt * imu.gyro, dt * imu.accel, Vec3::Zero()};
  if (cfg.integrator == Integrator::TwoSample && prev != nullptr) {
    const Vec3 a = dt * prev->gyro, b = dt * prev->accel;
    body.real += a.cross(body.real) / 12.0;
    body.eps1 += (a.cross(dt * imu.accel) + b.cross(dt * imu.gyro)) / 12.0;
  }
  // Work on the pose translated by -r0 so the e2 slot only holds this step's
  // displacement; rebuilding |r| ~ 6e6 m through quaternion products every
  // step otherwise leaves a one-ulp radial bias that the vertical channel
  // integrates. Conjugating by the translation adds w_ie x r0 to the earth twist.
  NavState local = state;
  local.r_e.setZero();
  const TridentQuaternion q0 = tq_from_nav(local);
  const TridentQuaternion right = tq_mul(q0, tq_exp(body.scaled(0.5)));
  const Vec3 g_mid = gravitation_e(state.r_e + 0.5 * dt * position_rate(state, earth), earth);
  const Vec3 w_r0 = earth.omega_vec().cross(state.r_e);

  // v' and g are frozen at their Euler-predicted midpoint values
  const Vec3 v_mid = state.v_prime + 0.5 * dt * velocity_rate(state, imu.accel, earth);
  TwistPair tw = twists_first_type(Vec3::Zero(), Vec3::Zero(), g_mid, v_mid, earth.omega_ie);
  tw.earth.eps2 += w_r0;
  NavState out = tq_to_nav(tq_normalize(tq_mul(tq_exp(tw.earth.scaled(-0.5 * dt)), right)), state.time + dt);
  out.r_e += state.r_e;
  return out;
}

NavState mech_step_classic(const NavState& state, const ImuSample& imu, const MechConfig& cfg,
                           const EarthParams& earth) {
  const double dt = cfg.dt;
  const Vec3 w = earth.omega_vec();
  const Mat3 wx = skew(w);
  const Mat3 eye = Mat3::Identity();

  NavState out;
  out.time = state.time + dt;
  out.q_eb = (Quaternion::exp_pure(-0.5 * dt * w) * state.q_eb * Quaternion::exp_pure(0.5 * dt * imu.gyro)).normalized();

  // rotation-compensated velocity increment, exact for a constant rate and specific force
  const Vec3 dth = dt * imu.gyro, dv = dt * imu.accel;
  const double th = dth.norm();
  double k1 = 0.5, k2 = 1.0 / 6.0;
  if (th > 1e-4) {
    k1 = (1.0 - std::cos(th)) / (th * th);
    k2 = (th - std::sin(th)) / (th * th * th);
  }
  const Vec3 dv_b = dv + k1 * dth.cross(dv) + k2 * dth.cross(dth.cross(dv));
  const Vec3 r_mid = state.r_e + 0.5 * dt * position_rate(state, earth);
  const Vec3 g_mid = gravitation_e(r_mid, earth);

  // Crank-Nicolson in increment form, (I + dt/2 W) dx = rhs, to keep the
  // large absolute r and v' out of the rounding
  const Eigen::PartialPivLU<Mat3> lhs(eye + 0.5 * dt * wx);
  const Vec3 dv_e = state.q_eb.rotate(dv_b);
  out.v_prime = state.v_prime + lhs.solve(-dt * wx * state.v_prime + dv_e - 0.5 * dt * wx * dv_e + dt * g_mid);
  out.r_e = state.r_e + lhs.solve(-dt * wx * state.r_e + 0.5 * dt * (state.v_prime + out.v_prime));
  return out;
}

}  // namespace tqnav
