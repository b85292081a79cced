#pragma once

#include "tqnav/earth.hpp"
#include "tqnav/triquat.hpp"

namespace tqnav {

/// Mean angular rate and specific force over the interval (t - dt, t].
struct ImuSample {
  double t{0.0};               // s, end of the interval
  Vec3 gyro{Vec3::Zero()};     // rad/s
  Vec3 accel{Vec3::Zero()};    // m/s^2
};

/// Odometer pulse rate at time t.
struct OdoSample {
  double t{0.0};
  double pulse_rate{0.0};  // pulses/s
};

enum class Integrator { SingleSample, TwoSample };

struct MechConfig {
  double dt{0.01};
  Integrator integrator{Integrator::SingleSample};

  void validate() const;
};

/// One strapdown step on the trident quaternion.
///
/// The pose is advanced as exp(-dt/2 W_e) o q o exp(dt/2 W_b), i.e. the exact
/// solution of the kinematic equation with the twists frozen at the interval
/// midpoint. The body twist is (w_ib, f_b); the earth twist carries
/// (w_ie, -g, -v') with g and v' predicted at the midpoint. With the two-sample
/// option `prev` holds the previous sample and the trident increments receive
/// the cross-product correction (coning in the real slot, sculling in e1).
NavState mech_step_trident(const NavState& state, const ImuSample& imu, const MechConfig& cfg,
                           const EarthParams& earth = {}, const ImuSample* prev = nullptr);

/// Component-form oracle: quaternion attitude update and trapezoidal
/// (Crank-Nicolson) velocity and position in the rotating frame.
NavState mech_step_classic(const NavState& state, const ImuSample& imu, const MechConfig& cfg,
                           const EarthParams& earth = {});

/// Continuous-time derivatives (v'_dot, r_dot) for given attitude and inputs.
Vec3 velocity_rate(const NavState& s, const Vec3& f_b, const EarthParams& earth);
Vec3 position_rate(const NavState& s, const EarthParams& earth);

}  // namespace tqnav
