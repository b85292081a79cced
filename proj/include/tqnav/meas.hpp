#pragma once

#include "tqnav/errmodel.hpp"

namespace tqnav {

struct OdoParams {
  double K{59.8};             // pulses/m
  double psi{0.0};            // rad, yaw mounting
  double theta{0.0};          // rad, pitch mounting
  Vec3 lever{Vec3::Zero()};   // m, IMU -> rear axle, body frame

  void validate() const;
};

enum class MeasKind { Static, Odometer };

struct Measurement {
  Vec3 z{Vec3::Zero()};
  Mat3 R{Mat3::Identity()};
  MeasKind kind{MeasKind::Static};
};

using Mat3x21 = Eigen::Matrix<double, 3, 21>;

/// Elementary frame rotations about y and z and their derivatives.
Mat3 m2(double psi);
Mat3 m3(double theta);
Mat3 d_m2(double psi);
Mat3 d_m3(double theta);

/// Body to vehicle frame, M3(theta) M2(psi).
Mat3 c_bm(double psi, double theta);

/// omega_eb in the body frame from the (bias-corrected) gyro.
Vec3 omega_eb_b(const NavState& s, const Vec3& gyro, const EarthParams& earth = {});

/// diag(K,1,1) C_b^m (C_e^b v_e + omega_eb x l).
Vec3 predict_odometer(const NavState& s, const ImuSample& imu, const OdoParams& p, const EarthParams& earth = {});

/// Predicted earth-referenced velocity, the quantity a zero-velocity update observes.
Vec3 predict_static(const NavState& s, const EarthParams& earth = {});

/// Jacobians of the predicted-minus-measured residual w.r.t. the error state of `kind`.
Mat3x21 h_static(ErrorModelKind kind, const NavState& s, const EarthParams& earth = {});
Mat3x21 h_odometer(ErrorModelKind kind, const NavState& s, const ImuSample& imu, const OdoParams& p,
                   const EarthParams& earth = {});

}  // namespace tqnav
