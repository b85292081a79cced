#pragma once

#include <optional>
#include <stdexcept>

#include "tqnav/meas.hpp"

namespace tqnav {

class FilterFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Initial one-sigma uncertainties, expressed in traditional error coordinates.
struct InitStd {
  double att_deg{180.0};
  double vel{0.1};             // m/s
  double pos{10.0};            // m
  double gyro_bias{2.42406840554768e-8};  // rad/s (0.005 deg/h)
  double accel_bias{2.941995e-4};         // m/s^2 (30 ug)
  double psi_deg{5.0};
  double theta_deg{5.0};
  double lever{1.0};           // m per axis
  double k_frac{0.02};         // fraction of the nominal scale factor
};

struct FilterConfig {
  EarthParams earth{};
  MechConfig mech{};
  ImuNoise noise{};
  InitStd init{};
  double zupt_sigma{0.01};                 // m/s per axis
  Vec3 odo_sigma{2.0, 0.05, 0.05};         // pulses/s, m/s, m/s
  double gate_sigma{0.0};                  // Mahalanobis gate, 0 disables
};

struct FilterState {
  NavState nav{};
  OdoParams params{};
  Vec3 bg{Vec3::Zero()};
  Vec3 ba{Vec3::Zero()};
  Mat21 P{Mat21::Identity()};
  ErrorModelKind kind{ErrorModelKind::LeftTrident};
  std::optional<ImuSample> last_imu{};  // bias-corrected, feeds the two-sample correction
  long rejected{0};                     // gated measurements
};

/// Bias-corrected copy of a raw sample.
ImuSample correct_imu(const FilterState& fs, const ImuSample& raw);

/// Diagonal covariance in traditional coordinates, mapped into the coordinates of `kind`.
Mat21 init_covariance(ErrorModelKind kind, const NavState& nav, const InitStd& init, double k_nominal,
                      const EarthParams& earth = {});

FilterState make_filter(ErrorModelKind kind, const NavState& nav, const OdoParams& params, const FilterConfig& cfg);

/// Phi = I + F dt + (F dt)^2 / 2 on the inertial block (the parameter block is static).
Mat15 transition(const Mat21& F, double dt);

FilterState propagate(const FilterState& fs, const ImuSample& raw, double dt, const FilterConfig& cfg);
void propagate_inplace(FilterState& fs, const ImuSample& raw, double dt, const FilterConfig& cfg);

/// Joseph-form update with innovation (predicted - measured); the correction is injected and reset.
FilterState update(const FilterState& fs, const Measurement& m, const Mat3x21& H, const Vec3& predicted,
                   const FilterConfig& cfg);
void update_inplace(FilterState& fs, const Measurement& m, const Mat3x21& H, const Vec3& predicted,
                    const FilterConfig& cfg);

FilterState inject_and_reset(const FilterState& fs, const Vec21& dx, const EarthParams& earth = {});

/// Zero-velocity update.
void zupt_update(FilterState& fs, const FilterConfig& cfg);
/// Odometer pulse rate plus the two non-holonomic zeros; `imu_raw` supplies the rotation rate.
void odometer_update(FilterState& fs, double pulse_rate, const ImuSample& imu_raw, const FilterConfig& cfg);

}  // namespace tqnav
