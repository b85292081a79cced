#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "tqnav/earth.hpp"
#include "tqnav/mech.hpp"

namespace tqnav {

enum class ErrorModelKind { LeftTrident, RightTrident, RobocentricLeft, RobocentricRight, Traditional };

const char* kind_name(ErrorModelKind k);        // "LQEKF", "RQEKF", "RC-LQEKF", "RC-RQEKF", "EKF"
ErrorModelKind parse_kind(std::string_view s);  // accepts the short names above, case-insensitive
std::vector<ErrorModelKind> all_kinds();

/// Index layout of the 21-state error vector.
namespace es {
constexpr int ATT = 0;
constexpr int VEL = 3;
constexpr int POS = 6;
constexpr int BG = 9;
constexpr int BA = 12;
constexpr int PSI = 15;
constexpr int THETA = 16;
constexpr int LEVER = 17;
constexpr int K = 20;
constexpr int N = 21;
constexpr int NI = 15;  // inertial part
constexpr int NW = 12;  // noise: w_g, w_a, w_grw, w_arw
}  // namespace es

using Vec21 = Eigen::Matrix<double, 21, 1>;
using Mat21 = Eigen::Matrix<double, 21, 21>;
using Mat21x12 = Eigen::Matrix<double, 21, 12>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat15 = Eigen::Matrix<double, 15, 15>;

/// Continuous-time white-noise densities.
struct ImuNoise {
  double gyro_arw{2.9088820866572158e-7};   // rad/sqrt(s)   (0.001 deg/sqrt(h))
  double accel_vrw{4.903325e-5};            // m/s^2/sqrt(Hz) (5 ug/sqrt(Hz))
  double gyro_bias_rw{0.0};                 // rad/s/sqrt(s)
  double accel_bias_rw{0.0};                // m/s^2/sqrt(s)
};

struct SystemMatrices {
  Mat21 F{Mat21::Zero()};
  Mat21x12 G{Mat21x12::Zero()};
  Mat12 Q{Mat12::Zero()};
};

Mat12 noise_psd(const ImuNoise& n);

/// F, G and Q at the given estimate. `imu` must already be bias-corrected.
SystemMatrices build_system(ErrorModelKind kind, const NavState& state, const ImuSample& imu,
                            const EarthParams& earth = {}, const ImuNoise& noise = {});

/// Max |difference| per 3x3 block of the 15x15 inertial part of F.
struct InvarianceReport {
  std::array<std::array<double, 5>, 5> block_diff{};
  double gradient_block{0.0};   // (vel, pos) block of the left model
  double max_other{0.0};        // every block except the gradient block
};

InvarianceReport left_invariance_report(const NavState& a, const NavState& b, const ImuSample& imu,
                                        const EarthParams& earth = {});
InvarianceReport right_invariance_report(const NavState& a, const NavState& b, const ImuSample& imu,
                                         const EarthParams& earth = {});

/// Jacobians from traditional (dtheta, dv_e, dr) errors to trident errors on the inertial 9x9 block.
/// With the conventions of nav_error the map is -J (estimate-minus-truth against truth-relative
/// products); the sign cancels in J P J^T, and J_l = I at identity attitude without earth rate.
Mat9 jacobian_left(const NavState& s, const EarthParams& earth = {});
Mat9 jacobian_right(const NavState& s, const EarthParams& earth = {});

/// J P J^T with J the 21x21 embedding (identity on biases and parameters).
Mat21 cov_transform_left(const Mat21& p_trad, const NavState& s, const EarthParams& earth = {});
Mat21 cov_transform_right(const Mat21& p_trad, const NavState& s, const EarthParams& earth = {});

/// diag(-I3, I18): maps world-centric errors to the robocentric ones.
Mat21 robocentric_map();

/// Which world-centric trident side backs a kind (RobocentricLeft is backed by the right error).
Side backing_side(ErrorModelKind kind);
bool is_robocentric(ErrorModelKind kind);

/// Extended pose [C v' r; 0 1 0; 0 0 1].
using Mat5 = Eigen::Matrix<double, 5, 5>;
Mat5 extended_pose(const NavState& s);

struct Se23Report {
  ErrorTriple group_left, group_right;     // first-order vectors read off eta_l, eta_r
  ErrorTriple trident_left, trident_right;
  double left_discrepancy{0.0};            // max abs over the six translation components
  double right_discrepancy{0.0};
  double attitude_discrepancy{0.0};
};

Se23Report se23_cross_check(const NavState& est, const NavState& truth);

/// Inertial error (first 9 components) of `est` relative to `truth` in the coordinates of `kind`.
Eigen::Matrix<double, 9, 1> nav_error(ErrorModelKind kind, const NavState& est, const NavState& truth,
                                      const EarthParams& earth = {});
/// The state that `dx` describes as the truth: nav_error(kind, est, nav_inject(kind, est, dx)) ~ dx.
NavState nav_inject(ErrorModelKind kind, const NavState& est, const Eigen::Matrix<double, 9, 1>& dx,
                    const EarthParams& earth = {});

}  // namespace tqnav
