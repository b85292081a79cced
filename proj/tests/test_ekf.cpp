#include <gtest/gtest.h>

#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "tqnav/ekf.hpp"

using namespace tqnav;
using namespace tqnav::es;

namespace {

constexpr double kDeg = M_PI / 180.0;

struct AtRest {
  NavState nav;
  ImuSample imu;
};

AtRest at_rest(const EarthParams& earth = {}) {
  AtRest a;
  const GeoPosition p{0.55, 2.0, 10.0};
  a.nav.q_eb = Quaternion::from_matrix(c_en(p) * axis_rotation(Vec3::UnitY(), 0.3));
  a.nav.r_e = lla_to_ecef(p, earth);
  a.nav.set_velocity_e(Vec3::Zero(), earth.omega_ie);
  const Mat3 ct = a.nav.c_be().transpose();
  a.imu.gyro = ct * earth.omega_vec();
  a.imu.accel = -(ct * gravity_e(a.nav.r_e, earth));
  return a;
}

FilterConfig quiet() {
  FilterConfig c;
  c.noise.gyro_arw = 0.0;
  c.noise.accel_vrw = 0.0;
  return c;
}

}  // namespace

TEST(Propagate, ZeroSystemKeepsCovariance) {
  EXPECT_EQ(transition(Mat21::Zero(), 0.01), Mat15::Identity());
}

TEST(Propagate, BiasRandomWalkGrowsLinearly) {
  FilterConfig cfg = quiet();
  cfg.noise.gyro_bias_rw = 1e-6;
  cfg.noise.accel_bias_rw = 1e-4;
  const AtRest a = at_rest(cfg.earth);
  FilterState fs = make_filter(ErrorModelKind::LeftTrident, a.nav, {}, cfg);
  const Mat21 p0 = fs.P;
  for (int k = 0; k < 500; ++k) propagate_inplace(fs, a.imu, 0.01, cfg);
  EXPECT_NEAR((fs.P(BG, BG) - p0(BG, BG)) / 5.0, 1e-12, 1e-14);
  EXPECT_NEAR((fs.P(BA + 2, BA + 2) - p0(BA + 2, BA + 2)) / 5.0, 1e-8, 1e-10);
}

namespace {

double transition_error(const Mat21& F, double dt, int n, int dim) {
  Mat15 phi = Mat15::Identity();
  const Mat15 step = transition(F, dt);
  for (int k = 0; k < n; ++k) phi = step * phi;
  const Eigen::MatrixXd expect = Eigen::MatrixXd(F.topLeftCorner(dim, dim) * (dt * n)).exp();
  return (phi.topLeftCorner(dim, dim) - expect).norm() / expect.norm();
}

}  // namespace

TEST(Propagate, TransitionMatchesMatrixExponential) {
  const AtRest a = at_rest();
  const Mat21 F = build_system(ErrorModelKind::LeftTrident, a.nav, a.imu).F;
  // navigation block: third-order terms are only f x omega_ie
  EXPECT_LT(transition_error(F, 0.01, 100, 9), 1e-6);
  // the bias columns close a bias-att-vel-pos chain, so the full block shows the dt^2 truncation
  const double e1 = transition_error(F, 0.01, 100, 15), e2 = transition_error(F, 0.005, 200, 15);
  EXPECT_LT(e1, 1e-4);
  EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(Propagate, RejectsBadStep) {
  const FilterConfig cfg;
  const AtRest a = at_rest();
  FilterState fs = make_filter(ErrorModelKind::RightTrident, a.nav, {}, cfg);
  EXPECT_THROW(propagate_inplace(fs, a.imu, 0.0, cfg), std::invalid_argument);
}

TEST(Update, ZeroInnovation) {
  const FilterConfig cfg;
  const AtRest a = at_rest();
  FilterState fs = make_filter(ErrorModelKind::RightTrident, a.nav, {}, cfg);
  const Mat3x21 H = h_static(fs.kind, fs.nav, cfg.earth);
  Measurement m;
  m.z = predict_static(fs.nav, cfg.earth);
  m.R = 1e-4 * Mat3::Identity();
  const FilterState out = update(fs, m, H, m.z, cfg);
  EXPECT_LT((out.nav.r_e - fs.nav.r_e).norm(), 1e-15 * fs.nav.r_e.norm());
  EXPECT_LT((out.nav.v_prime - fs.nav.v_prime).norm(), 1e-12);
  EXPECT_LT((out.P.block<3, 3>(VEL, VEL).trace()), (fs.P.block<3, 3>(VEL, VEL).trace()));
  EXPECT_GT((fs.P - out.P).selfadjointView<Eigen::Lower>().eigenvalues().minCoeff(), -1e-6 * fs.P.norm());
}

TEST(Update, ScalarClosedForm) {
  const FilterConfig cfg;
  FilterState fs = make_filter(ErrorModelKind::LeftTrident, at_rest().nav, {}, cfg);
  fs.P = Mat21::Identity();
  fs.P(BG, BG) = 4e-10;
  Mat3x21 H = Mat3x21::Zero();
  H(0, BG) = 1.0;
  H(1, BG + 1) = 1.0;
  H(2, BG + 2) = 1.0;
  Measurement m;
  m.R = 1e-10 * Mat3::Identity();
  m.z = Vec3(3e-5, 0, 0);
  const FilterState out = update(fs, m, H, Vec3::Zero(), cfg);
  const double p = 4e-10, r = 1e-10, nu = -3e-5;
  EXPECT_NEAR(out.P(BG, BG), p * r / (p + r), 1e-12 * p);
  // dx = K nu estimates b_hat - b, so the estimate moves by -dx
  EXPECT_NEAR(out.bg.x(), -p / (p + r) * nu, 1e-12 * 3e-5);
}

// Updating against a noisy zero-velocity fix shrinks the velocity residual on average.
TEST(Update, ResidualShrinks) {
  FilterConfig cfg;
  cfg.zupt_sigma = 0.01;
  const AtRest a = at_rest(cfg.earth);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;
  double before = 0, after = 0;
  for (int t = 0; t < 100; ++t) {
    Eigen::Matrix<double, 9, 1> d;
    d << 0.01 * Vec3(n(rng), n(rng), n(rng)), 0.1 * Vec3(n(rng), n(rng), n(rng)), Vec3(n(rng), n(rng), n(rng));
    FilterState fs = make_filter(ErrorModelKind::RightTrident, nav_inject(ErrorModelKind::Traditional, a.nav, d, cfg.earth),
                                 {}, cfg);
    before += predict_static(fs.nav, cfg.earth).norm();
    Measurement m;
    m.z = cfg.zupt_sigma * Vec3(n(rng), n(rng), n(rng));
    m.R = cfg.zupt_sigma * cfg.zupt_sigma * Mat3::Identity();
    update_inplace(fs, m, h_static(fs.kind, fs.nav, cfg.earth), predict_static(fs.nav, cfg.earth), cfg);
    after += predict_static(fs.nav, cfg.earth).norm();
  }
  EXPECT_LT(after, 0.5 * before);
}

TEST(Update, GateRejectsOutlier) {
  FilterConfig cfg;
  cfg.gate_sigma = 3.0;
  FilterState fs = make_filter(ErrorModelKind::LeftTrident, at_rest().nav, {}, cfg);
  fs.P = 1e-6 * Mat21::Identity();
  Measurement m;
  m.z = Vec3(100, 0, 0);
  m.R = 1e-4 * Mat3::Identity();
  update_inplace(fs, m, h_static(fs.kind, fs.nav, cfg.earth), predict_static(fs.nav, cfg.earth), cfg);
  EXPECT_EQ(fs.rejected, 1);
}

TEST(Inject, ZeroIsIdentity) {
  const FilterState fs = make_filter(ErrorModelKind::RightTrident, at_rest().nav, {60, 0.1, 0.2, Vec3(1, 2, 3)}, {});
  const FilterState out = inject_and_reset(fs, Vec21::Zero());
  EXPECT_LT((out.nav.r_e - fs.nav.r_e).norm(), 1e-15 * fs.nav.r_e.norm());
  EXPECT_LT((out.nav.q_eb.coeffs() - fs.nav.q_eb.coeffs()).norm(), 1e-15);
  EXPECT_EQ(out.params.K, fs.params.K);
  EXPECT_EQ(out.bg, fs.bg);
}

TEST(Inject, RecoversTruth) {
  const EarthParams earth;
  const AtRest a = at_rest(earth);
  NavState truth = a.nav;
  truth.q_eb = Quaternion::from_rotation_vector(Vec3(2e-4, -1e-4, 3e-4)) * a.nav.q_eb;
  truth.v_prime += Vec3(1e-3, 2e-3, -1e-3);
  truth.r_e += Vec3(0.05, -0.02, 0.01);
  for (ErrorModelKind k : all_kinds()) {
    FilterState fs = make_filter(k, a.nav, {60.0, 0.01, 0.02, Vec3(1, 0.5, 0.8)}, {});
    Vec21 dx = Vec21::Zero();
    dx.head<9>() = nav_error(k, fs.nav, truth, earth);
    dx(K) = 0.2;  // K_hat - K
    const FilterState out = inject_and_reset(fs, dx, earth);
    EXPECT_LT((out.nav.r_e - truth.r_e).norm(), 1e-6) << kind_name(k);
    EXPECT_LT((out.nav.v_prime - truth.v_prime).norm(), 1e-6) << kind_name(k);
    EXPECT_LT(rotation_to_vector(out.nav.c_be() * truth.c_be().transpose()).norm(), 1e-7) << kind_name(k);
    EXPECT_NEAR(out.params.K, 59.8, 1e-12);
  }
}

TEST(InitCovariance, ParameterBlocks) {
  const InitStd init;
  for (ErrorModelKind k : all_kinds()) {
    const Mat21 p = init_covariance(k, at_rest().nav, init, 59.8);
    EXPECT_DOUBLE_EQ(p(PSI, PSI), std::pow(init.psi_deg * kDeg, 2));
    EXPECT_DOUBLE_EQ(p(THETA, THETA), std::pow(init.theta_deg * kDeg, 2));
    EXPECT_DOUBLE_EQ(p(LEVER + 1, LEVER + 1), init.lever * init.lever);
    EXPECT_DOUBLE_EQ(p(K, K), std::pow(init.k_frac * 59.8, 2));
    EXPECT_DOUBLE_EQ(p(BG, BG), init.gyro_bias * init.gyro_bias);
  }
}

TEST(InitCovariance, LeftAtIdentity) {
  EarthParams still;
  still.omega_ie = 1e-300;
  InitStd init;
  init.att_deg = 5.0;
  const Mat21 p = init_covariance(ErrorModelKind::LeftTrident, NavState{}, init, 59.8, still);
  const Mat21 q = init_covariance(ErrorModelKind::Traditional, NavState{}, init, 59.8, still);
  EXPECT_LT((p - q).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(InitCovariance, RightPositionDominatedByAttitude) {
  const InitStd init;  // 180 deg attitude std
  const Mat21 p = init_covariance(ErrorModelKind::RightTrident, at_rest().nav, init, 59.8);
  const double pos = p.block<3, 3>(POS, POS).trace();
  EXPECT_GT(pos, std::pow(M_PI * 6.3e6, 2));
  EXPECT_LT(pos, 2.0 * std::pow(M_PI * 6.4e6, 2));
}

TEST(InitCovariance, RejectsNonPositive) {
  InitStd init;
  init.vel = 0.0;
  EXPECT_THROW(init_covariance(ErrorModelKind::LeftTrident, at_rest().nav, init, 59.8), std::invalid_argument);
}

TEST(Covariance, StaysSymmetricPsdOverLongRuns) {
  FilterConfig cfg;
  const AtRest a = at_rest(cfg.earth);
  FilterState fs = make_filter(ErrorModelKind::RightTrident, a.nav, {}, cfg);
  Measurement m;
  m.R = cfg.zupt_sigma * cfg.zupt_sigma * Mat3::Identity();
  double worst = 0.0;
  for (int k = 1; k <= 100000; ++k) {
    propagate_inplace(fs, a.imu, 0.01, cfg);
    if (k % 100 == 0) {
      m.z.setZero();
      update_inplace(fs, m, h_static(fs.kind, fs.nav, cfg.earth), predict_static(fs.nav, cfg.earth), cfg);
    }
    if (k % 10000 == 0) {
      const Eigen::SelfAdjointEigenSolver<Mat21> es(fs.P);
      worst = std::min(worst, es.eigenvalues().minCoeff() / fs.P.trace());
      EXPECT_LT((fs.P - fs.P.transpose()).norm(), 1e-9 * fs.P.norm());
    }
  }
  EXPECT_GT(worst, -1e-9);
}
