#include "tqnav/ekf.hpp"

#include <cmath>

namespace tqnav {

namespace {

constexpr double kDeg = M_PI / 180.0;

void symmetrize(Mat21& p) { p = 0.5 * (p + p.transpose()).eval(); }

void check_finite(const Mat21& p, const char* where) {
  if (!p.allFinite()) throw FilterFault(std::string("non-finite covariance after ") + where);
}

}  // namespace

ImuSample correct_imu(const FilterState& fs, const ImuSample& raw) {
  return {raw.t, raw.gyro - fs.bg, raw.accel - fs.ba};
}

Mat21 init_covariance(ErrorModelKind kind, const NavState& nav, const InitStd& init, double k_nominal,
                      const EarthParams& earth) {
  using namespace es;
  Vec21 sd;
  sd << Vec3::Constant(init.att_deg * kDeg), Vec3::Constant(init.vel), Vec3::Constant(init.pos),
      Vec3::Constant(init.gyro_bias), Vec3::Constant(init.accel_bias), init.psi_deg * kDeg, init.theta_deg * kDeg,
      Vec3::Constant(init.lever), init.k_frac * k_nominal;
  if (!(sd.array() > 0.0).all()) throw std::invalid_argument("initial standard deviations must be positive");
  const Mat21 p = sd.array().square().matrix().asDiagonal();
  if (kind == ErrorModelKind::Traditional) return p;
  Mat21 out = backing_side(kind) == Side::Left ? cov_transform_left(p, nav, earth) : cov_transform_right(p, nav, earth);
  if (is_robocentric(kind)) {
    const Mat21 t = robocentric_map();
    out = t * out * t;
  }
  return out;
}

FilterState make_filter(ErrorModelKind kind, const NavState& nav, const OdoParams& params, const FilterConfig& cfg) {
  FilterState fs;
  fs.kind = kind;
  fs.nav = nav;
  fs.params = params;
  fs.P = init_covariance(kind, nav, cfg.init, params.K, cfg.earth);
  return fs;
}

Mat15 transition(const Mat21& F, double dt) {
  const Mat15 fdt = F.topLeftCorner<15, 15>() * dt;
  return Mat15::Identity() + fdt + 0.5 * fdt * fdt;
}

void propagate_inplace(FilterState& fs, const ImuSample& raw, double dt, const FilterConfig& cfg) {
  if (!(dt > 0.0)) throw std::invalid_argument("propagate: dt must be positive");
  const ImuSample imu = correct_imu(fs, raw);
  // linearize at the start of the interval
  const SystemMatrices sys = build_system(fs.kind, fs.nav, imu, cfg.earth, cfg.noise);

  MechConfig mc = cfg.mech;
  mc.dt = dt;
  const ImuSample* prev = fs.last_imu ? &*fs.last_imu : nullptr;
  fs.nav = mech_step_trident(fs.nav, imu, mc, cfg.earth, prev);
  fs.last_imu = imu;

  const Mat15 phi = transition(sys.F, dt);
  const Eigen::Matrix<double, 15, 12> g = sys.G.topRows<15>();
  const Mat15 qd = g * sys.Q * g.transpose() * dt;
  auto a = fs.P.topLeftCorner<15, 15>();
  const Mat15 a_new = phi * a * phi.transpose() + qd;
  a = a_new;
  const Eigen::Matrix<double, 15, 6> b = phi * fs.P.topRightCorner<15, 6>();
  fs.P.topRightCorner<15, 6>() = b;
  fs.P.bottomLeftCorner<6, 15>() = b.transpose();
  symmetrize(fs.P);
  check_finite(fs.P, "propagate");
}

FilterState propagate(const FilterState& fs, const ImuSample& raw, double dt, const FilterConfig& cfg) {
  FilterState out = fs;
  propagate_inplace(out, raw, dt, cfg);
  return out;
}

FilterState inject_and_reset(const FilterState& fs, const Vec21& dx, const EarthParams& earth) {
  using namespace es;
  FilterState out = fs;
  out.nav = nav_inject(fs.kind, fs.nav, dx.head<9>(), earth);
  out.bg -= dx.segment<3>(BG);
  out.ba -= dx.segment<3>(BA);
  out.params.psi -= dx(PSI);
  out.params.theta -= dx(THETA);
  out.params.lever -= dx.segment<3>(LEVER);
  out.params.K -= dx(K);
  return out;
}

void update_inplace(FilterState& fs, const Measurement& m, const Mat3x21& H, const Vec3& predicted,
                    const FilterConfig& cfg) {
  const Vec3 nu = predicted - m.z;
  if (!nu.allFinite()) throw FilterFault("non-finite innovation");
  const Eigen::Matrix<double, 21, 3> pht = fs.P * H.transpose();
  const Mat3 s = H * pht + m.R;
  const Eigen::LDLT<Mat3> ldlt(s);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all())
    throw FilterFault("singular innovation covariance");
  if (cfg.gate_sigma > 0.0 && nu.dot(ldlt.solve(nu)) > cfg.gate_sigma * cfg.gate_sigma) {
    ++fs.rejected;
    return;
  }
  const Eigen::Matrix<double, 21, 3> k = ldlt.solve(pht.transpose()).transpose();
  const Vec21 dx = k * nu;
  const Mat21 ikh = Mat21::Identity() - k * H;
  fs.P = ikh * fs.P * ikh.transpose() + k * m.R * k.transpose();
  symmetrize(fs.P);
  check_finite(fs.P, "update");
  fs = inject_and_reset(fs, dx, cfg.earth);
}

FilterState update(const FilterState& fs, const Measurement& m, const Mat3x21& H, const Vec3& predicted,
                   const FilterConfig& cfg) {
  FilterState out = fs;
  update_inplace(out, m, H, predicted, cfg);
  return out;
}

void zupt_update(FilterState& fs, const FilterConfig& cfg) {
  Measurement m;
  m.kind = MeasKind::Static;
  m.z = Vec3::Zero();
  m.R = Mat3::Identity() * cfg.zupt_sigma * cfg.zupt_sigma;
  update_inplace(fs, m, h_static(fs.kind, fs.nav, cfg.earth), predict_static(fs.nav, cfg.earth), cfg);
}

void odometer_update(FilterState& fs, double pulse_rate, const ImuSample& imu_raw, const FilterConfig& cfg) {
  Measurement m;
  m.kind = MeasKind::Odometer;
  m.z = Vec3(pulse_rate, 0.0, 0.0);
  m.R = cfg.odo_sigma.array().square().matrix().asDiagonal();
  const ImuSample imu = correct_imu(fs, imu_raw);
  update_inplace(fs, m, h_odometer(fs.kind, fs.nav, imu, fs.params, cfg.earth),
                 predict_odometer(fs.nav, imu, fs.params, cfg.earth), cfg);
}

}  // namespace tqnav
