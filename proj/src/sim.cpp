#include "tqnav/sim.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tqnav {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// speed, heading and travelled distance with their time derivatives
struct Kin {
  double v{0.0}, vd{0.0};
  double h{0.0}, hd{0.0};
  double s{0.0};
};

struct SegmentStart {
  double t0, v0, h0, s0;
};

Kin eval_segment(const Segment& seg, const SegmentStart& st, double tau) {
  Kin k;
  k.v = st.v0;
  k.h = st.h0;
  k.s = st.s0 + st.v0 * tau;
  const double T = seg.duration;
  switch (seg.type) {
    case Segment::Type::Hold:
      break;
    case Segment::Type::Accelerate: {
      const double dv = seg.speed - st.v0;
      const double x = kTwoPi * tau / T;
      k.v = st.v0 + dv * (tau / T - std::sin(x) / kTwoPi);
      k.vd = dv / T * (1.0 - std::cos(x));
      k.s = st.s0 + st.v0 * tau + dv * (tau * tau / (2.0 * T) + T * (std::cos(x) - 1.0) / (kTwoPi * kTwoPi));
      break;
    }
    case Segment::Type::Vary: {
      const double w = kTwoPi / seg.period;
      k.v = st.v0 + seg.speed * std::sin(w * tau);
      k.vd = seg.speed * w * std::cos(w * tau);
      k.s = st.s0 + st.v0 * tau + seg.speed / w * (1.0 - std::cos(w * tau));
      break;
    }
    case Segment::Type::Turn: {
      const double R = seg.ramp;
      const double peak = seg.angle / (T - R);
      double turned, rate;
      if (tau < R) {
        turned = 0.5 * peak * (tau - R / M_PI * std::sin(M_PI * tau / R));
        rate = 0.5 * peak * (1.0 - std::cos(M_PI * tau / R));
      } else if (tau <= T - R) {
        turned = 0.5 * peak * R + peak * (tau - R);
        rate = peak;
      } else {
        const double sg = T - tau;
        turned = seg.angle - 0.5 * peak * (sg - R / M_PI * std::sin(M_PI * sg / R));
        rate = 0.5 * peak * (1.0 - std::cos(M_PI * sg / R));
      }
      k.h = st.h0 + turned;
      k.hd = rate;
      break;
    }
  }
  return k;
}

class Schedule {
 public:
  explicit Schedule(const TrajectoryProfile& p) : p_(p) {
    SegmentStart st{0.0, 0.0, p.heading, 0.0};
    for (const Segment& seg : p.segments) {
      starts_.push_back(st);
      const Kin end = eval_segment(seg, st, seg.duration);
      st = {st.t0 + seg.duration, end.v, end.h, end.s};
    }
  }

  Kin at(double t) const {
    if (p_.segments.empty()) {
      Kin k;
      k.h = p_.heading;
      return k;
    }
    std::size_t i = 0;
    while (i + 1 < starts_.size() && t >= starts_[i + 1].t0) ++i;
    const double tau = std::min(t - starts_[i].t0, p_.segments[i].duration);
    return eval_segment(p_.segments[i], starts_[i], tau);
  }

 private:
  const TrajectoryProfile& p_;
  std::vector<SegmentStart> starts_;
};

// Vehicle attitude C_m^L (L = level NUE frame at the start) and its angular rate in L.
struct Attitude {
  Mat3 c;
  Vec3 w;
};

Attitude vehicle_attitude(const TrajectoryProfile& p, const Kin& k) {
  const double kp = kTwoPi / p.terrain_pitch_wavelength, kr = kTwoPi / p.terrain_roll_wavelength;
  const double pitch = p.terrain_pitch * std::sin(kp * k.s);
  const double pitch_d = p.terrain_pitch * std::cos(kp * k.s) * kp * k.v;
  const double roll = p.terrain_roll * std::sin(kr * k.s);
  const double roll_d = p.terrain_roll * std::cos(kr * k.s) * kr * k.v;
  const Mat3 r1 = axis_rotation(Vec3::UnitY(), -k.h);
  const Mat3 r2 = axis_rotation(Vec3::UnitZ(), pitch);
  const Mat3 r3 = axis_rotation(Vec3::UnitX(), roll);
  Attitude a;
  a.c = r1 * r2 * r3;
  a.w = -k.hd * Vec3::UnitY() + pitch_d * (r1 * Vec3::UnitZ()) + roll_d * (r1 * r2 * Vec3::UnitX());
  return a;
}

// IMU-point kinematics in the L frame at time t given the wheel-point position.
struct Point {
  Vec3 p, v, a;
  Mat3 c_bl;
  Vec3 w_b;  // omega_Lb in the body frame
  double speed;
  Mat3 c_ml;
};

class Kinematics {
 public:
  Kinematics(const TrajectoryProfile& p, const SensorSpec& spec) : p_(p), sched_(p), spec_(spec) {
    c_bm_ = c_bm(spec.mount_psi, spec.mount_theta);
  }

  Vec3 wheel_velocity(double t) const {
    const Kin k = sched_.at(t);
    return k.v * (vehicle_attitude(p_, k).c * Vec3::UnitX());
  }

  Vec3 omega_l(double t) const { return vehicle_attitude(p_, sched_.at(t)).w; }

  Point at(double t, const Vec3& p_wheel) const {
    const Kin k = sched_.at(t);
    const Attitude att = vehicle_attitude(p_, k);
    const Vec3 fwd = att.c * Vec3::UnitX();
    const Vec3 v_wheel = k.v * fwd;
    const Vec3 a_wheel = k.vd * fwd + k.v * att.w.cross(fwd);
    const double h = 1e-4;
    const Vec3 wdot = (omega_l(t + h) - omega_l(t - h)) / (2.0 * h);

    Point pt;
    pt.c_ml = att.c;
    pt.c_bl = att.c * c_bm_;
    pt.speed = k.v;
    const Vec3 arm = pt.c_bl * spec_.lever;  // IMU -> wheel point, L frame
    pt.p = p_wheel - arm;
    pt.v = v_wheel - att.w.cross(arm);
    pt.a = a_wheel - wdot.cross(arm) - att.w.cross(att.w.cross(arm));
    pt.w_b = pt.c_bl.transpose() * att.w;
    return pt;
  }

 private:
  const TrajectoryProfile& p_;
  Schedule sched_;
  const SensorSpec& spec_;
  Mat3 c_bm_;
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// -------- csv helpers

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  return out;
}

double parse_num(const std::string& s, const std::string& path, std::size_t lineno) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) throw CsvError(path + ":" + std::to_string(lineno) + ": empty field");
  double v = 0.0;
  const char* first = s.data() + b;
  const char* last = s.data() + e + 1;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw CsvError(path + ":" + std::to_string(lineno) + ": bad number '" + s + "'");
  return v;
}

std::vector<std::vector<double>> read_table(const std::string& path, std::size_t cols) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::vector<double>> rows;
  if (!std::getline(in, line)) throw CsvError(path + ": empty file");
  ++lineno;
  if (split(line).size() != cols) throw CsvError(path + ":1: expected " + std::to_string(cols) + " header columns");
  double last_t = -INFINITY;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split(line);
    if (f.size() != cols)
      throw CsvError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) + " fields");
    std::vector<double> row;
    row.reserve(cols);
    for (const auto& s : f) row.push_back(parse_num(s, path, lineno));
    if (!(row[0] > last_t)) throw CsvError(path + ":" + std::to_string(lineno) + ": time does not increase");
    last_t = row[0];
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError(path + ": no samples");
  return rows;
}

std::FILE* open_out(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw CsvError("cannot write " + path);
  return f;
}

}  // namespace

void TrajectoryProfile::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("profile duration must be positive");
  if (std::abs(start.latitude) > M_PI / 2) throw std::invalid_argument("start latitude out of range");
  if (segments.empty()) return;
  double total = 0.0, v = 0.0;
  for (const Segment& s : segments) {
    if (!(s.duration > 0.0)) throw std::invalid_argument("segment duration must be positive");
    if (s.type == Segment::Type::Accelerate) {
      if (s.speed < 0.0) throw std::invalid_argument("negative target speed");
      v = s.speed;
    }
    if (s.type == Segment::Type::Vary && (s.speed > v || !(s.period > 0.0)))
      throw std::invalid_argument("speed variation would make the speed negative");
    if (s.type == Segment::Type::Turn && !(s.ramp >= 0.0 && 2.0 * s.ramp <= s.duration))
      throw std::invalid_argument("turn ramps exceed the segment");
    total += s.duration;
  }
  if (std::abs(total - duration) > 1e-9) throw std::invalid_argument("segments do not tile the profile duration");
}

TrajectoryProfile canonical_in_motion_profile() {
  TrajectoryProfile p;
  p.kind = Scenario::InMotion;
  p.duration = 600.0;
  p.start = {31.0 * M_PI / 180.0, 121.4 * M_PI / 180.0, 10.0};
  const double quarter = M_PI / 2.0;
  using T = Segment::Type;
  p.segments = {
      {T::Hold, 10.0, 0.0, 0.0, 0.0, 0.0},
      {T::Accelerate, 20.0, 10.0, 0.0, 0.0, 0.0},
      {T::Hold, 100.0, 0.0, 0.0, 0.0, 0.0},
      {T::Turn, 17.0, 0.0, quarter, 2.0, 0.0},
      {T::Hold, 100.0, 0.0, 0.0, 0.0, 0.0},
      {T::Turn, 17.0, 0.0, -quarter, 2.0, 0.0},
      {T::Vary, 336.0, 3.0, 0.0, 0.0, 60.0},
  };
  p.terrain_pitch = 2.0 * M_PI / 180.0;
  p.terrain_roll = 2.0 * M_PI / 180.0;
  return p;
}

TrajectoryProfile static_profile(double duration) {
  TrajectoryProfile p;
  p.kind = Scenario::Static;
  p.duration = duration;
  p.start = {31.0 * M_PI / 180.0, 121.4 * M_PI / 180.0, 10.0};
  return p;
}

void SensorSpec::validate() const {
  if (gyro_bias < 0 || gyro_arw < 0 || accel_bias < 0 || accel_vrw < 0 || gyro_bias_rw < 0 || accel_bias_rw < 0 ||
      odo_noise < 0)
    throw std::invalid_argument("noise densities must be non-negative");
  if (!(odo_K > 0.0)) throw std::invalid_argument("odometer scale factor must be positive");
  if (!(imu_rate > 0.0) || !(odo_rate > 0.0) || odo_rate > imu_rate)
    throw std::invalid_argument("sensor rates must satisfy 0 < odo_rate <= imu_rate");
}

Truth gen_truth(const TrajectoryProfile& profile, const SensorSpec& spec, const EarthParams& earth) {
  profile.validate();
  spec.validate();
  const double dt = 1.0 / spec.imu_rate;
  const std::size_t n = static_cast<std::size_t>(std::llround(profile.duration / dt));
  const Kinematics kin(profile, spec);

  // wheel-point position on a half-step grid, three-point Gauss-Legendre per cell
  const double hs = 0.5 * dt;
  const double gx = std::sqrt(0.6);
  std::vector<Vec3> pw(2 * n + 2, Vec3::Zero());
  for (std::size_t j = 1; j < pw.size(); ++j) {
    const double a = (j - 1) * hs, m = a + 0.5 * hs;
    const Vec3 inc = (5.0 * kin.wheel_velocity(m - 0.5 * hs * gx) + 8.0 * kin.wheel_velocity(m) +
                      5.0 * kin.wheel_velocity(m + 0.5 * hs * gx)) * (hs / 18.0);
    pw[j] = pw[j - 1] + inc;
  }

  const Mat3 c_le = c_en(profile.start);
  const Vec3 r0 = lla_to_ecef(profile.start, earth);
  const Vec3 w = earth.omega_vec();

  struct EState {
    NavState nav;
    Vec3 a_e;
    Quaternion q_ib;
    Vec3 w_b;
    double speed;
    Mat3 c_mn;
  };
  auto state_at = [&](std::size_t half_index) {
    const double t = half_index * hs;
    const Point pt = kin.at(t, pw[half_index]);
    EState s;
    s.nav.time = t;
    s.nav.r_e = r0 + c_le * pt.p;
    const Vec3 v_e = c_le * pt.v;
    s.nav.v_prime = v_e + w.cross(s.nav.r_e);
    s.nav.q_eb = Quaternion::from_matrix(c_le * pt.c_bl);
    s.a_e = c_le * pt.a;
    s.q_ib = Quaternion::exp_pure(0.5 * earth.omega_ie * t * Vec3::UnitZ()) * s.nav.q_eb;
    s.w_b = pt.w_b;
    s.speed = pt.speed;
    s.c_mn = pt.c_ml;
    return s;
  };

  Truth tr;
  tr.dt = dt;
  tr.states.reserve(n + 1);
  tr.imu.reserve(n);
  EState prev = state_at(0);
  auto push = [&](const EState& s) {
    tr.states.push_back(s.nav);
    tr.speed.push_back(s.speed);
    tr.omega_eb.push_back(s.w_b);
    tr.c_mn.push_back(s.c_mn);
  };
  push(prev);
  for (std::size_t k = 0; k < n; ++k) {
    const EState mid = state_at(2 * k + 1);
    const EState next = state_at(2 * k + 2);
    ImuSample imu;
    imu.t = next.nav.time;
    // exact attitude increment in the inertial frame
    imu.gyro = (prev.q_ib.conj() * next.q_ib).to_rotation_vector() / dt;
    const Vec3 r = mid.nav.r_e;
    const Vec3 v_e = mid.nav.velocity_e(earth.omega_ie);
    const Vec3 f_e = mid.a_e + 2.0 * w.cross(v_e) + w.cross(w.cross(r)) - gravitation_e(r, earth);
    imu.accel = mid.nav.q_eb.conj().rotate(f_e);
    tr.imu.push_back(imu);
    push(next);
    prev = next;
  }
  return tr;
}

ImuRealization synth_imu(const Truth& truth, const SensorSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  ImuRealization out;
  for (int i = 0; i < 3; ++i) out.bg(i) = spec.gyro_bias * nd(rng);
  for (int i = 0; i < 3; ++i) out.ba(i) = spec.accel_bias * nd(rng);
  const double dt = truth.dt;
  const double sg = spec.gyro_arw / std::sqrt(dt), sa = spec.accel_vrw / std::sqrt(dt);
  const double rg = spec.gyro_bias_rw * std::sqrt(dt), ra = spec.accel_bias_rw * std::sqrt(dt);
  Vec3 bg = out.bg, ba = out.ba;
  out.samples.reserve(truth.imu.size());
  for (const ImuSample& s : truth.imu) {
    ImuSample m = s;
    for (int i = 0; i < 3; ++i) m.gyro(i) += bg(i) + sg * nd(rng);
    for (int i = 0; i < 3; ++i) m.accel(i) += ba(i) + sa * nd(rng);
    if (rg > 0.0 || ra > 0.0) {
      for (int i = 0; i < 3; ++i) bg(i) += rg * nd(rng);
      for (int i = 0; i < 3; ++i) ba(i) += ra * nd(rng);
    }
    out.samples.push_back(m);
  }
  return out;
}

ImuRealization synth_imu(const Truth& truth, const SensorSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  return synth_imu(truth, spec, rng);
}

std::vector<OdoSample> synth_odometer(const Truth& truth, const SensorSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const auto step = static_cast<std::size_t>(std::llround(spec.imu_rate / spec.odo_rate));
  const double period = step * truth.dt;
  std::vector<OdoSample> out;
  for (std::size_t k = step; k < truth.states.size(); k += step) {
    double rate = spec.odo_K * truth.speed[k] + spec.odo_noise * nd(rng);
    if (spec.odo_quantize) rate = std::round(rate * period) / period;
    out.push_back({truth.states[k].time, rate});
  }
  return out;
}

std::vector<OdoSample> synth_odometer(const Truth& truth, const SensorSpec& spec) {
  std::mt19937_64 rng(splitmix(spec.seed ^ 0x6f646f6d65746572ull));
  return synth_odometer(truth, spec, rng);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t heading_index, std::uint64_t trial) {
  return splitmix(splitmix(splitmix(seed) ^ heading_index) ^ (trial + 0x51ED270B27F3C4A5ull));
}

void write_imu_csv(const std::string& path, const std::vector<ImuSample>& s) {
  std::FILE* f = open_out(path);
  std::fprintf(f, "t,gx,gy,gz,ax,ay,az\n");
  for (const auto& x : s)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x.t, x.gyro.x(), x.gyro.y(), x.gyro.z(),
                 x.accel.x(), x.accel.y(), x.accel.z());
  std::fclose(f);
}

std::vector<ImuSample> read_imu_csv(const std::string& path) {
  std::vector<ImuSample> out;
  for (const auto& r : read_table(path, 7)) out.push_back({r[0], Vec3(r[1], r[2], r[3]), Vec3(r[4], r[5], r[6])});
  return out;
}

void write_odo_csv(const std::string& path, const std::vector<OdoSample>& s) {
  std::FILE* f = open_out(path);
  std::fprintf(f, "t,pulse_rate\n");
  for (const auto& x : s) std::fprintf(f, "%.17g,%.17g\n", x.t, x.pulse_rate);
  std::fclose(f);
}

std::vector<OdoSample> read_odo_csv(const std::string& path) {
  std::vector<OdoSample> out;
  for (const auto& r : read_table(path, 2)) out.push_back({r[0], r[1]});
  return out;
}

void write_truth_csv(const std::string& path, const std::vector<NavState>& s) {
  std::FILE* f = open_out(path);
  std::fprintf(f, "t,qw,qx,qy,qz,vpx,vpy,vpz,rx,ry,rz\n");
  for (const auto& x : s)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x.time, x.q_eb.w,
                 x.q_eb.x, x.q_eb.y, x.q_eb.z, x.v_prime.x(), x.v_prime.y(), x.v_prime.z(), x.r_e.x(), x.r_e.y(),
                 x.r_e.z());
  std::fclose(f);
}

std::vector<NavState> read_truth_csv(const std::string& path) {
  std::vector<NavState> out;
  for (const auto& r : read_table(path, 11)) {
    NavState s;
    s.time = r[0];
    s.q_eb = Quaternion(r[1], r[2], r[3], r[4]);
    s.v_prime = Vec3(r[5], r[6], r[7]);
    s.r_e = Vec3(r[8], r[9], r[10]);
    out.push_back(s);
  }
  return out;
}

}  // namespace tqnav
