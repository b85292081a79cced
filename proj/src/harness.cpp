#include "tqnav/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace tqnav {

namespace {

constexpr double kDeg = M_PI / 180.0;
constexpr double kG0 = 9.80665;
constexpr double kDegPerHour = kDeg / 3600.0;       // deg/h -> rad/s
constexpr double kDegPerRootHour = kDeg / 60.0;     // deg/sqrt(h) -> rad/sqrt(s)
constexpr double kMicroG = 1e-6 * kG0;

// Nav-frame axes as columns of C_n^e (N, U, E).
Mat3 c_ne_at(const Vec3& r_e, const EarthParams& earth) {
  const GeoPosition g = ecef_to_lla(r_e, earth);
  return c_en(g);
}

double wrap_deg(double a) {
  a = std::fmod(a, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const std::string t = trim(s);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError("bad number for " + what + ": '" + s + "'");
  return v;
}

long to_long(const std::string& s, const std::string& what) {
  long v = 0;
  const std::string t = trim(s);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError("bad integer for " + what + ": '" + s + "'");
  return v;
}

std::vector<double> to_list(const std::string& s, const std::string& what) {
  // "a:step:b" range or comma list
  const auto parts = split(s, ':');
  std::vector<double> out;
  if (parts.size() == 3) {
    const double a = to_double(parts[0], what), st = to_double(parts[1], what), b = to_double(parts[2], what);
    if (!(st > 0.0) || b < a) throw ConfigError("bad range for " + what);
    const long n = std::lround(std::floor((b - a) / st + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(a + i * st);
    return out;
  }
  for (const auto& p : split(s, ',')) out.push_back(to_double(p, what));
  return out;
}

Vec3 to_vec3(const std::string& s, const std::string& what) {
  const auto v = to_list(s, what);
  if (v.size() != 3) throw ConfigError(what + " needs three comma-separated values");
  return {v[0], v[1], v[2]};
}

bool to_bool(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("bad boolean for " + what + ": '" + s + "'");
}

// Per-run, per-filter record at the output epochs.
struct RunTrace {
  bool ok{false};
  std::vector<Vec3> err;
  std::vector<double> sigma;
};

}  // namespace

Mat3 coarse_attitude_matrix(const CoarseAttitude& a) {
  return axis_rotation(Vec3::UnitY(), -a.heading_deg * kDeg) * axis_rotation(Vec3::UnitZ(), a.pitch_deg * kDeg) *
         axis_rotation(Vec3::UnitX(), a.roll_deg * kDeg);
}

CoarseAttitude parse_coarse_attitude(const std::string& text) {
  const Vec3 v = to_vec3(text, "coarse_att");
  return {v(0), v(1), v(2)};
}

Vec3 euler_from_nav(const NavState& s, const EarthParams& earth) {
  const Mat3 c = c_ne_at(s.r_e, earth).transpose() * s.c_be();
  const double pitch = std::asin(std::clamp(c(1, 0), -1.0, 1.0));
  const double roll = std::atan2(-c(1, 2), c(1, 1));
  const double heading = std::atan2(c(2, 0), c(0, 0));
  return Vec3(roll, pitch, heading) / kDeg;
}

SweepConfig::SweepConfig() {
  for (int d = -180; d <= 180; d += 5) heading_errors_deg.push_back(d);
}

void SweepConfig::validate() const {
  if (heading_errors_deg.empty()) throw ConfigError("heading_errors must not be empty");
  if (filters.empty()) throw ConfigError("filters must not be empty");
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (scenario == Scenario::Static && !(zupt_rate > 0.0)) throw ConfigError("zupt_rate must be positive");
  if (!(final_window >= 0.0)) throw ConfigError("final_window must be >= 0");
  sensor.validate();
  filter.earth.validate();
  filter.mech.validate();
  init_params.validate();
}

double FilterReport::window_fraction(double deg) const {
  if (window_max_yaw.empty()) return 0.0;
  const auto n = std::count_if(window_max_yaw.begin(), window_max_yaw.end(), [&](double y) { return y < deg; });
  return static_cast<double>(n) / window_max_yaw.size();
}

const FilterReport* McReport::find(ErrorModelKind k) const {
  for (const auto& f : filters)
    if (f.kind == k) return &f;
  return nullptr;
}

Vec3 attitude_error_nav(const NavState& est, const NavState& truth, const EarthParams& earth) {
  const Mat3 c_en_t = c_ne_at(truth.r_e, earth);
  const Mat3 est_n = c_en_t.transpose() * est.c_be();
  const Mat3 tru_n = c_en_t.transpose() * truth.c_be();
  const Vec3 phi = rotation_to_vector(est_n * tru_n.transpose()) / kDeg;  // N, U, E
  return {phi(0), phi(2), wrap_deg(phi(1))};
}

double yaw_sigma_deg(const FilterState& fs, const EarthParams& earth) {
  const Mat3 p = fs.P.topLeftCorner<3, 3>();
  const Vec3 up = c_ne_at(fs.nav.r_e, earth).col(1);
  // left errors live in the body frame, the others in the e frame
  const bool left = fs.kind != ErrorModelKind::Traditional && backing_side(fs.kind) == Side::Left;
  const Vec3 a = left ? Vec3(fs.nav.c_be().transpose() * up) : up;
  return std::sqrt(std::max(0.0, a.dot(p * a))) / kDeg;
}

double rmse(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / x.size());
}

NavState perturb_attitude(const NavState& truth, double roll_deg, double pitch_deg, double yaw_deg,
                          const EarthParams& earth) {
  const Mat3 c_ne = c_ne_at(truth.r_e, earth);
  // nav axes N, U, E are the coordinate axes x, y, z
  const Mat3 err = axis_rotation(Vec3::UnitY(), yaw_deg * kDeg) * axis_rotation(Vec3::UnitZ(), pitch_deg * kDeg) *
                   axis_rotation(Vec3::UnitX(), roll_deg * kDeg);
  NavState out = truth;
  const Vec3 v_e = truth.velocity_e(earth.omega_ie);
  out.q_eb = Quaternion::from_matrix(c_ne * err * c_ne.transpose() * truth.c_be());
  out.set_velocity_e(v_e, earth.omega_ie);
  return out;
}

void run_filter(FilterState& fs, const RunInputs& in, const FilterConfig& cfg, const RunObserver& obs) {
  if (in.imu == nullptr) throw std::invalid_argument("run_filter: no IMU samples");
  const auto& imu = *in.imu;
  std::size_t oi = 0;
  double next_zupt = fs.nav.time + in.zupt_period;
  for (std::size_t k = 0; k < imu.size(); ++k) {
    const double dt = imu[k].t - fs.nav.time;
    propagate_inplace(fs, imu[k], dt, cfg);
    const double half = 0.5 * dt;
    bool updated = false;
    if (in.odo != nullptr) {
      const auto& odo = *in.odo;
      while (oi < odo.size() && odo[oi].t < fs.nav.time - half) ++oi;
      if (oi < odo.size() && std::abs(odo[oi].t - fs.nav.time) <= half) {
        odometer_update(fs, odo[oi].pulse_rate, imu[k], cfg);
        ++oi;
        updated = true;
      }
    } else if (in.zupt_period > 0.0 && fs.nav.time >= next_zupt - half) {
      zupt_update(fs, cfg);
      next_zupt += in.zupt_period;
      updated = true;
    }
    if (obs) obs(k, fs, updated);
  }
}

double convergence_time(const std::vector<double>& t, const std::vector<Vec3>& rmse_v, double threshold_deg) {
  if (rmse_v.empty() || rmse_v.back()(2) > threshold_deg) return -1.0;
  std::size_t i = rmse_v.size();
  while (i > 0 && rmse_v[i - 1](2) <= threshold_deg) --i;
  return t[i];
}

McReport run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const EarthParams& earth = cfg.filter.earth;
  const TrajectoryProfile profile =
      cfg.scenario == Scenario::Static ? static_profile(cfg.duration) : canonical_in_motion_profile();
  if (cfg.duration > profile.duration + 1e-9) throw ConfigError("duration exceeds the in-motion profile length");
  const Truth truth = gen_truth(profile, cfg.sensor, earth);
  const double dt = truth.dt;
  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.duration / dt));

  FilterConfig fc = cfg.filter;
  fc.mech.dt = dt;
  const double meas_rate = cfg.scenario == Scenario::Static ? cfg.zupt_rate : cfg.sensor.odo_rate;
  const auto stride = std::max<std::size_t>(1, std::llround(1.0 / (meas_rate * dt)));
  std::vector<std::size_t> epochs{0};  // truth indices of the output epochs
  for (std::size_t k = stride; k <= n_steps; k += stride) epochs.push_back(k);
  std::vector<double> t_out;
  for (auto k : epochs) t_out.push_back(truth.states[k].time);

  std::vector<double> offsets = cfg.heading_errors_deg;
  if (cfg.coarse_att) offsets = {0.0};
  const std::size_t n_jobs = offsets.size() * cfg.trials;
  const std::size_t n_f = cfg.filters.size();
  std::vector<RunTrace> traces(n_jobs * n_f);

  const std::vector<ImuSample> truth_imu(truth.imu.begin(), truth.imu.begin() + n_steps);

  auto work = [&](std::size_t job) {
    const std::size_t hi = job / cfg.trials, trial = job % cfg.trials;
    std::mt19937_64 rng(derive_seed(cfg.seed, hi, trial));
    ImuRealization imu = synth_imu(truth, cfg.sensor, rng);
    imu.samples.resize(n_steps);
    std::vector<OdoSample> odo;
    if (cfg.scenario == Scenario::InMotion) odo = synth_odometer(truth, cfg.sensor, rng);

    NavState init;
    if (cfg.coarse_att) {
      init = truth.states[0];
      const Vec3 v_e = init.velocity_e(earth.omega_ie);
      init.q_eb = Quaternion::from_matrix(c_ne_at(init.r_e, earth) * coarse_attitude_matrix(*cfg.coarse_att));
      init.set_velocity_e(v_e, earth.omega_ie);
    } else {
      init = perturb_attitude(truth.states[0], cfg.roll_pitch_error_deg, cfg.roll_pitch_error_deg, offsets[hi], earth);
    }
    RunInputs in;
    in.imu = &imu.samples;
    if (cfg.scenario == Scenario::InMotion)
      in.odo = &odo;
    else
      in.zupt_period = 1.0 / cfg.zupt_rate;

    for (std::size_t f = 0; f < n_f; ++f) {
      RunTrace& tr = traces[job * n_f + f];
      tr.err.reserve(epochs.size());
      tr.sigma.reserve(epochs.size());
      try {
        FilterState fs = make_filter(cfg.filters[f], init, cfg.init_params, fc);
        tr.err.push_back(attitude_error_nav(fs.nav, truth.states[0], earth));
        tr.sigma.push_back(yaw_sigma_deg(fs, earth));
        std::size_t next = 1;
        run_filter(fs, in, fc, [&](std::size_t k, const FilterState& s, bool) {
          if (next < epochs.size() && k + 1 == epochs[next]) {
            tr.err.push_back(attitude_error_nav(s.nav, truth.states[k + 1], earth));
            tr.sigma.push_back(yaw_sigma_deg(s, earth));
            ++next;
          }
        });
        tr.ok = tr.err.size() == epochs.size() && std::all_of(tr.err.begin(), tr.err.end(), [](const Vec3& e) {
                  return e.allFinite();
                });
      } catch (const std::exception&) {
        tr.ok = false;
      }
    }
  };

  unsigned n_threads = cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, n_jobs);
  std::atomic<std::size_t> next_job{0};
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_threads; ++i)
    pool.emplace_back([&] {
      for (std::size_t j; (j = next_job++) < n_jobs;) work(j);
    });
  for (auto& th : pool) th.join();

  McReport rep;
  const auto window_start = std::lower_bound(t_out.begin(), t_out.end(), t_out.back() - cfg.final_window - 1e-9) -
                            t_out.begin();
  for (std::size_t f = 0; f < n_f; ++f) {
    FilterReport fr;
    fr.kind = cfg.filters[f];
    fr.t = t_out;
    std::vector<const RunTrace*> ok;
    for (std::size_t j = 0; j < n_jobs; ++j) {
      const RunTrace& tr = traces[j * n_f + f];
      if (tr.ok) {
        ok.push_back(&tr);
        fr.run_heading.push_back(offsets[j / cfg.trials]);
      } else {
        ++fr.failed;
      }
    }
    for (std::size_t e = 0; e < epochs.size(); ++e) {
      Vec3 sq = Vec3::Zero();
      double mean_yaw = 0.0, sig = 0.0;
      for (const RunTrace* tr : ok) {
        sq += tr->err[e].cwiseAbs2();
        mean_yaw += tr->err[e](2);
        sig += tr->sigma[e];
      }
      const double n = ok.empty() ? 1.0 : static_cast<double>(ok.size());
      fr.rmse.push_back((sq / n).cwiseSqrt());
      mean_yaw /= n;
      fr.yaw_std.push_back(std::sqrt(std::max(0.0, sq(2) / n - mean_yaw * mean_yaw)));
      fr.yaw_sigma.push_back(sig / n);
    }
    for (const RunTrace* tr : ok) {
      fr.terminal.push_back(tr->err.back());
      double m = 0.0;
      for (std::size_t e = window_start; e < epochs.size(); ++e) m = std::max(m, std::abs(tr->err[e](2)));
      fr.window_max_yaw.push_back(m);
    }
    fr.convergence_time = ok.empty() ? -1.0 : convergence_time(fr.t, fr.rmse);
    rep.filters.push_back(std::move(fr));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// report files

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& p, const std::string& header) {
  std::ifstream is(p);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  std::string line;
  if (!std::getline(is, line) || trim(line) != header) throw CsvError(p.string() + ":1: unexpected header");
  std::vector<std::vector<std::string>> rows;
  for (int n = 2; std::getline(is, line); ++n) {
    if (trim(line).empty()) continue;
    rows.push_back(split(line, ','));
  }
  return rows;
}

double num(const std::string& s) {
  try {
    return to_double(s, "report field");
  } catch (const ConfigError& e) {
    throw CsvError(e.what());
  }
}

}  // namespace

void emit_report(const McReport& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
  const fs::path d(dir);

  auto conv = open_out(d / "convergence.csv");
  conv << "filter,convergence_time_s,runs,failed\n";
  auto cons = open_out(d / "consistency.csv");
  cons << "filter,t,yaw_std_deg,yaw_sigma_deg\n";
  auto term = open_out(d / "terminal.csv");
  term << "filter,heading_error_deg,roll_deg,pitch_deg,yaw_deg,window_max_abs_yaw_deg\n";
  for (const auto& f : r.filters) {
    const std::string name = kind_name(f.kind);
    auto os = open_out(d / ("rmse_" + name + ".csv"));
    os << "t,roll_deg,pitch_deg,yaw_deg\n";
    for (std::size_t i = 0; i < f.t.size(); ++i)
      os << fmt(f.t[i]) << ',' << fmt(f.rmse[i](0)) << ',' << fmt(f.rmse[i](1)) << ',' << fmt(f.rmse[i](2)) << '\n';
    conv << name << ',' << fmt(f.convergence_time) << ',' << f.terminal.size() << ',' << f.failed << '\n';
    for (std::size_t i = 0; i < f.t.size(); ++i)
      cons << name << ',' << fmt(f.t[i]) << ',' << fmt(f.yaw_std[i]) << ',' << fmt(f.yaw_sigma[i]) << '\n';
    for (std::size_t i = 0; i < f.terminal.size(); ++i)
      term << name << ',' << fmt(f.run_heading[i]) << ',' << fmt(f.terminal[i](0)) << ',' << fmt(f.terminal[i](1))
           << ',' << fmt(f.terminal[i](2)) << ',' << fmt(f.window_max_yaw[i]) << '\n';
  }

  auto sum = open_out(d / "summary.txt");
  sum << "schema " << kReportSchema << "\n";
  sum << "filters";
  for (const auto& f : r.filters) sum << ' ' << kind_name(f.kind);
  sum << "\n\nterminal RMSE (deg) and time to 5 deg yaw RMSE (s, -1 = never)\n";
  sum << std::left << std::setw(10) << "filter" << std::right << std::setw(12) << "t_end" << std::setw(12) << "roll"
      << std::setw(12) << "pitch" << std::setw(12) << "yaw" << std::setw(12) << "conv" << std::setw(8) << "runs"
      << std::setw(8) << "failed" << "\n";
  sum << std::fixed;
  for (const auto& f : r.filters) {
    const Vec3 last = f.rmse.empty() ? Vec3::Zero() : f.rmse.back();
    sum << std::left << std::setw(10) << kind_name(f.kind) << std::right << std::setprecision(2) << std::setw(12)
        << (f.t.empty() ? 0.0 : f.t.back()) << std::setprecision(4) << std::setw(12) << last(0) << std::setw(12)
        << last(1) << std::setw(12) << last(2) << std::setprecision(2) << std::setw(12) << f.convergence_time
        << std::setw(8) << f.terminal.size() << std::setw(8) << f.failed << "\n";
  }
}

McReport read_report(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path d(dir);
  std::ifstream s(d / "summary.txt");
  if (!s) throw std::runtime_error("cannot read " + (d / "summary.txt").string());
  std::string line, word;
  std::getline(s, line);
  {
    std::istringstream is(line);
    int v = 0;
    if (!(is >> word >> v) || word != "schema" || v != kReportSchema) throw CsvError("unsupported report schema");
  }
  std::getline(s, line);
  std::istringstream names(line);
  names >> word;
  McReport r;
  while (names >> word) {
    FilterReport f;
    f.kind = parse_kind(word);
    for (const auto& row : read_rows(d / ("rmse_" + word + ".csv"), "t,roll_deg,pitch_deg,yaw_deg")) {
      if (row.size() != 4) throw CsvError("rmse row width");
      f.t.push_back(num(row[0]));
      f.rmse.emplace_back(num(row[1]), num(row[2]), num(row[3]));
    }
    r.filters.push_back(std::move(f));
  }
  auto by_name = [&](const std::string& n) -> FilterReport& {
    const ErrorModelKind k = parse_kind(n);
    for (auto& f : r.filters)
      if (f.kind == k) return f;
    throw CsvError("filter " + n + " not listed in summary");
  };
  for (const auto& row : read_rows(d / "convergence.csv", "filter,convergence_time_s,runs,failed")) {
    if (row.size() != 4) throw CsvError("convergence row width");
    auto& f = by_name(row[0]);
    f.convergence_time = num(row[1]);
    f.failed = static_cast<int>(num(row[3]));
  }
  for (const auto& row : read_rows(d / "consistency.csv", "filter,t,yaw_std_deg,yaw_sigma_deg")) {
    if (row.size() != 4) throw CsvError("consistency row width");
    auto& f = by_name(row[0]);
    f.yaw_std.push_back(num(row[2]));
    f.yaw_sigma.push_back(num(row[3]));
  }
  for (const auto& row : read_rows(d / "terminal.csv",
                                   "filter,heading_error_deg,roll_deg,pitch_deg,yaw_deg,window_max_abs_yaw_deg")) {
    if (row.size() != 6) throw CsvError("terminal row width");
    auto& f = by_name(row[0]);
    f.run_heading.push_back(num(row[1]));
    f.terminal.emplace_back(num(row[2]), num(row[3]), num(row[4]));
    f.window_max_yaw.push_back(num(row[5]));
  }
  return r;
}

// ---------------------------------------------------------------------------
// replay

std::vector<ReplayRow> replay(const std::vector<ImuSample>& imu, const std::vector<OdoSample>* odo,
                              const ReplayConfig& cfg) {
  if (imu.empty()) throw CsvError("replay: empty IMU log");
  if (cfg.record_every < 1) throw ConfigError("record_every must be >= 1");
  FilterState fs = make_filter(cfg.kind, cfg.initial, cfg.init_params, cfg.filter);
  RunInputs in;
  in.imu = &imu;
  in.odo = odo;
  in.zupt_period = odo ? 0.0 : cfg.zupt_period;
  const EarthParams& earth = cfg.filter.earth;
  std::vector<ReplayRow> rows;
  run_filter(fs, in, cfg.filter, [&](std::size_t k, const FilterState& s, bool) {
    if ((k + 1) % cfg.record_every != 0 && k + 1 != imu.size()) return;
    ReplayRow row;
    row.t = s.nav.time;
    row.nav = s.nav;
    row.att_deg = euler_from_nav(s.nav, earth);
    row.bg = s.bg;
    row.ba = s.ba;
    row.params = s.params;
    row.sigma = s.P.diagonal().cwiseMax(0.0).cwiseSqrt();
    // attitude sigma about the nav axes (roll N, pitch E, heading U)
    const Mat3 c_ne = c_ne_at(s.nav.r_e, earth);
    const bool left = s.kind != ErrorModelKind::Traditional && backing_side(s.kind) == Side::Left;
    const Mat3 a = left ? Mat3(c_ne.transpose() * s.nav.c_be()) : c_ne.transpose();
    const Mat3 pn = a * s.P.topLeftCorner<3, 3>() * a.transpose();
    row.att_sigma_deg = Vec3(pn(0, 0), pn(2, 2), pn(1, 1)).cwiseMax(0.0).cwiseSqrt() / kDeg;
    rows.push_back(row);
  });
  return rows;
}

std::vector<ReplayRow> replay(const std::string& imu_path, const std::string& odo_path, const ReplayConfig& cfg) {
  const auto imu = read_imu_csv(imu_path);
  if (odo_path.empty()) return replay(imu, nullptr, cfg);
  const auto odo = read_odo_csv(odo_path);
  return replay(imu, &odo, cfg);
}

void write_replay_csv(const std::string& path, const std::vector<ReplayRow>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "t,roll_deg,pitch_deg,heading_deg,roll_3s,pitch_3s,heading_3s,"
        "bgx,bgy,bgz,bax,bay,baz,psi_deg,theta_deg,lx,ly,lz,K,"
        "bg_3s,ba_3s,psi_3s_deg,theta_3s_deg,lx_3s,ly_3s,lz_3s,K_3s\n";
  for (const auto& r : rows) {
    using namespace es;
    const auto& s = r.sigma;
    os << fmt(r.t);
    for (int i = 0; i < 3; ++i) os << ',' << fmt(r.att_deg(i));
    for (int i = 0; i < 3; ++i) os << ',' << fmt(3.0 * r.att_sigma_deg(i));
    for (int i = 0; i < 3; ++i) os << ',' << fmt(r.bg(i));
    for (int i = 0; i < 3; ++i) os << ',' << fmt(r.ba(i));
    os << ',' << fmt(r.params.psi / kDeg) << ',' << fmt(r.params.theta / kDeg);
    for (int i = 0; i < 3; ++i) os << ',' << fmt(r.params.lever(i));
    os << ',' << fmt(r.params.K);
    os << ',' << fmt(3.0 * s.segment<3>(BG).norm()) << ',' << fmt(3.0 * s.segment<3>(BA).norm()) << ','
       << fmt(3.0 * s(PSI) / kDeg) << ',' << fmt(3.0 * s(THETA) / kDeg);
    for (int i = 0; i < 3; ++i) os << ',' << fmt(3.0 * s(LEVER + i));
    os << ',' << fmt(3.0 * s(K)) << '\n';
  }
}

// ---------------------------------------------------------------------------
// configuration

IniData parse_ini(std::istream& in) {
  IniData out;
  std::string section, line;
  for (int n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(n) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      out[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(n) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(n) + ": empty key");
    out[section][key] = trim(line.substr(eq + 1));
  }
  return out;
}

IniData read_ini(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  return parse_ini(is);
}

void apply_config(const IniData& ini, SweepConfig& sw, ReplayConfig* rp) {
  // attitude and velocity are resolved at the initial position, whatever the key order
  std::optional<std::string> attitude, velocity;
  for (const auto& [sec, kv] : ini) {
    for (const auto& [key, val] : kv) {
      const std::string what = sec + "." + key;
      auto d = [&] { return to_double(val, what); };
      if (sec == "sweep") {
        if (key == "heading_errors") sw.heading_errors_deg = to_list(val, what);
        else if (key == "roll_pitch_error") sw.roll_pitch_error_deg = d();
        else if (key == "trials") sw.trials = static_cast<int>(to_long(val, what));
        else if (key == "scenario") {
          if (val == "static") sw.scenario = Scenario::Static;
          else if (val == "in-motion") sw.scenario = Scenario::InMotion;
          else throw ConfigError("scenario must be static or in-motion");
        } else if (key == "filters") {
          sw.filters.clear();
          for (const auto& f : split(val, ',')) sw.filters.push_back(parse_kind(f));
        } else if (key == "duration") sw.duration = d();
        else if (key == "seed") sw.seed = static_cast<std::uint64_t>(to_long(val, what));
        else if (key == "threads") sw.threads = static_cast<int>(to_long(val, what));
        else if (key == "zupt_rate") sw.zupt_rate = d();
        else if (key == "final_window") sw.final_window = d();
        else if (key == "coarse_att") sw.coarse_att = parse_coarse_attitude(val);
        else throw ConfigError("unknown key " + what);
      } else if (sec == "sensor") {
        auto& s = sw.sensor;
        if (key == "gyro_bias_dph") s.gyro_bias = d() * kDegPerHour;
        else if (key == "gyro_arw_dprh") s.gyro_arw = d() * kDegPerRootHour;
        else if (key == "accel_bias_ug") s.accel_bias = d() * kMicroG;
        else if (key == "accel_vrw_ugprhz") s.accel_vrw = d() * kMicroG;
        else if (key == "gyro_bias_rw") s.gyro_bias_rw = d();
        else if (key == "accel_bias_rw") s.accel_bias_rw = d();
        else if (key == "odo_K") s.odo_K = d();
        else if (key == "mount_psi_deg") s.mount_psi = d() * kDeg;
        else if (key == "mount_theta_deg") s.mount_theta = d() * kDeg;
        else if (key == "lever") s.lever = to_vec3(val, what);
        else if (key == "imu_rate") s.imu_rate = d();
        else if (key == "odo_rate") s.odo_rate = d();
        else if (key == "odo_noise") s.odo_noise = d();
        else if (key == "odo_quantize") s.odo_quantize = to_bool(val, what);
        else throw ConfigError("unknown key " + what);
      } else if (sec == "filter") {
        auto& f = sw.filter;
        if (key == "gyro_arw_dprh") f.noise.gyro_arw = d() * kDegPerRootHour;
        else if (key == "accel_vrw_ugprhz") f.noise.accel_vrw = d() * kMicroG;
        else if (key == "gyro_bias_rw") f.noise.gyro_bias_rw = d();
        else if (key == "accel_bias_rw") f.noise.accel_bias_rw = d();
        else if (key == "two_sample") f.mech.integrator = to_bool(val, what) ? Integrator::TwoSample : Integrator::SingleSample;
        else if (key == "zupt_sigma") f.zupt_sigma = d();
        else if (key == "odo_sigma") f.odo_sigma = to_vec3(val, what);
        else if (key == "gate_sigma") f.gate_sigma = d();
        else throw ConfigError("unknown key " + what);
      } else if (sec == "init") {
        auto& i = sw.filter.init;
        if (key == "att_deg") i.att_deg = d();
        else if (key == "vel") i.vel = d();
        else if (key == "pos") i.pos = d();
        else if (key == "gyro_bias_dph") i.gyro_bias = d() * kDegPerHour;
        else if (key == "accel_bias_ug") i.accel_bias = d() * kMicroG;
        else if (key == "psi_deg") i.psi_deg = d();
        else if (key == "theta_deg") i.theta_deg = d();
        else if (key == "lever") i.lever = d();
        else if (key == "k_frac") i.k_frac = d();
        else if (key == "K") sw.init_params.K = d();
        else if (key == "mount_psi_deg") sw.init_params.psi = d() * kDeg;
        else if (key == "mount_theta_deg") sw.init_params.theta = d() * kDeg;
        else if (key == "lever_arm") sw.init_params.lever = to_vec3(val, what);
        else throw ConfigError("unknown key " + what);
      } else if (sec == "replay") {
        if (rp == nullptr) throw ConfigError("[replay] section not valid here");
        if (key == "filter") rp->kind = parse_kind(val);
        else if (key == "zupt_period") rp->zupt_period = d();
        else if (key == "record_every") rp->record_every = static_cast<int>(to_long(val, what));
        else if (key == "start_time") rp->initial.time = d();
        else if (key == "lla_deg_m") {
          const Vec3 v = to_vec3(val, what);
          rp->initial.r_e = lla_to_ecef({v(0) * kDeg, v(1) * kDeg, v(2)}, sw.filter.earth);
        } else if (key == "attitude") attitude = val;
        else if (key == "velocity_nue") velocity = val;
        else throw ConfigError("unknown key " + what);
      } else {
        throw ConfigError("unknown section [" + sec + "]");
      }
    }
  }
  if (rp != nullptr) {
    const Mat3 c_ne = attitude || velocity ? c_ne_at(rp->initial.r_e, sw.filter.earth) : Mat3::Identity();
    if (attitude) rp->initial.q_eb = Quaternion::from_matrix(c_ne * coarse_attitude_matrix(parse_coarse_attitude(*attitude)));
    if (velocity) rp->initial.set_velocity_e(c_ne * to_vec3(*velocity, "replay.velocity_nue"), sw.filter.earth.omega_ie);
    rp->filter = sw.filter;
    rp->init_params = sw.init_params;
  }
}

void dump_defaults(std::ostream& os, const SweepConfig& sw, const ReplayConfig& rp) {
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
  };
  auto v3 = [](const Vec3& v) { return fmt(v(0)) + "," + fmt(v(1)) + "," + fmt(v(2)); };
  const auto& s = sw.sensor;
  const auto& f = sw.filter;
  os << "[sweep]\n";
  os << "heading_errors = " << list(sw.heading_errors_deg) << "  # deg, list or start:step:stop\n";
  os << "roll_pitch_error = " << fmt(sw.roll_pitch_error_deg) << "  # deg\n";
  os << "trials = " << sw.trials << "\n";
  os << "scenario = " << (sw.scenario == Scenario::Static ? "static" : "in-motion") << "\n";
  os << "filters = ";
  for (std::size_t i = 0; i < sw.filters.size(); ++i) os << (i ? "," : "") << kind_name(sw.filters[i]);
  os << "\nduration = " << fmt(sw.duration) << "  # s\n";
  os << "seed = " << sw.seed << "\n";
  os << "threads = " << sw.threads << "  # 0 = all cores\n";
  os << "zupt_rate = " << fmt(sw.zupt_rate) << "  # Hz\n";
  os << "final_window = " << fmt(sw.final_window) << "  # s\n";
  os << "# coarse_att = roll,pitch,heading  # deg, in-motion assist\n";
  os << "\n[sensor]\n";
  os << "gyro_bias_dph = " << fmt(s.gyro_bias / kDegPerHour) << "\n";
  os << "gyro_arw_dprh = " << fmt(s.gyro_arw / kDegPerRootHour) << "\n";
  os << "accel_bias_ug = " << fmt(s.accel_bias / kMicroG) << "\n";
  os << "accel_vrw_ugprhz = " << fmt(s.accel_vrw / kMicroG) << "\n";
  os << "gyro_bias_rw = " << fmt(s.gyro_bias_rw) << "  # rad/s/sqrt(s)\n";
  os << "accel_bias_rw = " << fmt(s.accel_bias_rw) << "  # m/s^2/sqrt(s)\n";
  os << "odo_K = " << fmt(s.odo_K) << "  # pulses/m\n";
  os << "mount_psi_deg = " << fmt(s.mount_psi / kDeg) << "\n";
  os << "mount_theta_deg = " << fmt(s.mount_theta / kDeg) << "\n";
  os << "lever = " << v3(s.lever) << "  # m\n";
  os << "imu_rate = " << fmt(s.imu_rate) << "  # Hz\n";
  os << "odo_rate = " << fmt(s.odo_rate) << "  # Hz\n";
  os << "odo_noise = " << fmt(s.odo_noise) << "  # pulses/s\n";
  os << "odo_quantize = " << (s.odo_quantize ? "true" : "false") << "\n";
  os << "\n[filter]\n";
  os << "gyro_arw_dprh = " << fmt(f.noise.gyro_arw / kDegPerRootHour) << "\n";
  os << "accel_vrw_ugprhz = " << fmt(f.noise.accel_vrw / kMicroG) << "\n";
  os << "gyro_bias_rw = " << fmt(f.noise.gyro_bias_rw) << "\n";
  os << "accel_bias_rw = " << fmt(f.noise.accel_bias_rw) << "\n";
  os << "two_sample = " << (f.mech.integrator == Integrator::TwoSample ? "true" : "false") << "\n";
  os << "zupt_sigma = " << fmt(f.zupt_sigma) << "  # m/s\n";
  os << "odo_sigma = " << v3(f.odo_sigma) << "  # pulses/s, m/s, m/s\n";
  os << "gate_sigma = " << fmt(f.gate_sigma) << "  # 0 disables\n";
  os << "\n[init]\n";
  os << "att_deg = " << fmt(f.init.att_deg) << "\n";
  os << "vel = " << fmt(f.init.vel) << "\n";
  os << "pos = " << fmt(f.init.pos) << "\n";
  os << "gyro_bias_dph = " << fmt(f.init.gyro_bias / kDegPerHour) << "\n";
  os << "accel_bias_ug = " << fmt(f.init.accel_bias / kMicroG) << "\n";
  os << "psi_deg = " << fmt(f.init.psi_deg) << "\n";
  os << "theta_deg = " << fmt(f.init.theta_deg) << "\n";
  os << "lever = " << fmt(f.init.lever) << "  # m, per axis\n";
  os << "k_frac = " << fmt(f.init.k_frac) << "\n";
  os << "K = " << fmt(sw.init_params.K) << "\n";
  os << "mount_psi_deg = " << fmt(sw.init_params.psi / kDeg) << "\n";
  os << "mount_theta_deg = " << fmt(sw.init_params.theta / kDeg) << "\n";
  os << "lever_arm = " << v3(sw.init_params.lever) << "\n";
  os << "\n[replay]\n";
  os << "filter = " << kind_name(rp.kind) << "\n";
  os << "zupt_period = " << fmt(rp.zupt_period) << "  # s, used without an odometer log\n";
  os << "record_every = " << rp.record_every << "\n";
  os << "start_time = " << fmt(rp.initial.time) << "\n";
  os << "# lla_deg_m = lat,lon,height\n";
  os << "# attitude = roll,pitch,heading  # deg\n";
  os << "# velocity_nue = vn,vu,ve\n";
}

}  // namespace tqnav
