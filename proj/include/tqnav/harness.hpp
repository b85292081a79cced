#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tqnav/ekf.hpp"
#include "tqnav/sim.hpp"

namespace tqnav {

/// Initial attitude as (roll, pitch, heading) in degrees for the forward-up-right
/// vehicle axes: C_b^n = R_U(-heading) R_E(pitch) R_N(roll).
struct CoarseAttitude {
  double roll_deg{0.0};
  double pitch_deg{0.0};
  double heading_deg{0.0};
};
Mat3 coarse_attitude_matrix(const CoarseAttitude& a);
CoarseAttitude parse_coarse_attitude(const std::string& text);  // "roll,pitch,heading"

struct SweepConfig {
  std::vector<double> heading_errors_deg;  // default -180:5:180
  double roll_pitch_error_deg{5.0};
  int trials{1};
  Scenario scenario{Scenario::Static};
  std::vector<ErrorModelKind> filters{ErrorModelKind::LeftTrident, ErrorModelKind::RightTrident,
                                      ErrorModelKind::Traditional};
  double duration{150.0};
  std::uint64_t seed{1};
  int threads{0};               // 0 = hardware concurrency
  double zupt_rate{1.0};        // Hz, static scenario
  double final_window{20.0};    // s, terminal yaw distribution window
  std::optional<CoarseAttitude> coarse_att{};  // in-motion assist, replaces the offset sweep
  SensorSpec sensor{};
  FilterConfig filter{};
  OdoParams init_params{61.0, 0.0, 0.0, Vec3::Zero()};  // filter's initial odometer parameters

  SweepConfig();
  void validate() const;
};

/// Per-filter aggregate over all successful runs.
struct FilterReport {
  ErrorModelKind kind{ErrorModelKind::LeftTrident};
  std::vector<double> t;
  std::vector<Vec3> rmse;             // roll, pitch, yaw (deg)
  std::vector<double> yaw_std;        // spread of the yaw error across runs (deg)
  std::vector<double> yaw_sigma;      // mean filter-reported one-sigma yaw (deg)
  double convergence_time{-1.0};      // first epoch after which yaw RMSE stays <= 5 deg, -1 if never
  std::vector<double> run_heading;    // heading offset of each successful run (deg)
  std::vector<Vec3> terminal;         // per run, error at the last epoch (deg)
  std::vector<double> window_max_yaw; // per run, max |yaw| over the final window (deg)
  int failed{0};

  /// Fraction of runs whose |yaw| stayed below `deg` over the final window.
  double window_fraction(double deg) const;
};

struct McReport {
  std::vector<FilterReport> filters;
  const FilterReport* find(ErrorModelKind k) const;
};

/// Roll, pitch, yaw (deg) of the nav-frame error rotation C_b^n(est) C_b^n(truth)^T,
/// taken as its rotation vector about N, E, U; yaw wrapped to (-180, 180].
Vec3 attitude_error_nav(const NavState& est, const NavState& truth, const EarthParams& earth = {});

/// Filter-reported one-sigma of the yaw error (deg).
double yaw_sigma_deg(const FilterState& fs, const EarthParams& earth = {});

/// RMSE convention used everywhere: sqrt(mean of squares); empty input gives 0.
double rmse(const std::vector<double>& x);

/// Initial estimate with the nav-frame error R_U(yaw) R_E(pitch) R_N(roll) applied to the truth.
NavState perturb_attitude(const NavState& truth, double roll_deg, double pitch_deg, double yaw_deg,
                          const EarthParams& earth = {});

/// Measurement schedule for one filter run.
struct RunInputs {
  const std::vector<ImuSample>* imu{nullptr};
  const std::vector<OdoSample>* odo{nullptr};  // in-motion aiding, null for ZUPT runs
  double zupt_period{0.0};                     // s, >0 enables zero-velocity updates
};

/// Callback after each IMU step: (sample index, filter state after any update, updated?).
using RunObserver = std::function<void(std::size_t, const FilterState&, bool)>;

/// Drives one filter through the samples; measurements are applied at the IMU epoch they fall on.
void run_filter(FilterState& fs, const RunInputs& in, const FilterConfig& cfg, const RunObserver& obs);

McReport run_sweep(const SweepConfig& cfg);

/// Convergence rule shared by the sweep and the report reader.
double convergence_time(const std::vector<double>& t, const std::vector<Vec3>& rmse, double threshold_deg = 5.0);

// Report files: rmse_<filter>.csv, convergence.csv, consistency.csv, terminal.csv, summary.txt.
inline constexpr int kReportSchema = 1;
void emit_report(const McReport& r, const std::string& dir);
McReport read_report(const std::string& dir);

struct ReplayConfig {
  ErrorModelKind kind{ErrorModelKind::RightTrident};
  NavState initial{};   // time = epoch preceding the first IMU sample
  OdoParams init_params{61.0, 0.0, 0.0, Vec3::Zero()};
  FilterConfig filter{};
  double zupt_period{0.0};  // used when no odometer log is given
  int record_every{1};      // IMU samples between output rows
};

struct ReplayRow {
  double t{0.0};
  Vec3 att_deg{Vec3::Zero()};   // roll, pitch, heading of the estimate
  Vec3 att_sigma_deg{Vec3::Zero()};
  Vec3 bg{Vec3::Zero()}, ba{Vec3::Zero()};
  OdoParams params{};
  Eigen::Matrix<double, 21, 1> sigma{Eigen::Matrix<double, 21, 1>::Zero()};  // filter coordinates
  NavState nav{};
};

std::vector<ReplayRow> replay(const std::vector<ImuSample>& imu, const std::vector<OdoSample>* odo,
                              const ReplayConfig& cfg);
std::vector<ReplayRow> replay(const std::string& imu_path, const std::string& odo_path, const ReplayConfig& cfg);
void write_replay_csv(const std::string& path, const std::vector<ReplayRow>& rows);

/// Roll, pitch, heading (deg) of C_b^n for the forward-up-right axes; inverse of coarse_attitude_matrix.
Vec3 euler_from_nav(const NavState& s, const EarthParams& earth = {});

// Key-value configuration with [section] headers and '#' comments.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
using IniData = std::map<std::string, std::map<std::string, std::string>>;
IniData parse_ini(std::istream& in);
IniData read_ini(const std::string& path);
/// Applies recognised keys; unknown keys raise ConfigError.
void apply_config(const IniData& ini, SweepConfig& sweep, ReplayConfig* replay = nullptr);
void dump_defaults(std::ostream& os, const SweepConfig& sweep, const ReplayConfig& replay);

}  // namespace tqnav
