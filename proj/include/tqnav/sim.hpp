#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "tqnav/meas.hpp"

namespace tqnav {

enum class Scenario { Static, InMotion };

/// One piece of the speed/heading schedule.
struct Segment {
  enum class Type { Hold, Accelerate, Turn, Vary };
  Type type{Type::Hold};
  double duration{0.0};  // s
  double speed{0.0};     // Accelerate: target speed; Vary: amplitude (m/s)
  double angle{0.0};     // Turn: heading change (rad, positive towards east of north)
  double ramp{0.0};      // Turn: raised-cosine ramp length (s)
  double period{0.0};    // Vary: period (s)
};

struct TrajectoryProfile {
  Scenario kind{Scenario::Static};
  double duration{150.0};
  GeoPosition start{};
  double heading{0.0};                 // rad, initial yaw of the vehicle frame
  std::vector<Segment> segments;       // must tile `duration`
  // terrain undulation tied to travelled distance
  double terrain_pitch{0.0};           // rad amplitude
  double terrain_pitch_wavelength{45.0};  // m
  double terrain_roll{0.0};
  double terrain_roll_wavelength{55.0};

  void validate() const;
};

/// 600 s drive: static, accelerate, cruise, two opposite 90 deg turns, varying speed.
TrajectoryProfile canonical_in_motion_profile();
TrajectoryProfile static_profile(double duration);

struct SensorSpec {
  double gyro_bias{2.42406840554768e-8};    // rad/s, one-sigma of the per-run constant bias
  double gyro_arw{2.9088820866572158e-7};   // rad/sqrt(s)
  double accel_bias{2.941995e-4};           // m/s^2
  double accel_vrw{4.903325e-5};            // m/s^2/sqrt(Hz)
  double gyro_bias_rw{0.0};
  double accel_bias_rw{0.0};
  double odo_K{59.8};                       // pulses/m
  double mount_psi{3.0 * M_PI / 180.0};
  double mount_theta{2.0 * M_PI / 180.0};
  Vec3 lever{1.0, 0.5, 0.8};
  double imu_rate{100.0};                   // Hz
  double odo_rate{1.0};                     // Hz
  double odo_noise{1.0};                    // pulses/s one-sigma
  bool odo_quantize{false};
  std::uint64_t seed{1};

  void validate() const;
  OdoParams odo_params() const { return {odo_K, mount_psi, mount_theta, lever}; }
};

/// Ground truth at the IMU epochs plus the error-free inertial samples between them.
struct Truth {
  double dt{0.01};
  std::vector<NavState> states;      // states[k] at t = k dt
  std::vector<ImuSample> imu;        // imu[k] covers (t_k, t_{k+1}]
  std::vector<double> speed;         // wheel-point forward speed at t_k
  std::vector<Vec3> omega_eb;        // body rate w.r.t. the earth at t_k
  std::vector<Mat3> c_mn;            // vehicle-frame attitude at t_k
};

Truth gen_truth(const TrajectoryProfile& profile, const SensorSpec& spec, const EarthParams& earth = {});

struct ImuRealization {
  std::vector<ImuSample> samples;
  Vec3 bg{Vec3::Zero()};
  Vec3 ba{Vec3::Zero()};
};

ImuRealization synth_imu(const Truth& truth, const SensorSpec& spec, std::mt19937_64& rng);
ImuRealization synth_imu(const Truth& truth, const SensorSpec& spec);  // seeded from spec.seed

/// Pulse-rate samples at the odometer rate, aligned with IMU epochs.
std::vector<OdoSample> synth_odometer(const Truth& truth, const SensorSpec& spec, std::mt19937_64& rng);
std::vector<OdoSample> synth_odometer(const Truth& truth, const SensorSpec& spec);

/// Deterministic per-run seed from (seed, heading index, trial).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t heading_index, std::uint64_t trial);

// CSV streams: header line, then one row per sample.
void write_imu_csv(const std::string& path, const std::vector<ImuSample>& s);
std::vector<ImuSample> read_imu_csv(const std::string& path);
void write_odo_csv(const std::string& path, const std::vector<OdoSample>& s);
std::vector<OdoSample> read_odo_csv(const std::string& path);
void write_truth_csv(const std::string& path, const std::vector<NavState>& s);
std::vector<NavState> read_truth_csv(const std::string& path);

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tqnav
