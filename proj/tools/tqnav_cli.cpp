// Command-line front end: simulation, alignment sweeps, log replay and report printing.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tqnav/harness.hpp"

using namespace tqnav;

namespace {

std::vector<ErrorModelKind> parse_filters(const std::string& text) {
  std::vector<ErrorModelKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(parse_kind(item));
  }
  if (out.empty()) throw ConfigError("--filters: empty list");
  return out;
}

void print_summary(const std::string& dir) {
  std::ifstream is(std::filesystem::path(dir) / "summary.txt");
  std::cout << is.rdbuf();
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string filters;
  std::string out{"out"};
};

void load(const Common& c, SweepConfig& sw, ReplayConfig* rp) {
  if (!c.config.empty()) apply_config(read_ini(c.config), sw, rp);
  if (c.seed) sw.sensor.seed = sw.seed = *c.seed;
  if (!c.filters.empty()) sw.filters = parse_filters(c.filters);
}

int run_alignment(const Common& c, Scenario scenario, const std::string& coarse, const std::string& headings,
                  std::optional<double> duration) {
  SweepConfig sw;
  sw.scenario = scenario;
  if (scenario == Scenario::InMotion) sw.duration = 600.0;
  load(c, sw, nullptr);
  sw.scenario = scenario;
  if (duration) sw.duration = *duration;
  if (!headings.empty()) {
    IniData ini;
    ini["sweep"]["heading_errors"] = headings;
    apply_config(ini, sw);
  }
  if (!coarse.empty()) sw.coarse_att = parse_coarse_attitude(coarse);
  sw.validate();
  const McReport r = run_sweep(sw);
  emit_report(r, c.out);
  print_summary(c.out);
  for (const auto& f : r.filters)
    if (f.failed > 0) std::cerr << "tqnav: " << kind_name(f.kind) << ": " << f.failed << " runs failed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trident-quaternion inertial alignment and calibration"};
  app.require_subcommand(0, 1);
  bool dump = false;
  std::string top_config;
  app.add_flag("--dump-defaults", dump, "Print every configuration default and exit");
  app.add_option("--config", top_config, "Key-value configuration file")->check(CLI::ExistingFile);

  Common sim_c, st_c, mo_c, rp_c;
  auto add_common = [](CLI::App* sub, Common& c, bool filters) {
    sub->add_option("--config", c.config, "Key-value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", c.seed, "Master random seed");
    if (filters) sub->add_option("--filters", c.filters, "Comma list of LQEKF, RQEKF, RC-LQEKF, RC-RQEKF, EKF");
    sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  };

  auto* sim = app.add_subcommand("simulate", "Write truth, IMU and odometer CSVs for a scenario");
  add_common(sim, sim_c, false);
  std::string scenario = "in-motion";
  std::optional<double> sim_duration;
  sim->add_option("--scenario", scenario, "static or in-motion")
      ->check(CLI::IsMember({"static", "in-motion"}))
      ->capture_default_str();
  sim->add_option("--duration", sim_duration, "Static scenario length (s)");

  auto* st = app.add_subcommand("align-static", "Static alignment sweep over heading offsets");
  add_common(st, st_c, true);
  std::string st_headings, mo_headings, coarse;
  std::optional<double> st_duration, mo_duration;
  st->add_option("--headings", st_headings, "Heading offsets (deg), list or start:step:stop");
  st->add_option("--duration", st_duration, "Run length (s)");

  auto* mo = app.add_subcommand("align-motion", "In-motion alignment sweep on the canonical drive");
  add_common(mo, mo_c, true);
  mo->add_option("--headings", mo_headings, "Heading offsets (deg), list or start:step:stop");
  mo->add_option("--duration", mo_duration, "Run length (s)");
  mo->add_option("--coarse-att", coarse, "Initial roll,pitch,heading (deg) from an external coarse aligner");

  auto* rp = app.add_subcommand("replay", "Run one filter over recorded IMU and odometer logs");
  add_common(rp, rp_c, false);
  std::string imu_path, odo_path, truth_path, rp_filter, rp_coarse;
  rp->add_option("--imu", imu_path, "IMU CSV (t,gx,gy,gz,ax,ay,az)")->required()->check(CLI::ExistingFile);
  rp->add_option("--odo", odo_path, "Odometer CSV (t,pulse_rate); without it ZUPTs are used")
      ->check(CLI::ExistingFile);
  rp->add_option("--truth", truth_path, "Truth CSV whose first row gives the initial position and velocity")
      ->check(CLI::ExistingFile);
  rp->add_option("--filter", rp_filter, "Filter to run (default from config, RQEKF)");
  rp->add_option("--coarse-att", rp_coarse, "Initial roll,pitch,heading (deg)");

  auto* rep = app.add_subcommand("report", "Read a report directory and print its summary");
  std::string rep_dir;
  rep->add_option("dir", rep_dir, "Report directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (dump) {
      SweepConfig sw;
      ReplayConfig rc;
      if (!top_config.empty()) apply_config(read_ini(top_config), sw, &rc);
      dump_defaults(std::cout, sw, rc);
      return 0;
    }
    for (Common* c : {&sim_c, &st_c, &mo_c, &rp_c})
      if (c->config.empty()) c->config = top_config;

    if (*sim) {
      SweepConfig sw;
      load(sim_c, sw, nullptr);
      sw.sensor.validate();
      TrajectoryProfile prof =
          scenario == "static" ? static_profile(sim_duration.value_or(sw.duration)) : canonical_in_motion_profile();
      const Truth truth = gen_truth(prof, sw.sensor, sw.filter.earth);
      std::filesystem::create_directories(sim_c.out);
      const std::filesystem::path d(sim_c.out);
      std::mt19937_64 rng(derive_seed(sw.sensor.seed, 0, 0));
      const ImuRealization imu = synth_imu(truth, sw.sensor, rng);
      write_truth_csv((d / "truth.csv").string(), truth.states);
      write_imu_csv((d / "imu.csv").string(), imu.samples);
      if (prof.kind == Scenario::InMotion) write_odo_csv((d / "odo.csv").string(), synth_odometer(truth, sw.sensor, rng));
      std::cout << "wrote " << truth.imu.size() << " IMU samples to " << sim_c.out << "\n";
    } else if (*st) {
      return run_alignment(st_c, Scenario::Static, "", st_headings, st_duration);
    } else if (*mo) {
      return run_alignment(mo_c, Scenario::InMotion, coarse, mo_headings, mo_duration);
    } else if (*rp) {
      SweepConfig sw;
      ReplayConfig rc;
      load(rp_c, sw, &rc);
      if (!truth_path.empty()) rc.initial = read_truth_csv(truth_path).front();
      if (!rp_filter.empty()) rc.kind = parse_kind(rp_filter);
      if (!rp_coarse.empty()) {
        const Mat3 c_ne = c_en(ecef_to_lla(rc.initial.r_e, rc.filter.earth));
        rc.initial.q_eb = Quaternion::from_matrix(c_ne * coarse_attitude_matrix(parse_coarse_attitude(rp_coarse)));
      }
      const auto rows = replay(imu_path, odo_path, rc);
      std::filesystem::create_directories(rp_c.out);
      const std::string path = (std::filesystem::path(rp_c.out) / "replay.csv").string();
      write_replay_csv(path, rows);
      std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
    } else if (*rep) {
      const McReport r = read_report(rep_dir);
      print_summary(rep_dir);
      for (const auto& f : r.filters)
        std::cout << kind_name(f.kind) << ": " << f.terminal.size() << " runs, |yaw| < 10 deg over final window "
                  << f.window_fraction(10.0) << "\n";
    } else {
      std::cout << app.help();
    }
  } catch (const std::exception& e) {
    std::cerr << "tqnav: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
