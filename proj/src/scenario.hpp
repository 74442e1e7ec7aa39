#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace irsee {

// powers live in watts everywhere inside the library; dBm appears only at the
// config boundary
double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

struct SystemConfig {
  int n_antennas = 4;      // N
  int n_irs_elements = 8;  // M
  int n_eves = 2;          // K
  double bandwidth = 1.0;
  double noise_power = dbm_to_watt(-105.0);
  double zeta = 1.0;  // amplifier inefficiency multiplying transmit power
  double p1_max = dbm_to_watt(30.0);
  double p2_max = dbm_to_watt(30.0);
  double p_bs = dbm_to_watt(23.0);
  double p_g = dbm_to_watt(23.0);
  double p_irs = dbm_to_watt(20.0);
  double r_th = 0.5;                 // secrecy-rate floor, bits/s/Hz
  double a0 = 1.0 / dbm_to_watt(-105.0);  // stored reciprocal noise, kept in sync

  void sync_a0() { a0 = 1.0 / noise_power; }
};

struct Geometry {
  Eigen::Vector3d base_station{5.0, 0.0, 20.0};
  Eigen::Vector3d jammer{5.0, 0.0, 15.0};
  Eigen::Vector3d irs{0.0, 100.0, 2.0};
  Eigen::Vector3d user{3.0, 100.0, 0.0};
  std::vector<Eigen::Vector3d> eves;
};

struct PathLossModel {
  double g0 = 1e-3;  // linear gain at the reference distance (-30 dB)
  double c_bu = 5.0;
  double c_be = 5.0;
  double c_bi = 3.5;
  double c_ji = 3.5;
  double c_ju = 2.0;
  double c_je = 3.0;
  double c_iu = 2.0;
  double c_ie = 3.0;
};

struct UncertaintyConfig {
  std::vector<double> xi_ie;  // per-eve radius on the IRS-eve channel
  std::vector<double> xi_je;  // per-eve radius on the jammer-IRS-eve channel
};

struct SolverOptions {
  double outer_tol = 1e-7;  // absolute EE change between outer rounds
  int max_outer_iters = 30;
  double dinkelbach_tol = 1e-8;
  int dinkelbach_max_iters = 50;
  double rank_one_tol = 1e-6;  // second-to-first eigenvalue ratio
  int n_randomizations = 200;
  int mc_samples = 10000;
  std::uint64_t rng_seed = 1;
};

struct Scenario {
  SystemConfig sys;
  Geometry geo;
  PathLossModel pl;
  UncertaintyConfig unc;
  SolverOptions opt;
};

struct InvalidConfig {
  std::string field;
  std::string reason;
};

// empty result means the scenario is valid; otherwise every violation is listed
std::vector<InvalidConfig> validate_scenario(const Scenario& s);

// reference scenario at the requested sizes; eves continue down the default
// row of positions when k exceeds the five built-in ones
Scenario default_scenario(int n_antennas = 4, int n_irs_elements = 8, int n_eves = 2);

// JSON document with sections system/geometry/pathloss/uncertainty/solver;
// powers are written in dBm, distances in meters
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);
Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& s);

}  // namespace irsee
