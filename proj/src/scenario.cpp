#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace irsee {

using nlohmann::json;

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

std::vector<InvalidConfig> validate_scenario(const Scenario& s) {
  std::vector<InvalidConfig> errs;
  auto bad = [&errs](const std::string& field, const std::string& reason) {
    errs.push_back({field, reason});
  };

  const SystemConfig& c = s.sys;
  if (c.n_antennas < 1) bad("n_antennas", "must be at least 1");
  if (c.n_irs_elements < 1) bad("n_irs_elements", "must be at least 1");
  if (c.n_eves < 1) bad("n_eves", "must be at least 1");
  if (!(c.bandwidth > 0)) bad("bandwidth", "must be positive");
  if (!(c.noise_power > 0)) bad("noise_power", "must be positive");
  if (!(c.zeta > 0)) bad("zeta", "must be positive");
  if (!(c.p1_max > 0)) bad("p1_max", "must be positive");
  if (!(c.p2_max > 0)) bad("p2_max", "must be positive");
  if (!(c.p_bs > 0)) bad("p_bs", "must be positive");
  if (!(c.p_g > 0)) bad("p_g", "must be positive");
  if (!(c.p_irs > 0)) bad("p_irs", "must be positive");
  if (!(c.r_th >= 0)) bad("r_th", "must be nonnegative");
  // the reciprocal is stored, not recomputed downstream; it must be the exact
  // IEEE quotient so both SINR normalizations agree bit for bit
  if (c.noise_power > 0 && c.a0 != 1.0 / c.noise_power)
    bad("a0", "must equal 1/noise_power exactly");

  const Geometry& g = s.geo;
  if (static_cast<int>(g.eves.size()) != c.n_eves)
    bad("eves", "position count must match n_eves");
  std::vector<std::pair<std::string, Eigen::Vector3d>> pts = {
      {"base_station", g.base_station}, {"jammer", g.jammer}, {"irs", g.irs}, {"user", g.user}};
  for (size_t k = 0; k < g.eves.size(); ++k)
    pts.emplace_back("eve" + std::to_string(k), g.eves[k]);
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      if ((pts[i].second - pts[j].second).norm() <= 0.0)
        bad("distance", pts[i].first + " and " + pts[j].first + " coincide");

  const PathLossModel& pl = s.pl;
  if (!(pl.g0 > 0)) bad("g0", "must be positive");
  for (auto [name, v] : {std::pair<const char*, double>{"c_bu", pl.c_bu},
                         {"c_be", pl.c_be},
                         {"c_bi", pl.c_bi},
                         {"c_ji", pl.c_ji},
                         {"c_ju", pl.c_ju},
                         {"c_je", pl.c_je},
                         {"c_iu", pl.c_iu},
                         {"c_ie", pl.c_ie}})
    if (!(v >= 0)) bad(name, "exponent must be nonnegative");
  if (pl.c_iu > pl.c_ie) bad("c_iu", "IRS-user exponent must not exceed IRS-eve exponent");

  const UncertaintyConfig& u = s.unc;
  if (static_cast<int>(u.xi_ie.size()) != c.n_eves) bad("xi_ie", "radius count must match n_eves");
  if (static_cast<int>(u.xi_je.size()) != c.n_eves) bad("xi_je", "radius count must match n_eves");
  for (double x : u.xi_ie)
    if (!(x >= 0)) bad("xi_ie", "radius must be nonnegative");
  for (double x : u.xi_je)
    if (!(x >= 0)) bad("xi_je", "radius must be nonnegative");

  const SolverOptions& o = s.opt;
  if (!(o.outer_tol > 0)) bad("outer_tol", "must be positive");
  if (o.max_outer_iters < 1) bad("max_outer_iters", "must be at least 1");
  if (!(o.dinkelbach_tol > 0)) bad("dinkelbach_tol", "must be positive");
  if (o.dinkelbach_max_iters < 1) bad("dinkelbach_max_iters", "must be at least 1");
  if (!(o.rank_one_tol > 0)) bad("rank_one_tol", "must be positive");
  if (o.n_randomizations < 1) bad("n_randomizations", "must be at least 1");
  if (o.mc_samples < 1) bad("mc_samples", "must be at least 1");
  return errs;
}

Scenario default_scenario(int n_antennas, int n_irs_elements, int n_eves) {
  Scenario s;
  s.sys.n_antennas = n_antennas;
  s.sys.n_irs_elements = n_irs_elements;
  s.sys.n_eves = n_eves;
  for (int k = 0; k < n_eves; ++k)
    s.geo.eves.emplace_back(2.0, 105.0 - 2.5 * k, 0.0);
  s.unc.xi_ie.assign(n_eves, 1e-4);
  s.unc.xi_je.assign(n_eves, 1e-4);
  return s;
}

namespace {

json vec3_to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3)
    throw std::runtime_error("scenario: " + what + " must be a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string scenario_to_json_text(const Scenario& s) {
  json j;
  j["system"] = {{"n_antennas", s.sys.n_antennas},
                 {"n_irs_elements", s.sys.n_irs_elements},
                 {"n_eves", s.sys.n_eves},
                 {"bandwidth", s.sys.bandwidth},
                 {"noise_dbm", watt_to_dbm(s.sys.noise_power)},
                 {"zeta", s.sys.zeta},
                 {"p1_max_dbm", watt_to_dbm(s.sys.p1_max)},
                 {"p2_max_dbm", watt_to_dbm(s.sys.p2_max)},
                 {"p_bs_dbm", watt_to_dbm(s.sys.p_bs)},
                 {"p_g_dbm", watt_to_dbm(s.sys.p_g)},
                 {"p_irs_dbm", watt_to_dbm(s.sys.p_irs)},
                 {"r_th", s.sys.r_th}};
  json eves = json::array();
  for (const auto& e : s.geo.eves) eves.push_back(vec3_to_json(e));
  j["geometry"] = {{"base_station", vec3_to_json(s.geo.base_station)},
                   {"jammer", vec3_to_json(s.geo.jammer)},
                   {"irs", vec3_to_json(s.geo.irs)},
                   {"user", vec3_to_json(s.geo.user)},
                   {"eves", eves}};
  j["pathloss"] = {{"g0_db", 10.0 * std::log10(s.pl.g0)},
                   {"c_bu", s.pl.c_bu},
                   {"c_be", s.pl.c_be},
                   {"c_bi", s.pl.c_bi},
                   {"c_ji", s.pl.c_ji},
                   {"c_ju", s.pl.c_ju},
                   {"c_je", s.pl.c_je},
                   {"c_iu", s.pl.c_iu},
                   {"c_ie", s.pl.c_ie}};
  j["uncertainty"] = {{"xi_ie", s.unc.xi_ie}, {"xi_je", s.unc.xi_je}};
  j["solver"] = {{"outer_tol", s.opt.outer_tol},
                 {"max_outer_iters", s.opt.max_outer_iters},
                 {"dinkelbach_tol", s.opt.dinkelbach_tol},
                 {"dinkelbach_max_iters", s.opt.dinkelbach_max_iters},
                 {"rank_one_tol", s.opt.rank_one_tol},
                 {"n_randomizations", s.opt.n_randomizations},
                 {"mc_samples", s.opt.mc_samples},
                 {"rng_seed", s.opt.rng_seed}};
  return j.dump(2) + "\n";
}

Scenario scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("scenario: JSON parse failure: ") + e.what());
  }
  Scenario s;
  try {
    const json& sys = j.at("system");
    s.sys.n_antennas = sys.at("n_antennas").get<int>();
    s.sys.n_irs_elements = sys.at("n_irs_elements").get<int>();
    s.sys.n_eves = sys.at("n_eves").get<int>();
    s.sys.bandwidth = sys.value("bandwidth", 1.0);
    s.sys.noise_power = dbm_to_watt(sys.at("noise_dbm").get<double>());
    s.sys.zeta = sys.value("zeta", 1.0);
    s.sys.p1_max = dbm_to_watt(sys.at("p1_max_dbm").get<double>());
    s.sys.p2_max = dbm_to_watt(sys.at("p2_max_dbm").get<double>());
    s.sys.p_bs = dbm_to_watt(sys.at("p_bs_dbm").get<double>());
    s.sys.p_g = dbm_to_watt(sys.at("p_g_dbm").get<double>());
    s.sys.p_irs = dbm_to_watt(sys.at("p_irs_dbm").get<double>());
    s.sys.r_th = sys.value("r_th", 0.5);
    s.sys.sync_a0();

    const json& geo = j.at("geometry");
    s.geo.base_station = vec3_from_json(geo.at("base_station"), "base_station");
    s.geo.jammer = vec3_from_json(geo.at("jammer"), "jammer");
    s.geo.irs = vec3_from_json(geo.at("irs"), "irs");
    s.geo.user = vec3_from_json(geo.at("user"), "user");
    s.geo.eves.clear();
    for (const auto& e : geo.at("eves")) s.geo.eves.push_back(vec3_from_json(e, "eve"));

    const json& pl = j.at("pathloss");
    s.pl.g0 = std::pow(10.0, pl.at("g0_db").get<double>() / 10.0);
    s.pl.c_bu = pl.at("c_bu").get<double>();
    s.pl.c_be = pl.at("c_be").get<double>();
    s.pl.c_bi = pl.at("c_bi").get<double>();
    s.pl.c_ji = pl.at("c_ji").get<double>();
    s.pl.c_ju = pl.at("c_ju").get<double>();
    s.pl.c_je = pl.at("c_je").get<double>();
    s.pl.c_iu = pl.at("c_iu").get<double>();
    s.pl.c_ie = pl.at("c_ie").get<double>();

    const json& unc = j.at("uncertainty");
    s.unc.xi_ie = unc.at("xi_ie").get<std::vector<double>>();
    s.unc.xi_je = unc.at("xi_je").get<std::vector<double>>();

    if (j.contains("solver")) {
      const json& so = j.at("solver");
      s.opt.outer_tol = so.value("outer_tol", s.opt.outer_tol);
      s.opt.max_outer_iters = so.value("max_outer_iters", s.opt.max_outer_iters);
      s.opt.dinkelbach_tol = so.value("dinkelbach_tol", s.opt.dinkelbach_tol);
      s.opt.dinkelbach_max_iters = so.value("dinkelbach_max_iters", s.opt.dinkelbach_max_iters);
      s.opt.rank_one_tol = so.value("rank_one_tol", s.opt.rank_one_tol);
      s.opt.n_randomizations = so.value("n_randomizations", s.opt.n_randomizations);
      s.opt.mc_samples = so.value("mc_samples", s.opt.mc_samples);
      s.opt.rng_seed = so.value("rng_seed", s.opt.rng_seed);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario: missing or mistyped field: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str());
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("scenario: cannot write " + path);
  out << scenario_to_json_text(s);
}

}  // namespace irsee
