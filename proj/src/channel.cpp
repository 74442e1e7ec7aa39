#include "channel.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace irsee {

using nlohmann::json;

namespace detail {

double GaussianStream::uniform01() {
  // 53-bit mantissa draw shifted off both endpoints
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1p-53;
}

std::complex<double> GaussianStream::cn01() {
  double r = std::sqrt(-std::log(uniform01()));
  double phi = 2.0 * std::numbers::pi * uniform01();
  return {r * std::cos(phi), r * std::sin(phi)};
}

VectorXcd GaussianStream::cn01_vector(int n) {
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = cn01();
  return v;
}

}  // namespace detail

namespace {

double link_amp(const PathLossModel& pl, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                double exponent) {
  double d = (a - b).norm();
  return std::sqrt(pl.g0 * std::pow(d, -exponent));
}

VectorXcd ball_point(detail::GaussianStream& g, int dim, double xi, bool on_sphere) {
  VectorXcd dir = g.cn01_vector(dim);
  double u = g.uniform01();
  double n = dir.norm();
  if (n == 0.0) return VectorXcd::Zero(dim);
  double radius = on_sphere ? xi : xi * std::pow(u, 1.0 / (2.0 * dim));
  return (radius / n) * dir;
}

}  // namespace

ChannelSet generate_channels(const Scenario& s, std::uint64_t seed) {
  const int n = s.sys.n_antennas;
  const int m = s.sys.n_irs_elements;
  const int k = s.sys.n_eves;
  detail::GaussianStream g(seed);
  ChannelSet ch;

  double a_bi = link_amp(s.pl, s.geo.base_station, s.geo.irs, s.pl.c_bi);
  ch.H_BI.resize(m, n);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) ch.H_BI(r, c) = a_bi * g.cn01();

  double a_bu = link_amp(s.pl, s.geo.base_station, s.geo.user, s.pl.c_bu);
  ch.h_BU = a_bu * g.cn01_vector(n);

  for (int e = 0; e < k; ++e) {
    double a = link_amp(s.pl, s.geo.base_station, s.geo.eves[e], s.pl.c_be);
    ch.h_BE.push_back(a * g.cn01_vector(n));
  }

  double a_ji = link_amp(s.pl, s.geo.jammer, s.geo.irs, s.pl.c_ji);
  ch.G_JI.resize(m, n);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) ch.G_JI(r, c) = a_ji * g.cn01();

  double a_ju = link_amp(s.pl, s.geo.jammer, s.geo.user, s.pl.c_ju);
  ch.g_JU = a_ju * g.cn01_vector(n);

  for (int e = 0; e < k; ++e) {
    double a = link_amp(s.pl, s.geo.jammer, s.geo.eves[e], s.pl.c_je);
    ch.g_JE.push_back(a * g.cn01_vector(n));
  }

  double a_iu = link_amp(s.pl, s.geo.irs, s.geo.user, s.pl.c_iu);
  ch.h_IU = a_iu * g.cn01_vector(m);
  ch.g_IU = a_iu * g.cn01_vector(m);

  for (int e = 0; e < k; ++e) {
    double a = link_amp(s.pl, s.geo.irs, s.geo.eves[e], s.pl.c_ie);
    ch.h_IE_true.push_back(a * g.cn01_vector(m));
    ch.g_IE_true.push_back(a * g.cn01_vector(m));
  }
  // the nominal estimate is truth minus a realizable in-ball error, so the
  // declared uncertainty region always contains the truth
  for (int e = 0; e < k; ++e) {
    ch.h_IE_bar.push_back(ch.h_IE_true[e] - ball_point(g, m, s.unc.xi_ie[e], false));
    ch.g_IE_bar.push_back(ch.g_IE_true[e] - ball_point(g, m, s.unc.xi_je[e], false));
  }
  return ch;
}

AugmentedChannels compose_perfect(const ChannelSet& ch) {
  const int m = static_cast<int>(ch.H_BI.rows());
  const int n = static_cast<int>(ch.H_BI.cols());
  const int k = static_cast<int>(ch.h_BE.size());
  auto stack = [m, n](const VectorXcd& irs_side, const MatrixXcd& front,
                      const VectorXcd& direct) {
    MatrixXcd out(m + 1, n);
    out.topRows(m) = irs_side.conjugate().asDiagonal() * front;
    out.row(m) = direct.adjoint();
    return out;
  };
  AugmentedChannels a;
  a.H_U = stack(ch.h_IU, ch.H_BI, ch.h_BU);
  a.G_U = stack(ch.g_IU, ch.G_JI, ch.g_JU);
  for (int e = 0; e < k; ++e) {
    a.H_E.push_back(stack(ch.h_IE_bar[e], ch.H_BI, ch.h_BE[e]));
    a.G_E.push_back(stack(ch.g_IE_bar[e], ch.G_JI, ch.g_JE[e]));
  }
  return a;
}

AugmentedChannels compose_robust(const ChannelSet& ch, const VectorXd& theta) {
  const int m = static_cast<int>(ch.H_BI.rows());
  const int n = static_cast<int>(ch.H_BI.cols());
  const int k = static_cast<int>(ch.h_BE.size());
  if (theta.size() != m) throw std::invalid_argument("compose_robust: phase count must equal M");
  VectorXcd w(m);
  for (int i = 0; i < m; ++i) w[i] = std::polar(1.0, theta[i]);
  AugmentedChannels a = compose_perfect(ch);
  for (int e = 0; e < k; ++e) {
    MatrixXcd hx(m + 1, n), gx(m + 1, n);
    hx.topRows(m) = w.asDiagonal() * ch.H_BI;
    hx.row(m) = ch.h_BE[e].adjoint();
    gx.topRows(m) = w.asDiagonal() * ch.G_JI;
    gx.row(m) = ch.g_JE[e].adjoint();
    a.H_BEX.push_back(std::move(hx));
    a.G_JEX.push_back(std::move(gx));
    VectorXcd hb(m + 1), gb(m + 1);
    hb << ch.h_IE_bar[e], 1.0;
    gb << ch.g_IE_bar[e], 1.0;
    a.h_IEX_bar.push_back(std::move(hb));
    a.g_IEX_bar.push_back(std::move(gb));
  }
  return a;
}

VectorXcd sample_perturbation(const VectorXcd& bar_vec, double xi, std::uint64_t seed) {
  if (xi == 0.0) return bar_vec;
  detail::GaussianStream g(seed);
  return bar_vec + ball_point(g, static_cast<int>(bar_vec.size()), xi, (seed & 1) != 0);
}

namespace {

json cvec_to_json(const VectorXcd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(json::array({v[i].real(), v[i].imag()}));
  return a;
}

json cmat_to_json(const MatrixXcd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(row);
  }
  return rows;
}

VectorXcd cvec_from_json(const json& a) {
  VectorXcd v(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    v[static_cast<int>(i)] = {a[i][0].get<double>(), a[i][1].get<double>()};
  return v;
}

MatrixXcd cmat_from_json(const json& rows) {
  size_t nr = rows.size();
  size_t nc = nr ? rows[0].size() : 0;
  MatrixXcd m(nr, nc);
  for (size_t r = 0; r < nr; ++r)
    for (size_t c = 0; c < nc; ++c)
      m(static_cast<int>(r), static_cast<int>(c)) = {rows[r][c][0].get<double>(),
                                                     rows[r][c][1].get<double>()};
  return m;
}

json cvecs_to_json(const std::vector<VectorXcd>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(cvec_to_json(v));
  return a;
}

std::vector<VectorXcd> cvecs_from_json(const json& a) {
  std::vector<VectorXcd> vs;
  for (const auto& v : a) vs.push_back(cvec_from_json(v));
  return vs;
}

}  // namespace

std::string channels_to_json_text(const ChannelSet& ch) {
  json j;
  j["H_BI"] = cmat_to_json(ch.H_BI);
  j["h_BU"] = cvec_to_json(ch.h_BU);
  j["h_BE"] = cvecs_to_json(ch.h_BE);
  j["G_JI"] = cmat_to_json(ch.G_JI);
  j["g_JU"] = cvec_to_json(ch.g_JU);
  j["g_JE"] = cvecs_to_json(ch.g_JE);
  j["h_IU"] = cvec_to_json(ch.h_IU);
  j["g_IU"] = cvec_to_json(ch.g_IU);
  j["h_IE_bar"] = cvecs_to_json(ch.h_IE_bar);
  j["g_IE_bar"] = cvecs_to_json(ch.g_IE_bar);
  j["h_IE_true"] = cvecs_to_json(ch.h_IE_true);
  j["g_IE_true"] = cvecs_to_json(ch.g_IE_true);
  return j.dump(2) + "\n";
}

ChannelSet channels_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("channels: JSON parse failure: ") + e.what());
  }
  ChannelSet ch;
  try {
    ch.H_BI = cmat_from_json(j.at("H_BI"));
    ch.h_BU = cvec_from_json(j.at("h_BU"));
    ch.h_BE = cvecs_from_json(j.at("h_BE"));
    ch.G_JI = cmat_from_json(j.at("G_JI"));
    ch.g_JU = cvec_from_json(j.at("g_JU"));
    ch.g_JE = cvecs_from_json(j.at("g_JE"));
    ch.h_IU = cvec_from_json(j.at("h_IU"));
    ch.g_IU = cvec_from_json(j.at("g_IU"));
    ch.h_IE_bar = cvecs_from_json(j.at("h_IE_bar"));
    ch.g_IE_bar = cvecs_from_json(j.at("g_IE_bar"));
    ch.h_IE_true = cvecs_from_json(j.at("h_IE_true"));
    ch.g_IE_true = cvecs_from_json(j.at("g_IE_true"));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("channels: missing or mistyped field: ") + e.what());
  }
  return ch;
}

void save_channels(const ChannelSet& ch, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("channels: cannot write " + path);
  out << channels_to_json_text(ch);
}

ChannelSet load_channels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("channels: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return channels_from_json_text(buf.str());
}

}  // namespace irsee
