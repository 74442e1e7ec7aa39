#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "channel.hpp"
#include "metrics.hpp"

using namespace irsee;

namespace {

// N=1, M=1 network with every link coefficient set by hand
ChannelSet scalar_links(std::complex<double> h_bu, std::complex<double> h_iu,
                        std::complex<double> h_bi, std::complex<double> h_be,
                        std::complex<double> h_ie, std::complex<double> g_ju,
                        std::complex<double> g_iu, std::complex<double> g_ji,
                        std::complex<double> g_je, std::complex<double> g_ie) {
  ChannelSet ch;
  ch.H_BI = MatrixXcd::Constant(1, 1, h_bi);
  ch.G_JI = MatrixXcd::Constant(1, 1, g_ji);
  ch.h_BU = VectorXcd::Constant(1, h_bu);
  ch.g_JU = VectorXcd::Constant(1, g_ju);
  ch.h_IU = VectorXcd::Constant(1, h_iu);
  ch.g_IU = VectorXcd::Constant(1, g_iu);
  ch.h_BE = {VectorXcd::Constant(1, h_be)};
  ch.g_JE = {VectorXcd::Constant(1, g_je)};
  ch.h_IE_bar = {VectorXcd::Constant(1, h_ie)};
  ch.g_IE_bar = {VectorXcd::Constant(1, g_ie)};
  ch.h_IE_true = ch.h_IE_bar;
  ch.g_IE_true = ch.g_IE_bar;
  return ch;
}

VectorXcd cvec1(std::complex<double> v) { return VectorXcd::Constant(1, v); }

VectorXcd random_cvec(int n, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * std::complex<double>(u(rng), u(rng));
  return v;
}

VectorXd random_phases(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.14, 3.14);
  VectorXd t(m);
  for (int i = 0; i < m; ++i) t[i] = u(rng);
  return t;
}

}  // namespace

TEST_CASE("total power hits the frozen circuit sum") {
  SystemConfig cfg;  // reference powers: 23, 23, 20 dBm
  VectorXcd z = VectorXcd::Zero(4);
  // 2 * 10^-0.7 + 0.1, evaluated independently
  CHECK(total_power(z, z, cfg) == doctest::Approx(0.4990524629937759).epsilon(1e-15));
}

TEST_CASE("total power is the scaled transmit term plus circuit") {
  SystemConfig cfg;
  cfg.p_bs = cfg.p_g = cfg.p_irs = 0.0;
  VectorXcd f1 = VectorXcd::Zero(4);
  f1[0] = 1.0;
  VectorXcd z = VectorXcd::Zero(4);
  CHECK(total_power(f1, z, cfg) == 1.0);

  SystemConfig two = cfg;
  two.zeta = 2.0;
  std::mt19937_64 rng(3);
  VectorXcd f2 = random_cvec(4, rng, 0.5);
  double base = total_power(f1, f2, cfg);
  CHECK(total_power(f1, f2, two) == doctest::Approx(2.0 * base).epsilon(1e-14));
}

TEST_CASE("scalar network gives the closed-form sinr") {
  // all links 1, theta = 0: combined amplitude doubles, power quadruples
  ChannelSet ch = scalar_links(1, 1, 1, 1, 1, 1, 1, 1, 1, 1);
  SystemConfig cfg;
  cfg.noise_power = 0.5;
  cfg.sync_a0();
  double p = 2.0;
  VectorXcd f1 = cvec1(std::sqrt(p));
  VectorXcd f2 = cvec1(0.0);
  VectorXd theta = VectorXd::Zero(1);
  CHECK(sinr(f1, f2, theta, ch, cfg, -1) == doctest::Approx(4.0 * p / 0.5).epsilon(1e-13));
  CHECK(sinr(cvec1(0.0), f2, theta, ch, cfg, -1) == 0.0);
  // jammer off leaves a pure signal-over-noise ratio
  CHECK(sinr(f1, f2, theta, ch, cfg, 0) == doctest::Approx(4.0 * p / 0.5).epsilon(1e-13));
}

TEST_CASE("jamming enters only the denominator") {
  ChannelSet ch = scalar_links(1, 0, 1, 1, 0, 1, 0, 1, 1, 0);
  SystemConfig cfg;
  cfg.noise_power = 1.0;
  cfg.sync_a0();
  VectorXd theta = VectorXd::Zero(1);
  VectorXcd f1 = cvec1(2.0);
  double clean = sinr(f1, cvec1(0.0), theta, ch, cfg, -1);
  CHECK(clean == doctest::Approx(4.0).epsilon(1e-13));
  double jammed = sinr(f1, cvec1(1.0), theta, ch, cfg, -1);
  CHECK(jammed == doctest::Approx(4.0 / 2.0).epsilon(1e-13));
}

TEST_CASE("dimension mismatches are rejected") {
  ChannelSet ch = scalar_links(1, 1, 1, 1, 1, 1, 1, 1, 1, 1);
  SystemConfig cfg;
  VectorXd theta = VectorXd::Zero(1);
  CHECK_THROWS_AS(sinr(VectorXcd::Zero(2), cvec1(0.0), theta, ch, cfg, -1),
                  std::invalid_argument);
  CHECK_THROWS_AS(sinr(cvec1(1.0), cvec1(0.0), VectorXd::Zero(3), ch, cfg, -1),
                  std::invalid_argument);
}

TEST_CASE("secrecy rate separates the user and the strongest eve") {
  // gamma_u = 3, gamma_e = 1: one bit of secrecy at unit bandwidth
  ChannelSet ch = scalar_links(1, 0, 1, 1.0 / std::sqrt(3.0), 0, 0, 0, 0, 0, 0);
  SystemConfig cfg;
  cfg.noise_power = 1.0;
  cfg.sync_a0();
  VectorXd theta = VectorXd::Zero(1);
  VectorXcd f1 = cvec1(std::sqrt(3.0));
  VectorXcd f2 = cvec1(0.0);
  CHECK(sinr(f1, f2, theta, ch, cfg, -1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(sinr(f1, f2, theta, ch, cfg, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(secrecy_rate(f1, f2, theta, ch, cfg) == doctest::Approx(1.0).epsilon(1e-12));
  // doubled bandwidth doubles the rate
  SystemConfig wide = cfg;
  wide.bandwidth = 2.0;
  CHECK(secrecy_rate(f1, f2, theta, ch, wide) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("secrecy rate clamps at zero") {
  // eve twice as strong as the user
  ChannelSet ch = scalar_links(1, 0, 1, 2.0, 0, 0, 0, 0, 0, 0);
  SystemConfig cfg;
  cfg.noise_power = 1.0;
  cfg.sync_a0();
  VectorXd theta = VectorXd::Zero(1);
  CHECK(secrecy_rate(cvec1(1.0), cvec1(0.0), theta, ch, cfg) == 0.0);
  CHECK(secrecy_rate(cvec1(0.0), cvec1(0.0), theta, ch, cfg) == 0.0);
}

TEST_CASE("efficiency on a half-watt budget doubles the rate") {
  ChannelSet ch = scalar_links(1, 0, 1, 1.0 / std::sqrt(3.0), 0, 0, 0, 0, 0, 0);
  SystemConfig cfg;
  cfg.noise_power = 1.0;
  cfg.sync_a0();
  cfg.zeta = 0.0;  // isolate the circuit term
  cfg.p_bs = 0.25;
  cfg.p_g = 0.15;
  cfg.p_irs = 0.1;
  VectorXd theta = VectorXd::Zero(1);
  VectorXcd f1 = cvec1(std::sqrt(3.0));
  VectorXcd f2 = cvec1(0.0);
  CHECK(total_power(f1, f2, cfg) == 0.5);
  CHECK(energy_efficiency(f1, f2, theta, ch, cfg) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("scorecard fields are mutually consistent") {
  Scenario s = default_scenario();
  ChannelSet ch = generate_channels(s, 8);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    VectorXcd f1 = random_cvec(4, rng, 0.7);
    VectorXcd f2 = random_cvec(4, rng, 0.3);
    VectorXd theta = random_phases(8, rng);
    SolutionMetrics m = evaluate_solution(f1, f2, theta, ch, s.sys);
    REQUIRE(m.gamma_e.size() == 2);
    CHECK(m.gamma_u >= 0.0);
    CHECK(m.r_s >= 0.0);
    CHECK(m.r_s == doctest::Approx(std::max(0.0, m.r_u - m.r_e_max)).epsilon(1e-12));
    CHECK(m.p_tot >= s.sys.p_bs + s.sys.p_g + s.sys.p_irs);
    CHECK(m.ee * m.p_tot == doctest::Approx(m.r_s).epsilon(1e-12));
    CHECK(m.gamma_u == doctest::Approx(sinr(f1, f2, theta, ch, s.sys, -1)).epsilon(1e-14));
    CHECK(m.r_s == doctest::Approx(secrecy_rate(f1, f2, theta, ch, s.sys)).epsilon(1e-12));
  }
}

TEST_CASE("common phase rotation of the beam changes nothing") {
  Scenario s = default_scenario();
  ChannelSet ch = generate_channels(s, 4);
  std::mt19937_64 rng(31);
  VectorXcd f1 = random_cvec(4, rng, 0.8);
  VectorXcd f2 = random_cvec(4, rng, 0.4);
  VectorXd theta = random_phases(8, rng);
  double base = secrecy_rate(f1, f2, theta, ch, s.sys);
  for (double phi : {0.3, 1.7, -2.4}) {
    VectorXcd rotated = std::polar(1.0, phi) * f1;
    CHECK(secrecy_rate(rotated, f2, theta, ch, s.sys) ==
          doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("direct evaluation agrees with the lifted stacks") {
  Scenario s = default_scenario();
  ChannelSet ch = generate_channels(s, 6);
  AugmentedChannels a = compose_perfect(ch);
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    VectorXcd f1 = random_cvec(4, rng, 1.0);
    VectorXcd f2 = random_cvec(4, rng, 0.5);
    VectorXd theta = random_phases(8, rng);
    VectorXcd w(9);
    for (int i = 0; i < 8; ++i) w[i] = std::polar(1.0, theta[i]);
    w[8] = 1.0;
    auto lifted_sinr = [&](const MatrixXcd& hu, const MatrixXcd& gu) {
      double sig = std::norm((w.transpose() * (hu * f1))(0));
      double jam = std::norm((w.transpose() * (gu * f2))(0));
      return sig / (jam + s.sys.noise_power);
    };
    CHECK(sinr(f1, f2, theta, ch, s.sys, -1) ==
          doctest::Approx(lifted_sinr(a.H_U, a.G_U)).epsilon(1e-10));
    for (int k = 0; k < 2; ++k)
      CHECK(sinr(f1, f2, theta, ch, s.sys, k) ==
            doctest::Approx(lifted_sinr(a.H_E[k], a.G_E[k])).epsilon(1e-10));
  }
}

TEST_CASE("worst-case sampling starts at the nominal point") {
  Scenario s = default_scenario();
  ChannelSet ch = generate_channels(s, 13);
  std::mt19937_64 rng(61);
  VectorXcd f1 = random_cvec(4, rng, 0.8);
  VectorXcd f2 = random_cvec(4, rng, 0.3);
  VectorXd theta = random_phases(8, rng);
  double nominal = secrecy_rate(f1, f2, theta, ch, s.sys);

  WorstCaseSample one = worst_case_rate_mc(f1, f2, theta, ch, s.sys, s.unc, 1, 5);
  CHECK(one.min_rate == nominal);
  CHECK(one.argmin_sample == 0);
  CHECK(one.worst_h[0] == ch.h_IE_bar[0]);

  UncertaintyConfig zero;
  zero.xi_ie = {0.0, 0.0};
  zero.xi_je = {0.0, 0.0};
  WorstCaseSample z = worst_case_rate_mc(f1, f2, theta, ch, s.sys, zero, 200, 5);
  CHECK(z.min_rate == nominal);
  CHECK(z.argmin_sample == 0);

  CHECK_THROWS_AS(worst_case_rate_mc(f1, f2, theta, ch, s.sys, s.unc, 0, 5),
                  std::invalid_argument);
}

TEST_CASE("worst-case sampling explores the ball and never exceeds nominal") {
  Scenario s = default_scenario();
  s.unc.xi_ie = {1e-3, 1e-3};  // comparable to the surface-eve link scale
  s.unc.xi_je = {1e-3, 1e-3};
  ChannelSet ch = generate_channels(s, 17);
  std::mt19937_64 rng(71);
  VectorXcd f1 = random_cvec(4, rng, 0.8);
  VectorXcd f2 = random_cvec(4, rng, 0.3);
  VectorXd theta = random_phases(8, rng);
  double nominal = secrecy_rate(f1, f2, theta, ch, s.sys);

  WorstCaseSample w = worst_case_rate_mc(f1, f2, theta, ch, s.sys, s.unc, 400, 9);
  CHECK(w.min_rate <= nominal);
  for (int k = 0; k < 2; ++k) {
    CHECK((w.worst_h[k] - ch.h_IE_bar[k]).norm() <= s.unc.xi_ie[k] * (1.0 + 1e-12));
    CHECK((w.worst_g[k] - ch.g_IE_bar[k]).norm() <= s.unc.xi_je[k] * (1.0 + 1e-12));
  }
  // replay determinism
  WorstCaseSample w2 = worst_case_rate_mc(f1, f2, theta, ch, s.sys, s.unc, 400, 9);
  CHECK(w2.min_rate == w.min_rate);
  CHECK(w2.argmin_sample == w.argmin_sample);
}
