#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "channel.hpp"

using namespace irsee;

namespace {

Scenario desk() { return default_scenario(4, 8, 2); }

VectorXcd random_cvec(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = {u(rng), u(rng)};
  return v;
}

VectorXd random_phases(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.14, 3.14);
  VectorXd t(m);
  for (int i = 0; i < m; ++i) t[i] = u(rng);
  return t;
}

VectorXcd unit_weights(const VectorXd& theta) {
  VectorXcd w(theta.size() + 1);
  for (int i = 0; i < theta.size(); ++i) w[i] = std::polar(1.0, theta[i]);
  w[theta.size()] = 1.0;
  return w;
}

// physical combined gain evaluated straight from the link definitions
std::complex<double> raw_gain(const VectorXcd& direct, const VectorXcd& irs_side,
                              const MatrixXcd& front, const VectorXd& theta,
                              const VectorXcd& f) {
  std::complex<double> v = direct.dot(f);
  VectorXcd through = front * f;
  for (int i = 0; i < theta.size(); ++i)
    v += std::conj(irs_side[i]) * std::polar(1.0, theta[i]) * through[i];
  return v;
}

}  // namespace

TEST_CASE("generation is deterministic in the seed and sensitive to it") {
  Scenario s = desk();
  ChannelSet a = generate_channels(s, 42);
  ChannelSet b = generate_channels(s, 42);
  ChannelSet c = generate_channels(s, 43);
  CHECK(a.H_BI == b.H_BI);
  CHECK(a.h_BU == b.h_BU);
  CHECK(a.g_JE[1] == b.g_JE[1]);
  CHECK(a.h_IE_bar[0] == b.h_IE_bar[0]);
  CHECK(a.H_BI != c.H_BI);
  CHECK(a.h_IU != c.h_IU);
}

TEST_CASE("dimensions follow the scenario") {
  Scenario s = default_scenario(3, 6, 4);
  ChannelSet ch = generate_channels(s, 7);
  CHECK(ch.H_BI.rows() == 6);
  CHECK(ch.H_BI.cols() == 3);
  CHECK(ch.G_JI.rows() == 6);
  CHECK(ch.h_BU.size() == 3);
  CHECK(ch.g_JU.size() == 3);
  CHECK(ch.h_IU.size() == 6);
  REQUIRE(ch.h_BE.size() == 4);
  REQUIRE(ch.g_JE.size() == 4);
  REQUIRE(ch.h_IE_bar.size() == 4);
  REQUIRE(ch.g_IE_true.size() == 4);
  CHECK(ch.h_BE[3].size() == 3);
  CHECK(ch.h_IE_bar[2].size() == 6);
}

TEST_CASE("direct-link fading power matches the distance law") {
  // E|h_BU entry|^2 = g0 * 102^-5 = 9.05730809829916e-14, averaged over many
  // independent realizations; 1e5 values keep the relative error under 5%
  Scenario s = desk();
  double acc = 0.0;
  int count = 0;
  for (std::uint64_t seed = 1; seed <= 25000; ++seed) {
    ChannelSet ch = generate_channels(s, seed);
    acc += ch.h_BU.squaredNorm();
    count += static_cast<int>(ch.h_BU.size());
  }
  double mean = acc / count;
  CHECK(mean == doctest::Approx(9.05730809829916e-14).epsilon(0.05).scale(0.0));
}

TEST_CASE("surface-link fading power matches the distance law") {
  // jammer-to-surface: g0 * d(jammer, irs)^-3.5
  Scenario s = desk();
  double d = (s.geo.jammer - s.geo.irs).norm();
  double expect = s.pl.g0 * std::pow(d, -3.5);
  double acc = 0.0;
  int count = 0;
  for (std::uint64_t seed = 1; seed <= 4000; ++seed) {
    ChannelSet ch = generate_channels(s, seed);
    acc += ch.G_JI.squaredNorm();
    count += static_cast<int>(ch.G_JI.size());
  }
  CHECK(acc / count == doctest::Approx(expect).epsilon(0.05).scale(0.0));
}

TEST_CASE("zero uncertainty collapses nominal and truth") {
  Scenario s = desk();
  s.unc.xi_ie = {0.0, 0.0};
  s.unc.xi_je = {0.0, 0.0};
  ChannelSet ch = generate_channels(s, 11);
  for (int k = 0; k < 2; ++k) {
    CHECK(ch.h_IE_bar[k] == ch.h_IE_true[k]);
    CHECK(ch.g_IE_bar[k] == ch.g_IE_true[k]);
  }
}

TEST_CASE("truth always sits inside the declared ball") {
  Scenario s = desk();
  s.unc.xi_ie = {1e-4, 2e-3};
  s.unc.xi_je = {5e-4, 1e-4};
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    ChannelSet ch = generate_channels(s, seed);
    for (int k = 0; k < 2; ++k) {
      CHECK((ch.h_IE_true[k] - ch.h_IE_bar[k]).norm() <= s.unc.xi_ie[k]);
      CHECK((ch.g_IE_true[k] - ch.g_IE_bar[k]).norm() <= s.unc.xi_je[k]);
    }
  }
}

TEST_CASE("uncertainty radius does not disturb the underlying draws") {
  Scenario a = desk();
  Scenario b = desk();
  b.unc.xi_ie = {1e-2, 1e-2};
  b.unc.xi_je = {1e-2, 1e-2};
  ChannelSet ca = generate_channels(a, 5);
  ChannelSet cb = generate_channels(b, 5);
  CHECK(ca.H_BI == cb.H_BI);
  CHECK(ca.h_IE_true[0] == cb.h_IE_true[0]);
  CHECK(ca.g_IE_true[1] == cb.g_IE_true[1]);
}

TEST_CASE("single-element stack matches the hand-built oracle") {
  ChannelSet ch;
  ch.H_BI = MatrixXcd::Constant(1, 1, std::complex<double>(2.0, 0.0));
  ch.G_JI = MatrixXcd::Constant(1, 1, std::complex<double>(0.0, 1.0));
  ch.h_BU = VectorXcd::Constant(1, std::complex<double>(3.0, 0.0));
  ch.g_JU = VectorXcd::Constant(1, std::complex<double>(1.0, 1.0));
  ch.h_IU = VectorXcd::Constant(1, std::complex<double>(0.0, 1.0));
  ch.g_IU = VectorXcd::Constant(1, std::complex<double>(1.0, 0.0));
  ch.h_BE = {VectorXcd::Constant(1, std::complex<double>(0.5, 0.0))};
  ch.g_JE = {VectorXcd::Constant(1, std::complex<double>(0.0, 0.5))};
  ch.h_IE_bar = {VectorXcd::Constant(1, std::complex<double>(1.0, 2.0))};
  ch.g_IE_bar = {VectorXcd::Constant(1, std::complex<double>(2.0, 1.0))};
  ch.h_IE_true = ch.h_IE_bar;
  ch.g_IE_true = ch.g_IE_bar;

  AugmentedChannels a = compose_perfect(ch);
  REQUIRE(a.H_U.rows() == 2);
  REQUIRE(a.H_U.cols() == 1);
  // top row carries conj(irs link) times the front matrix, bottom the adjoint
  // of the direct link
  CHECK(a.H_U(0, 0) == std::complex<double>(0.0, -2.0));
  CHECK(a.H_U(1, 0) == std::complex<double>(3.0, 0.0));
  CHECK(a.G_U(0, 0) == std::complex<double>(0.0, 1.0) * std::complex<double>(1.0, 0.0));
  CHECK(a.G_U(1, 0) == std::complex<double>(1.0, -1.0));
  CHECK(a.H_E[0](0, 0) == std::complex<double>(1.0, -2.0) * std::complex<double>(2.0, 0.0));
  CHECK(a.H_E[0](1, 0) == std::complex<double>(0.5, 0.0));
}

TEST_CASE("lifted user and eve gains reproduce the raw physics") {
  Scenario s = desk();
  ChannelSet ch = generate_channels(s, 3);
  AugmentedChannels a = compose_perfect(ch);
  std::mt19937_64 rng(911);
  for (int trial = 0; trial < 100; ++trial) {
    VectorXcd f = random_cvec(4, rng);
    VectorXd theta = random_phases(8, rng);
    VectorXcd w = unit_weights(theta);
    std::complex<double> lifted = (w.transpose() * (a.H_U * f))(0);
    std::complex<double> raw = raw_gain(ch.h_BU, ch.h_IU, ch.H_BI, theta, f);
    CHECK(std::abs(lifted - raw) <= 1e-10 * (1.0 + std::abs(raw)));

    std::complex<double> lifted_g = (w.transpose() * (a.G_U * f))(0);
    std::complex<double> raw_g = raw_gain(ch.g_JU, ch.g_IU, ch.G_JI, theta, f);
    CHECK(std::abs(lifted_g - raw_g) <= 1e-10 * (1.0 + std::abs(raw_g)));

    for (int k = 0; k < 2; ++k) {
      std::complex<double> le = (w.transpose() * (a.H_E[k] * f))(0);
      std::complex<double> re = raw_gain(ch.h_BE[k], ch.h_IE_bar[k], ch.H_BI, theta, f);
      CHECK(std::abs(le - re) <= 1e-10 * (1.0 + std::abs(re)));
    }
  }
}

TEST_CASE("two eve-side liftings of the same physics agree") {
  // w_bar^T H_E f uses the conjugated-surface stack; the robust composition
  // puts the uncertainty on the vector side instead: h_bar^H (H_BEX f)
  Scenario s = desk();
  ChannelSet ch = generate_channels(s, 9);
  std::mt19937_64 rng(500);
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd theta = random_phases(8, rng);
    VectorXcd f = random_cvec(4, rng);
    AugmentedChannels a = compose_robust(ch, theta);
    VectorXcd w = unit_weights(theta);
    for (int k = 0; k < 2; ++k) {
      std::complex<double> via_w = (w.transpose() * (a.H_E[k] * f))(0);
      std::complex<double> via_x = a.h_IEX_bar[k].dot(a.H_BEX[k] * f);
      CHECK(std::abs(via_w - via_x) <= 1e-10 * (1.0 + std::abs(via_w)));
      std::complex<double> jw = (w.transpose() * (a.G_E[k] * f))(0);
      std::complex<double> jx = a.g_IEX_bar[k].dot(a.G_JEX[k] * f);
      CHECK(std::abs(jw - jx) <= 1e-10 * (1.0 + std::abs(jw)));
    }
  }
}

TEST_CASE("robust stacks have the augmented shapes") {
  Scenario s = desk();
  ChannelSet ch = generate_channels(s, 2);
  VectorXd theta = VectorXd::Zero(8);
  AugmentedChannels a = compose_robust(ch, theta);
  REQUIRE(a.H_BEX.size() == 2);
  CHECK(a.H_BEX[0].rows() == 9);
  CHECK(a.H_BEX[0].cols() == 4);
  CHECK(a.h_IEX_bar[0].size() == 9);
  CHECK(a.h_IEX_bar[0][8] == std::complex<double>(1.0, 0.0));
  CHECK(a.g_IEX_bar[1][8] == std::complex<double>(1.0, 0.0));
  // zero phases leave the front matrix rows untouched
  CHECK(a.H_BEX[0].topRows(8) == ch.H_BI);
  CHECK_THROWS_AS(compose_robust(ch, VectorXd::Zero(5)), std::invalid_argument);
}

TEST_CASE("perturbation samples respect radius and parity") {
  std::mt19937_64 rng(77);
  VectorXcd bar = random_cvec(8, rng);
  CHECK(sample_perturbation(bar, 0.0, 123) == bar);
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    VectorXcd p = sample_perturbation(bar, 1e-3, seed);
    double r = (p - bar).norm();
    CHECK(r <= 1e-3 * (1.0 + 1e-12));
    if (seed % 2 == 1)
      CHECK(r == doctest::Approx(1e-3).epsilon(1e-12).scale(0.0));
    else
      CHECK(r < 1e-3);
  }
}

TEST_CASE("channel document round trips exactly") {
  Scenario s = desk();
  ChannelSet ch = generate_channels(s, 21);
  ChannelSet r = channels_from_json_text(channels_to_json_text(ch));
  CHECK(r.H_BI == ch.H_BI);
  CHECK(r.G_JI == ch.G_JI);
  CHECK(r.h_BU == ch.h_BU);
  CHECK(r.g_JU == ch.g_JU);
  CHECK(r.h_IU == ch.h_IU);
  CHECK(r.g_IU == ch.g_IU);
  for (int k = 0; k < 2; ++k) {
    CHECK(r.h_BE[k] == ch.h_BE[k]);
    CHECK(r.g_JE[k] == ch.g_JE[k]);
    CHECK(r.h_IE_bar[k] == ch.h_IE_bar[k]);
    CHECK(r.g_IE_bar[k] == ch.g_IE_bar[k]);
    CHECK(r.h_IE_true[k] == ch.h_IE_true[k]);
    CHECK(r.g_IE_true[k] == ch.g_IE_true[k]);
  }

  std::string path = "/tmp/irsee_test_channels.json";
  save_channels(ch, path);
  ChannelSet f = load_channels(path);
  CHECK(f.H_BI == ch.H_BI);
  std::remove(path.c_str());
  CHECK_THROWS_WITH_AS(load_channels("/nonexistent/none.json"), doctest::Contains("cannot open"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(channels_from_json_text("nope"), doctest::Contains("parse failure"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(channels_from_json_text("{}"), doctest::Contains("missing"),
                       std::runtime_error);
}
