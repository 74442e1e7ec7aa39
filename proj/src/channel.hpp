#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace irsee {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// One fading realization of every link in the network. Eve-side IRS channels
// come in nominal/truth pairs: the nominal estimate is what the robust design
// sees, the truth (inside the declared uncertainty ball) is what Monte-Carlo
// validation replays.
struct ChannelSet {
  MatrixXcd H_BI;  // IRS x antennas, base station to IRS
  VectorXcd h_BU;
  std::vector<VectorXcd> h_BE;
  MatrixXcd G_JI;  // IRS x antennas, jammer to IRS
  VectorXcd g_JU;
  std::vector<VectorXcd> g_JE;
  VectorXcd h_IU;  // IRS to user
  VectorXcd g_IU;  // jammer-side IRS to user
  std::vector<VectorXcd> h_IE_bar;  // nominal IRS-to-eve estimates
  std::vector<VectorXcd> g_IE_bar;
  std::vector<VectorXcd> h_IE_true;  // realizable truths within the ball
  std::vector<VectorXcd> g_IE_true;
};

// Stacked forms consumed by the optimization problems. The phase weight
// vector convention everywhere in this library: a phase configuration theta
// is represented by w_bar = [exp(j theta_1) .. exp(j theta_M), 1], and the
// effective scalar channel toward receiver j is w_bar^T H_j f (transpose, not
// adjoint); |w_bar^T H_j f| equals the physical combined channel magnitude.
struct AugmentedChannels {
  MatrixXcd H_U, G_U;              // (M+1) x N perfect-CSI stacks for the user
  std::vector<MatrixXcd> H_E, G_E;  // per-eve stacks from the nominal estimates
  // robust per-eve stacks for one fixed phase configuration
  std::vector<MatrixXcd> H_BEX, G_JEX;          // (M+1) x N: phased rows over direct row
  std::vector<VectorXcd> h_IEX_bar, g_IEX_bar;  // (M+1): nominal over trailing 1
};

ChannelSet generate_channels(const Scenario& s, std::uint64_t seed);

// perfect-CSI lifting stacks for user and eves (nominal eve estimates)
AugmentedChannels compose_perfect(const ChannelSet& ch);

// eve-side robust stacks for a fixed phase vector theta (length M)
AugmentedChannels compose_robust(const ChannelSet& ch, const VectorXd& theta);

// point of the closed ball around bar_vec; odd seeds land exactly on the
// sphere of radius xi, even seeds fall in the interior
VectorXcd sample_perturbation(const VectorXcd& bar_vec, double xi, std::uint64_t seed);

// regression fixture round trip, complex entries as [re, im] pairs
std::string channels_to_json_text(const ChannelSet& ch);
ChannelSet channels_from_json_text(const std::string& text);
void save_channels(const ChannelSet& ch, const std::string& path);
ChannelSet load_channels(const std::string& path);

namespace detail {

// deterministic standard complex Gaussian stream used for every draw in the
// library; std::normal_distribution is implementation-defined, this is not
struct GaussianStream {
  explicit GaussianStream(std::uint64_t seed) : eng(seed) {}
  std::mt19937_64 eng;
  double uniform01();            // open interval (0, 1)
  std::complex<double> cn01();   // unit-variance circular complex Gaussian
  VectorXcd cn01_vector(int n);
};

}  // namespace detail

}  // namespace irsee
