#pragma once

#include <cstdint>
#include <vector>

#include "channel.hpp"
#include "scenario.hpp"

namespace irsee {

// Physical-layer scorecard for one candidate (f1, f2, theta).
struct SolutionMetrics {
  double gamma_u = 0.0;
  std::vector<double> gamma_e;
  double r_u = 0.0;      // bits/s/Hz
  double r_e_max = 0.0;  // bits/s/Hz, max over eavesdroppers
  double r_s = 0.0;      // max(0, r_u - r_e_max)
  double p_tot = 0.0;    // watts
  double ee = 0.0;       // r_s / p_tot
};

// receiver: -1 = user, 0..K-1 = eavesdropper (nominal channel estimates).
// Evaluates the ratio directly from the physical links in raw watts.
double sinr(const VectorXcd& f1, const VectorXcd& f2, const VectorXd& theta,
            const ChannelSet& ch, const SystemConfig& cfg, int receiver);

// [B log2(1+gamma_u) - max_k B log2(1+gamma_e_k)] clamped at zero
double secrecy_rate(const VectorXcd& f1, const VectorXcd& f2, const VectorXd& theta,
                    const ChannelSet& ch, const SystemConfig& cfg);

// zeta (|f1|^2 + |f2|^2) + circuit powers
double total_power(const VectorXcd& f1, const VectorXcd& f2, const SystemConfig& cfg);

double energy_efficiency(const VectorXcd& f1, const VectorXcd& f2, const VectorXd& theta,
                         const ChannelSet& ch, const SystemConfig& cfg);

SolutionMetrics evaluate_solution(const VectorXcd& f1, const VectorXcd& f2,
                                  const VectorXd& theta, const ChannelSet& ch,
                                  const SystemConfig& cfg);

struct WorstCaseSample {
  double min_rate = 0.0;
  int argmin_sample = 0;  // 0 is the unperturbed nominal
  std::vector<VectorXcd> worst_h;  // per-eve IRS channels toward that minimum
  std::vector<VectorXcd> worst_g;
};

// Replays secrecy_rate with the eve-side IRS channels perturbed inside their
// declared balls (all eves jointly per sample). Sample 0 is the nominal
// point; later samples alternate sphere and interior points by index parity.
WorstCaseSample worst_case_rate_mc(const VectorXcd& f1, const VectorXcd& f2,
                                   const VectorXd& theta, const ChannelSet& ch,
                                   const SystemConfig& cfg, const UncertaintyConfig& unc,
                                   int n_samples, std::uint64_t seed);

}  // namespace irsee
