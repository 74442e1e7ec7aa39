#include "metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace irsee {

namespace {

std::complex<double> combined_gain(const VectorXcd& direct, const VectorXcd& irs_side,
                                   const MatrixXcd& front, const VectorXd& theta,
                                   const VectorXcd& f) {
  std::complex<double> v = direct.dot(f);  // Eigen dot conjugates the left argument
  VectorXcd through = front * f;
  for (int i = 0; i < theta.size(); ++i)
    v += std::conj(irs_side[i]) * std::polar(1.0, theta[i]) * through[i];
  return v;
}

double sinr_with_eves(const VectorXcd& f1, const VectorXcd& f2, const VectorXd& theta,
                      const ChannelSet& ch, const SystemConfig& cfg, int receiver,
                      const std::vector<VectorXcd>& h_ie, const std::vector<VectorXcd>& g_ie) {
  if (f1.size() != ch.H_BI.cols() || f2.size() != ch.G_JI.cols())
    throw std::invalid_argument("sinr: beamformer length must match the antenna count");
  if (theta.size() != ch.H_BI.rows())
    throw std::invalid_argument("sinr: phase count must match the surface size");
  const VectorXcd& hb = receiver < 0 ? ch.h_BU : ch.h_BE.at(receiver);
  const VectorXcd& hi = receiver < 0 ? ch.h_IU : h_ie.at(receiver);
  const VectorXcd& gb = receiver < 0 ? ch.g_JU : ch.g_JE.at(receiver);
  const VectorXcd& gi = receiver < 0 ? ch.g_IU : g_ie.at(receiver);
  double sig = std::norm(combined_gain(hb, hi, ch.H_BI, theta, f1));
  double jam = std::norm(combined_gain(gb, gi, ch.G_JI, theta, f2));
  return sig / (jam + cfg.noise_power);
}

double rate_with_eves(const VectorXcd& f1, const VectorXcd& f2, const VectorXd& theta,
                      const ChannelSet& ch, const SystemConfig& cfg,
                      const std::vector<VectorXcd>& h_ie, const std::vector<VectorXcd>& g_ie) {
  double ru = cfg.bandwidth * std::log2(1.0 + sinr_with_eves(f1, f2, theta, ch, cfg, -1,
                                                             h_ie, g_ie));
  double re = 0.0;
  for (size_t k = 0; k < ch.h_BE.size(); ++k)
    re = std::max(re, cfg.bandwidth *
                          std::log2(1.0 + sinr_with_eves(f1, f2, theta, ch, cfg,
                                                         static_cast<int>(k), h_ie, g_ie)));
  return std::max(0.0, ru - re);
}

}  // namespace

double sinr(const VectorXcd& f1, const VectorXcd& f2, const VectorXd& theta,
            const ChannelSet& ch, const SystemConfig& cfg, int receiver) {
  return sinr_with_eves(f1, f2, theta, ch, cfg, receiver, ch.h_IE_bar, ch.g_IE_bar);
}

double secrecy_rate(const VectorXcd& f1, const VectorXcd& f2, const VectorXd& theta,
                    const ChannelSet& ch, const SystemConfig& cfg) {
  return rate_with_eves(f1, f2, theta, ch, cfg, ch.h_IE_bar, ch.g_IE_bar);
}

double total_power(const VectorXcd& f1, const VectorXcd& f2, const SystemConfig& cfg) {
  return cfg.zeta * (f1.squaredNorm() + f2.squaredNorm()) + cfg.p_bs + cfg.p_g + cfg.p_irs;
}

double energy_efficiency(const VectorXcd& f1, const VectorXcd& f2, const VectorXd& theta,
                         const ChannelSet& ch, const SystemConfig& cfg) {
  return secrecy_rate(f1, f2, theta, ch, cfg) / total_power(f1, f2, cfg);
}

SolutionMetrics evaluate_solution(const VectorXcd& f1, const VectorXcd& f2,
                                  const VectorXd& theta, const ChannelSet& ch,
                                  const SystemConfig& cfg) {
  SolutionMetrics m;
  m.gamma_u = sinr(f1, f2, theta, ch, cfg, -1);
  m.r_u = cfg.bandwidth * std::log2(1.0 + m.gamma_u);
  m.r_e_max = 0.0;
  for (size_t k = 0; k < ch.h_BE.size(); ++k) {
    m.gamma_e.push_back(sinr(f1, f2, theta, ch, cfg, static_cast<int>(k)));
    m.r_e_max = std::max(m.r_e_max, cfg.bandwidth * std::log2(1.0 + m.gamma_e.back()));
  }
  m.r_s = std::max(0.0, m.r_u - m.r_e_max);
  m.p_tot = total_power(f1, f2, cfg);
  m.ee = m.r_s / m.p_tot;
  return m;
}

WorstCaseSample worst_case_rate_mc(const VectorXcd& f1, const VectorXcd& f2,
                                   const VectorXd& theta, const ChannelSet& ch,
                                   const SystemConfig& cfg, const UncertaintyConfig& unc,
                                   int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("worst_case_rate_mc: need n_samples >= 1");
  const int k = static_cast<int>(ch.h_IE_bar.size());
  WorstCaseSample out;
  out.min_rate = rate_with_eves(f1, f2, theta, ch, cfg, ch.h_IE_bar, ch.g_IE_bar);
  out.argmin_sample = 0;
  out.worst_h = ch.h_IE_bar;
  out.worst_g = ch.g_IE_bar;
  std::vector<VectorXcd> h(k), g(k);
  for (int s = 1; s < n_samples; ++s) {
    for (int e = 0; e < k; ++e) {
      auto sub = [&](std::uint64_t slot) {
        std::uint64_t mix = seed ^ (static_cast<std::uint64_t>(s) * 0x2545F4914F6CDD1Dull) ^
                            (slot * 0x9E3779B97F4A7C15ull);
        // parity steers sample_perturbation between sphere and interior draws
        return (mix & ~1ull) | static_cast<std::uint64_t>(s & 1);
      };
      h[e] = sample_perturbation(ch.h_IE_bar[e], unc.xi_ie.at(e), sub(2 * e + 1));
      g[e] = sample_perturbation(ch.g_IE_bar[e], unc.xi_je.at(e), sub(2 * e + 2));
    }
    double r = rate_with_eves(f1, f2, theta, ch, cfg, h, g);
    if (r < out.min_rate) {
      out.min_rate = r;
      out.argmin_sample = s;
      out.worst_h = h;
      out.worst_g = g;
    }
  }
  return out;
}

}  // namespace irsee
