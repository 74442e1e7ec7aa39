#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "metrics.hpp"
#include "solver_common.hpp"

namespace irsee::solver {

// Noise-normalized rank-one trace matrices. For the beam subproblems the
// phase weights are frozen, so each receiver collapses to an effective vector
// channel h with tr(Hu F1) = a0 |h^H f1|^2 and the optimization runs over the
// lifted covariances F1 = f1 f1^H, F2 = f2 f2^H with the rank constraint
// dropped. a0 = 1/noise, folded into the matrices so every trace is a plain
// SNR and log arguments stay >= 1.
struct LiftedBeam {
  MatrixXcd Hu, Gu;              // N x N, signal/jamming toward the user
  std::vector<MatrixXcd> He, Ge;  // per-eve
};

// Phase-side counterpart: beams frozen, optimization over W = w_bar w_bar^H
// with unit diagonal. tr(Hwu W) = a0 |w_bar^T H_U f1|^2 and so on.
struct LiftedPhase {
  MatrixXcd Hwu, Gwu;              // (M+1) x (M+1)
  std::vector<MatrixXcd> Hwe, Gwe;
};

LiftedBeam lift_beam(const AugmentedChannels& ac, const VectorXcd& w_bar, double a0);
LiftedPhase lift_phase(const AugmentedChannels& ac, const VectorXcd& f1,
                       const VectorXcd& f2, double a0);

struct BeamSubState {
  MatrixXcd F1, F2;
  double t_u = 1.0;
  std::vector<double> t_e;
  double l = 0.0;     // slack dominating every eve surrogate
  double eta1 = 0.0;  // fractional-programming parameter, EE units
};

struct PhaseSubState {
  MatrixXcd W;
  double t_wu = 1.0;
  std::vector<double> t_we;
  double l_w = 0.0;
  double eta2 = 0.0;
};

// closed-form refresh of the concave-surrogate multipliers at the current
// covariances; denominators are >= 1 by normalization so t in (0, 1]
std::pair<double, std::vector<double>> update_t_perfect(const MatrixXcd& F1,
                                                        const MatrixXcd& F2,
                                                        const LiftedBeam& lb);
std::pair<double, std::vector<double>> update_t_phase(const MatrixXcd& W,
                                                      const LiftedPhase& lp);

// surrogate values in the true log domain (nats); at t = t* the user surrogate
// equals R_U ln2 / B and the minimized eve surrogate equals R_{E,k} ln2 / B
double phi_u(const MatrixXcd& F1, const MatrixXcd& F2, double t_u, const LiftedBeam& lb);
double phi_e(const MatrixXcd& F1, const MatrixXcd& F2, double t_e, const LiftedBeam& lb,
             int k);
double phi_wu(const MatrixXcd& W, double t_wu, const LiftedPhase& lp);
double phi_we(const MatrixXcd& W, double t_we, const LiftedPhase& lp, int k);

struct SubproblemOutcome {
  conic::Status status = conic::Status::numerical_error;
  double objective = 0.0;  // SDP objective at the last solve, cut domain
  double cut_gap = 0.0;    // worst log-cut overshoot at exit
  int rounds = 0;          // cutting-plane rounds used
};

// One beam-side SDP at fixed multipliers and eta1: maximize
//   phi_u - l - (ln2/B) eta1 (zeta tr(F1+F2) + circuit)
// over PSD F1, F2 within the power budgets, subject to the rate floor
// phi_u - l >= r_th ln2 / B and every eve surrogate below l. Log terms are
// handled by env (cuts refined in place until the overshoot is below an
// internal tolerance); env must be empty or previously used with the same lb.
// On success st.F1/F2/l are replaced; on failure st is left untouched.
SubproblemOutcome solve_beam_subproblem(BeamSubState& st, const LiftedBeam& lb,
                                        const SystemConfig& cfg, LogEnvelope& env);

// Phase-side SDP: maximize phi_wu - l_w - (ln2/B) eta2 p_tot over PSD W with
// unit diagonal, rate floor and eve caps as above. p_tot is constant here
// (beams are frozen) so it only shifts the objective.
SubproblemOutcome solve_phase_subproblem(PhaseSubState& st, const LiftedPhase& lp,
                                         const SystemConfig& cfg, double p_tot_w,
                                         LogEnvelope& env);

struct BlockOutcome {
  DinkelbachResult dink;
  conic::Status last_status = conic::Status::numerical_error;
  // at least one eta update landed, so the state moved and is usable even
  // when the iteration cap cut the loop short of the residual tolerance
  bool progressed = false;
  bool ok = false;
};

// Runs the fractional-programming loop for one block: refresh multipliers at
// the incumbent, solve the SDP at the current eta, update eta from the
// achieved numerator/denominator, repeat to tolerance, then refresh the
// multipliers once more at the final covariances.
BlockOutcome run_beam_block(BeamSubState& st, const LiftedBeam& lb,
                            const SystemConfig& cfg, const SolverOptions& opt);
BlockOutcome run_phase_block(PhaseSubState& st, const LiftedPhase& lp,
                             const SystemConfig& cfg, const SolverOptions& opt,
                             double p_tot_w);

// Surrogate ascent at zero power price: multiplier refresh plus one SDP at
// eta = 0, repeated until the surrogate secrecy value stalls or max_iters
// solves pass. Pure rate maximization, so there is no ratio loop. Used to
// restore a feasible start when the rate floor cuts off the initial beam
// subproblem, and by the rate-objective design.
BlockOutcome run_beam_rate_loop(BeamSubState& st, const LiftedBeam& lb,
                                const SystemConfig& cfg, int max_iters);
BlockOutcome run_phase_rate_loop(PhaseSubState& st, const LiftedPhase& lp,
                                 const SystemConfig& cfg, int max_iters);

// Restores the rate floor for a randomized beam pair: first scale the jamming
// power down a halving ladder, then grow the signal power by bisection within
// its budget. Returns the repaired pair, or empty when even the extremes miss
// r_th - 1e-6.
std::optional<std::pair<VectorXcd, VectorXcd>> repair_beam(
    const VectorXcd& f1, const VectorXcd& f2, const VectorXd& theta,
    const ChannelSet& ch, const SystemConfig& cfg);

// Joint rank-one recovery for the beam pair: eigenvector shortcut per matrix
// when nearly rank one, otherwise paired Gaussian draws; every candidate pair
// goes through repair_beam and the feasible pair with the best measured EE
// wins. Empty when no pair survives.
struct BeamPair {
  VectorXcd f1, f2;
  double ee = 0.0;
};
std::optional<BeamPair> recover_beam_pair(const MatrixXcd& F1, const MatrixXcd& F2,
                                          const VectorXd& theta, const ChannelSet& ch,
                                          const SystemConfig& cfg,
                                          const SolverOptions& opt, std::uint64_t seed);

// Alternating design under perfect CSI: beam block and phase block in turn,
// each accepted only when the measured EE does not drop, until the EE change
// falls below opt.outer_tol or opt.max_outer_iters rounds pass.
BeamformingSolution algorithm1(const Scenario& s, const ChannelSet& ch);

}  // namespace irsee::solver
