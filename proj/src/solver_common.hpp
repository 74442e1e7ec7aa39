#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "channel.hpp"
#include "conic.hpp"
#include "scenario.hpp"

namespace irsee::solver {

enum class SolutionStatus { optimal, infeasible, iteration_limit, failed };
const char* to_string(SolutionStatus s);

// one accepted outer round, scored by the metrics module (not solver algebra)
struct IterationRecord {
  int iteration = 0;
  double ee = 0.0;
  double r_s = 0.0;
  double p_tot = 0.0;
  std::string note;  // subproblem statuses for this round
};

struct BeamformingSolution {
  VectorXcd f1, f2;
  VectorXd theta;   // M phase angles
  VectorXcd w_bar;  // M+1 unit-modulus weights, trailing reference entry
  double ee = 0.0;
  double r_s = 0.0;
  double p_tot = 0.0;
  SolutionStatus status = SolutionStatus::failed;
  int outer_iterations = 0;
  std::vector<IterationRecord> trace;
  std::string message;
};

// ---------------------------------------------------------------------------
// fractional programming

struct DinkelbachResult {
  double eta = 0.0;
  double residual = 0.0;  // |N - eta D| at the accepted point
  int iterations = 0;
  bool converged = false;
  std::vector<double> eta_trace;
};

// Iterates eta <- N/D on the caller's parametric subproblem until the
// residual N - eta D falls below tol. solve_inner(eta) returns the achieved
// (numerator, denominator) at the subproblem optimum, or empty when the
// subproblem is infeasible (the driver then stops with converged = false).
// The denominator must stay positive; a non-positive one throws.
DinkelbachResult dinkelbach(
    const std::function<std::optional<std::pair<double, double>>(double)>& solve_inner,
    double tol, int max_iters, double eta0 = 0.0);

// ---------------------------------------------------------------------------
// hypograph of ln(affine) by accumulated tangent cuts

// The conic layer is purely linear, so each r <= ln(arg) is enforced by the
// envelope of tangents r <= ln(a) + (arg - a)/a collected at visited points.
// Arguments are normalized to be >= 1, so every slope is <= 1. Cuts are valid
// globally and persist across Dinkelbach iterations of one subproblem; a new
// envelope is built when the opposite block's variables change the channels.
class LogEnvelope {
 public:
  // registers r <= ln(arg); seeds the envelope with the tangent at 1
  int add_term(conic::LinFunc arg);
  int n_terms() const { return static_cast<int>(terms_.size()); }

  // adds one epigraph scalar per term plus all accumulated cuts to p
  void attach(conic::Program& p);

  // the term's epigraph variable as a functional (valid after attach)
  conic::LinFunc r_func(int term) const;
  double r_value(int term, const conic::SolveResult& res) const;
  double arg_value(int term, const conic::SolveResult& res) const;

  // appends tangents where r overshoots ln(arg) by more than tol;
  // returns the largest overshoot seen
  double refine(const conic::SolveResult& res, double tol);

 private:
  struct Term {
    conic::LinFunc arg;
    std::vector<double> tangents;
    int r_var = -1;
  };
  std::vector<Term> terms_;
};

// y += alpha * x over all coefficient maps
void axpy(double alpha, const conic::LinFunc& x, conic::LinFunc& y);

// ---------------------------------------------------------------------------
// rank-one recovery

struct RandomizationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// sqrt(lambda_1) u_1 when the second-to-first eigenvalue ratio is within tol
// (a numerically zero matrix yields the zero vector); empty otherwise
std::optional<VectorXcd> dominant_rank_one(const MatrixXcd& X, double tol);

// factor R with R R^H = X_+ for drawing CN(0, X) samples as R g
MatrixXcd covariance_root(const MatrixXcd& X);

// Near-rank-one X (second-to-first eigenvalue ratio within rank_one_tol)
// returns sqrt(lambda_1) u_1 directly. Otherwise draws n_trials Gaussian
// vectors with covariance X, maps each through project (e.g. rescale to the
// matrix power, or clamp to unit modulus), and keeps the feasible candidate
// with the best objective. Throws RandomizationFailed when no trial passes.
VectorXcd recover_rank_one(const MatrixXcd& X, double rank_one_tol,
                           const std::function<VectorXcd(const VectorXcd&)>& project,
                           const std::function<bool(const VectorXcd&)>& feasible,
                           const std::function<double(const VectorXcd&)>& objective,
                           int n_trials, std::uint64_t seed);

// draw rescaled so its squared norm equals tr(X)
std::function<VectorXcd(const VectorXcd&)> project_to_power(double power);
// every leading entry clamped to unit modulus, trailing entry too
std::function<VectorXcd(const VectorXcd&)> project_to_unit_modulus();

// ---------------------------------------------------------------------------
// phase handling

// theta_m = arg(w_m / w_{M+1}); the rebuilt unit-modulus vector reproduces
// w_bar up to one global phase. Throws on a vanishing reference entry.
VectorXd extract_phases(const VectorXcd& w_bar);

// [exp(j theta_1) .. exp(j theta_M), 1]
VectorXcd unit_weights(const VectorXd& theta);

// ---------------------------------------------------------------------------
// effective channels for the two subproblem families

// beam side: h with |h^H f|^2 = |w_bar^T H_j f|^2
VectorXcd effective_beam_channel(const MatrixXcd& H_j, const VectorXcd& w_bar);
// phase side: m with |w_bar^T (H_j f)|^2 = w_bar^H (m m^H) w_bar
VectorXcd effective_phase_channel(const MatrixXcd& H_j, const VectorXcd& f);

}  // namespace irsee::solver
