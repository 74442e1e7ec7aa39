#include "solver_common.hpp"

#include <algorithm>
#include <cmath>

namespace irsee::solver {

const char* to_string(SolutionStatus s) {
  switch (s) {
    case SolutionStatus::optimal: return "optimal";
    case SolutionStatus::infeasible: return "infeasible";
    case SolutionStatus::iteration_limit: return "iteration_limit";
    case SolutionStatus::failed: return "failed";
  }
  return "?";
}

DinkelbachResult dinkelbach(
    const std::function<std::optional<std::pair<double, double>>(double)>& solve_inner,
    double tol, int max_iters, double eta0) {
  DinkelbachResult out;
  out.eta = eta0;
  out.eta_trace.push_back(eta0);
  for (int it = 0; it < max_iters; ++it) {
    out.iterations = it + 1;
    auto nd = solve_inner(out.eta);
    if (!nd) return out;  // infeasible subproblem, not converged
    auto [num, den] = *nd;
    if (!(den > 0.0)) throw std::runtime_error("dinkelbach: non-positive denominator");
    out.residual = std::abs(num - out.eta * den);
    // with an inexact maximizer the measured ratio can dip below the incumbent
    // on a flat objective, so the update is safeguarded to keep eta monotone
    out.eta = std::max(out.eta, num / den);
    out.eta_trace.push_back(out.eta);
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

int LogEnvelope::add_term(conic::LinFunc arg) {
  Term t;
  t.arg = std::move(arg);
  t.tangents = {1.0};
  terms_.push_back(std::move(t));
  return static_cast<int>(terms_.size()) - 1;
}

void LogEnvelope::attach(conic::Program& p) {
  for (Term& t : terms_) {
    conic::ScalarVar r = p.add_scalar_var();
    t.r_var = r.id;
    for (double a : t.tangents) {
      // r <= ln(a) + (arg - a)/a, rearranged to keep the rhs constant
      conic::LinFunc f;
      f.add(r, 1.0);
      axpy(-1.0 / a, t.arg, f);
      p.add_constraint(std::move(f), conic::Sense::le, std::log(a) - 1.0);
    }
  }
}

conic::LinFunc LogEnvelope::r_func(int term) const {
  conic::LinFunc f;
  f.add(conic::ScalarVar{terms_.at(term).r_var}, 1.0);
  return f;
}

double LogEnvelope::r_value(int term, const conic::SolveResult& res) const {
  return res.scalar_values.at(terms_.at(term).r_var);
}

double LogEnvelope::arg_value(int term, const conic::SolveResult& res) const {
  return res.value(terms_.at(term).arg);
}

double LogEnvelope::refine(const conic::SolveResult& res, double tol) {
  double worst = 0.0;
  for (Term& t : terms_) {
    double a = std::max(res.value(t.arg), 1e-6);
    double gap = res.scalar_values.at(t.r_var) - std::log(a);
    worst = std::max(worst, gap);
    if (gap <= tol) continue;
    // tangents closer than 1e-5 relative leave an envelope error around 1e-11,
    // far below any gap worth cutting, and near-duplicate rows degrade the
    // interior-point iteration badly
    bool seen = false;
    for (double b : t.tangents)
      if (std::abs(b - a) <= 1e-5 * std::max(1.0, a)) seen = true;
    if (!seen && t.tangents.size() < 80) t.tangents.push_back(a);
  }
  return worst;
}

void axpy(double alpha, const conic::LinFunc& x, conic::LinFunc& y) {
  for (const auto& [id, m] : x.mat) {
    auto it = y.mat.find(id);
    if (it == y.mat.end())
      y.mat[id] = alpha * m;
    else
      it->second += alpha * m;
  }
  for (const auto& [id, v] : x.sca) y.sca[id] += alpha * v;
  y.c += alpha * x.c;
}

std::optional<VectorXcd> dominant_rank_one(const MatrixXcd& X, double tol) {
  const int n = static_cast<int>(X.rows());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(X);
  VectorXd ev = eig.eigenvalues();  // ascending
  double l1 = std::max(ev[n - 1], 0.0);
  double l2 = n > 1 ? std::max(ev[n - 2], 0.0) : 0.0;
  if (l1 <= 0.0) return VectorXcd::Zero(n);
  if (l2 / l1 <= tol) return VectorXcd(std::sqrt(l1) * eig.eigenvectors().col(n - 1));
  return std::nullopt;
}

MatrixXcd covariance_root(const MatrixXcd& X) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(X);
  MatrixXcd root = eig.eigenvectors();
  for (int i = 0; i < X.rows(); ++i)
    root.col(i) *= std::sqrt(std::max(eig.eigenvalues()[i], 0.0));
  return root;
}

VectorXcd recover_rank_one(const MatrixXcd& X, double rank_one_tol,
                           const std::function<VectorXcd(const VectorXcd&)>& project,
                           const std::function<bool(const VectorXcd&)>& feasible,
                           const std::function<double(const VectorXcd&)>& objective,
                           int n_trials, std::uint64_t seed) {
  const int n = static_cast<int>(X.rows());
  if (auto direct = dominant_rank_one(X, rank_one_tol)) return *direct;

  MatrixXcd root = covariance_root(X);
  detail::GaussianStream g(seed);
  bool found = false;
  double best = 0.0;
  VectorXcd winner;
  for (int trial = 0; trial < n_trials; ++trial) {
    VectorXcd cand = project(root * g.cn01_vector(n));
    if (!feasible(cand)) continue;
    double val = objective(cand);
    if (!found || val > best) {
      found = true;
      best = val;
      winner = cand;
    }
  }
  if (!found) throw RandomizationFailed("rank-one recovery: no feasible randomization trial");
  return winner;
}

std::function<VectorXcd(const VectorXcd&)> project_to_power(double power) {
  return [power](const VectorXcd& z) -> VectorXcd {
    double n2 = z.squaredNorm();
    if (n2 <= 0.0) return z;
    return std::sqrt(power / n2) * z;
  };
}

std::function<VectorXcd(const VectorXcd&)> project_to_unit_modulus() {
  return [](const VectorXcd& z) -> VectorXcd {
    VectorXcd out(z.size());
    for (int i = 0; i < z.size(); ++i) {
      double m = std::abs(z[i]);
      out[i] = m > 0.0 ? z[i] / m : std::complex<double>(1.0, 0.0);
    }
    return out;
  };
}

VectorXd extract_phases(const VectorXcd& w_bar) {
  const int m = static_cast<int>(w_bar.size()) - 1;
  std::complex<double> ref = w_bar[m];
  if (std::abs(ref) == 0.0)
    throw std::invalid_argument("extract_phases: zero reference entry");
  VectorXd theta(m);
  for (int i = 0; i < m; ++i) theta[i] = std::arg(w_bar[i] / ref);
  return theta;
}

VectorXcd unit_weights(const VectorXd& theta) {
  VectorXcd w(theta.size() + 1);
  for (int i = 0; i < theta.size(); ++i) w[i] = std::polar(1.0, theta[i]);
  w[theta.size()] = 1.0;
  return w;
}

VectorXcd effective_beam_channel(const MatrixXcd& H_j, const VectorXcd& w_bar) {
  return (H_j.transpose() * w_bar).conjugate();
}

VectorXcd effective_phase_channel(const MatrixXcd& H_j, const VectorXcd& f) {
  return (H_j * f).conjugate();
}

}  // namespace irsee::solver
