#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace irsee::conic {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

// Real symmetric embedding of a Hermitian matrix: H -> [[Re H, -Im H], [Im H, Re H]].
// Preserves positive semidefiniteness; every eigenvalue of H appears twice.
// Inner products carry a factor 2: tr(A^H B) = 0.5 * tr(E(A)^T E(B)).
MatrixXd embed_hermitian(const MatrixXcd& h);
MatrixXcd unembed_hermitian(const MatrixXd& e);

struct MatrixVar {
  int id = -1;
};
struct ScalarVar {
  int id = -1;
};

// Real-valued affine functional of the program variables:
//   sum_k tr(A_k^H X_k) + sum_i b_i s_i + c
// where each A_k is Hermitian so the value is real.
struct LinFunc {
  std::map<int, MatrixXcd> mat;
  std::map<int, double> sca;
  double c = 0.0;

  LinFunc& add(MatrixVar v, const MatrixXcd& coef);
  LinFunc& add(ScalarVar v, double coef);
  LinFunc& add(double constant) {
    c += constant;
    return *this;
  }
};

enum class Sense { le, ge, eq };

// Hermitian-matrix-valued affine expression constrained to be PSD:
//   K0 + sum_i s_i * H_i + sum_j sign_j * P_j X_j P_j^H  >= 0
struct LmiExpr {
  int dim = 0;
  MatrixXcd k0;

  struct ScalarTerm {
    int var;
    MatrixXcd coef;
  };
  struct CongrTerm {
    int var;
    MatrixXcd p;  // dim x (var dim)
    double sign;
  };
  std::vector<ScalarTerm> scalar_terms;
  std::vector<CongrTerm> congr_terms;

  LmiExpr& constant(const MatrixXcd& k);
  LmiExpr& add_scalar(ScalarVar v, const MatrixXcd& coef);
  LmiExpr& add_congruence(MatrixVar v, const MatrixXcd& p, double sign = 1.0);
};

enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical_error };
const char* to_string(Status s);

struct SolveOptions {
  double gap_tol = 1e-9;
  double feas_tol = 1e-9;
  // near the optimum the slack factorizations eventually break down; the best
  // iterate is still accepted as optimal if its summed scaled error is below
  // this bound
  double accept_tol = 1e-7;
  int max_iters = 150;
  bool verbose = false;
};

struct SolveResult {
  Status status = Status::numerical_error;
  double objective = 0.0;      // value of the maximized objective
  double duality_gap = 0.0;    // relative gap reported by the backend
  double max_violation = 0.0;  // worst constraint violation at the returned point
  int iterations = 0;
  std::string message;
  std::vector<MatrixXcd> matrix_values;
  std::vector<double> scalar_values;

  bool ok() const { return status == Status::optimal; }
  double value(const LinFunc& f) const;
};

// Maximization of a linear functional over Hermitian PSD matrix variables and
// scalar variables subject to affine (in)equalities and LMI blocks. Complex
// data is solved through the real embedding; block symmetry of the embedding
// holds by construction of the coordinate basis, so any PSD real solution maps
// back to a valid Hermitian one.
class Program {
 public:
  MatrixVar add_matrix_var(int dim);
  ScalarVar add_scalar_var();  // free
  ScalarVar add_scalar_var(double lower_bound);

  void set_objective(LinFunc f);
  void add_constraint(LinFunc f, Sense sense, double rhs);
  LmiExpr& add_lmi(int dim);

  SolveResult solve(const SolveOptions& opt = {}) const;
  void dump(std::ostream& os) const;

  int n_matrix_vars() const { return static_cast<int>(mat_dims_.size()); }
  int n_scalar_vars() const { return static_cast<int>(sca_lower_.size()); }
  int matrix_dim(int id) const { return mat_dims_.at(id); }

 private:
  struct Constraint {
    LinFunc f;
    Sense sense;
    double rhs;
  };

  std::vector<int> mat_dims_;
  std::vector<std::pair<bool, double>> sca_lower_;  // (has lower bound, value)
  LinFunc objective_;
  std::vector<Constraint> constraints_;
  std::vector<LmiExpr> lmis_;

  friend struct Assembly;
};

}  // namespace irsee::conic
