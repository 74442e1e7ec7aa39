#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "conic.hpp"

namespace irsee::conic::detail {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dual-form semidefinite program over real symmetric blocks:
//   maximize b^T u   s.t.   F0 + sum_i u_i F_i  PSD  (block diagonal)
// Dense blocks carry per-variable coefficient matrices (sparse entry lists for
// coordinate-basis terms, dense matrices otherwise). 1x1 blocks are collected
// into a single diagonal (LP) section.
struct SparseEntries {
  // full entry list of a symmetric matrix (both (r,c) and (c,r) present)
  std::vector<int> r, c;
  std::vector<double> v;
  void add(int rr, int cc, double vv) {
    r.push_back(rr);
    c.push_back(cc);
    v.push_back(vv);
  }
  size_t size() const { return v.size(); }
};

struct IpmDenseBlock {
  int dim = 0;
  MatrixXd f0;
  std::vector<std::pair<int, SparseEntries>> sparse_terms;
  std::vector<std::pair<int, MatrixXd>> dense_terms;
};

struct IpmLpRow {
  double f0 = 0.0;
  std::vector<int> var;
  std::vector<double> coef;
};

struct IpmProblem {
  int m = 0;
  VectorXd b;
  std::vector<IpmDenseBlock> blocks;
  std::vector<IpmLpRow> lp;
};

struct IpmResult {
  Status status = Status::numerical_error;
  VectorXd u;
  double dual_obj = 0.0;    // b^T u, the user-problem value
  double primal_obj = 0.0;  // <F0, X> certificate side
  double rel_gap = 0.0;
  int iters = 0;
  std::string message;
};

IpmResult solve_ipm(const IpmProblem& prob, const SolveOptions& opt);

}  // namespace irsee::conic::detail
