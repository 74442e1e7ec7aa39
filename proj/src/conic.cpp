#include "conic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ipm.hpp"

namespace irsee::conic {

using detail::IpmDenseBlock;
using detail::IpmLpRow;
using detail::IpmProblem;
using detail::IpmResult;
using detail::SparseEntries;
using Eigen::VectorXd;

MatrixXd embed_hermitian(const MatrixXcd& h) {
  const int n = static_cast<int>(h.rows());
  MatrixXd e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = h.real();
  e.bottomRightCorner(n, n) = h.real();
  e.topRightCorner(n, n) = -h.imag();
  e.bottomLeftCorner(n, n) = h.imag();
  return e;
}

MatrixXcd unembed_hermitian(const MatrixXd& e) {
  const int n = static_cast<int>(e.rows()) / 2;
  MatrixXcd h(n, n);
  h.real() = 0.5 * (e.topLeftCorner(n, n) + e.bottomRightCorner(n, n));
  h.imag() = 0.5 * (e.bottomLeftCorner(n, n) - e.topRightCorner(n, n));
  return h;
}

namespace {

void check_hermitian(const MatrixXcd& a, const char* what) {
  if (a.rows() != a.cols()) throw std::invalid_argument(std::string(what) + ": not square");
  double dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (dev > 1e-9 * scale)
    throw std::invalid_argument(std::string(what) + ": not Hermitian (dev " + std::to_string(dev) +
                                ")");
}

}  // namespace

LinFunc& LinFunc::add(MatrixVar v, const MatrixXcd& coef) {
  check_hermitian(coef, "LinFunc coefficient");
  auto it = mat.find(v.id);
  if (it == mat.end())
    mat.emplace(v.id, coef);
  else
    it->second += coef;
  return *this;
}

LinFunc& LinFunc::add(ScalarVar v, double coef) {
  sca[v.id] += coef;
  return *this;
}

LmiExpr& LmiExpr::constant(const MatrixXcd& k) {
  check_hermitian(k, "LMI constant");
  if (k.rows() != dim) throw std::invalid_argument("LMI constant: wrong dimension");
  k0 += k;
  return *this;
}

LmiExpr& LmiExpr::add_scalar(ScalarVar v, const MatrixXcd& coef) {
  check_hermitian(coef, "LMI scalar coefficient");
  if (coef.rows() != dim) throw std::invalid_argument("LMI scalar coefficient: wrong dimension");
  scalar_terms.push_back({v.id, coef});
  return *this;
}

LmiExpr& LmiExpr::add_congruence(MatrixVar v, const MatrixXcd& p, double sign) {
  if (p.rows() != dim) throw std::invalid_argument("LMI congruence: wrong row count");
  congr_terms.push_back({v.id, p, sign});
  return *this;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal:
      return "optimal";
    case Status::infeasible:
      return "infeasible";
    case Status::unbounded:
      return "unbounded";
    case Status::iteration_limit:
      return "iteration_limit";
    default:
      return "numerical_error";
  }
}

MatrixVar Program::add_matrix_var(int dim) {
  if (dim < 1) throw std::invalid_argument("matrix variable dimension must be positive");
  mat_dims_.push_back(dim);
  return {static_cast<int>(mat_dims_.size()) - 1};
}

ScalarVar Program::add_scalar_var() {
  sca_lower_.push_back({false, 0.0});
  return {static_cast<int>(sca_lower_.size()) - 1};
}

ScalarVar Program::add_scalar_var(double lower_bound) {
  sca_lower_.push_back({true, lower_bound});
  return {static_cast<int>(sca_lower_.size()) - 1};
}

void Program::set_objective(LinFunc f) { objective_ = std::move(f); }

void Program::add_constraint(LinFunc f, Sense sense, double rhs) {
  constraints_.push_back({std::move(f), sense, rhs});
}

LmiExpr& Program::add_lmi(int dim) {
  if (dim < 1) throw std::invalid_argument("LMI dimension must be positive");
  LmiExpr e;
  e.dim = dim;
  e.k0 = MatrixXcd::Zero(dim, dim);
  lmis_.push_back(std::move(e));
  return lmis_.back();
}

double SolveResult::value(const LinFunc& f) const {
  double acc = f.c;
  for (const auto& [id, a] : f.mat)
    acc += (a.adjoint() * matrix_values.at(id)).trace().real();
  for (const auto& [id, c] : f.sca) acc += c * scalar_values.at(id);
  return acc;
}

// ---------------------------------------------------------------------------
// assembly: complex program -> real-embedded block form for the IPM

struct Assembly {
  const Program& prog;

  // coordinate layout: per matrix var, dim diagonal coords then (re, im) pairs
  // for p < q in lexicographic order; scalar vars after all matrix coords.
  std::vector<int> mat_offset;
  int sca_offset = 0;
  int n_coords = 0;

  std::vector<char> fixed;
  std::vector<double> fixed_val;

  explicit Assembly(const Program& p) : prog(p) {
    mat_offset.resize(p.mat_dims_.size());
    int off = 0;
    for (size_t k = 0; k < p.mat_dims_.size(); ++k) {
      mat_offset[k] = off;
      off += p.mat_dims_[k] * p.mat_dims_[k];
    }
    sca_offset = off;
    n_coords = off + static_cast<int>(p.sca_lower_.size());
    fixed.assign(n_coords, 0);
    fixed_val.assign(n_coords, 0.0);
  }

  int dim_of(int var) const { return prog.mat_dims_[var]; }

  int coord_diag(int var, int p) const { return mat_offset[var] + p; }
  int coord_off(int var, int p, int q, bool imag) const {
    int n = dim_of(var);
    int idx = (p * (2 * n - p - 1)) / 2 + (q - p - 1);
    return mat_offset[var] + n + 2 * idx + (imag ? 1 : 0);
  }
  int coord_scalar(int id) const { return sca_offset + id; }

  // dense coefficient vector of a functional
  VectorXd coef_vector(const LinFunc& f) const {
    VectorXd c = VectorXd::Zero(n_coords);
    for (const auto& [id, a] : f.mat) {
      int n = dim_of(id);
      if (a.rows() != n) throw std::invalid_argument("functional coefficient: wrong dimension");
      for (int p = 0; p < n; ++p) c[coord_diag(id, p)] += a(p, p).real();
      for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
          c[coord_off(id, p, q, false)] += 2.0 * a(p, q).real();
          c[coord_off(id, p, q, true)] += 2.0 * a(p, q).imag();
        }
    }
    for (const auto& [id, b] : f.sca) c[coord_scalar(id)] += b;
    return c;
  }

  // complex Hermitian basis matrix of a matrix-var coordinate
  MatrixXcd basis_of(int var, int local) const {
    int n = dim_of(var);
    MatrixXcd b = MatrixXcd::Zero(n, n);
    if (local < n) {
      b(local, local) = 1.0;
    } else {
      int idx = (local - n) / 2;
      bool imag = ((local - n) % 2) != 0;
      int p = 0;
      int row_len = n - 1;
      while (idx >= row_len) {
        idx -= row_len;
        ++p;
        --row_len;
      }
      int q = p + 1 + idx;
      if (!imag) {
        b(p, q) = 1.0;
        b(q, p) = 1.0;
      } else {
        b(p, q) = std::complex<double>(0.0, 1.0);
        b(q, p) = std::complex<double>(0.0, -1.0);
      }
    }
    return b;
  }

  // embedded sparse entries of a matrix-var coordinate within its own block
  SparseEntries embedded_basis_entries(int var, int local) const {
    int n = dim_of(var);
    SparseEntries e;
    if (local < n) {
      e.add(local, local, 1.0);
      e.add(n + local, n + local, 1.0);
    } else {
      int idx = (local - n) / 2;
      bool imag = ((local - n) % 2) != 0;
      int p = 0;
      int row_len = n - 1;
      while (idx >= row_len) {
        idx -= row_len;
        ++p;
        --row_len;
      }
      int q = p + 1 + idx;
      if (!imag) {
        e.add(p, q, 1.0);
        e.add(q, p, 1.0);
        e.add(n + p, n + q, 1.0);
        e.add(n + q, n + p, 1.0);
      } else {
        e.add(p, n + q, -1.0);
        e.add(q, n + p, 1.0);
        e.add(n + p, q, 1.0);
        e.add(n + q, p, -1.0);
      }
    }
    return e;
  }
};

namespace {

struct BuiltProblem {
  IpmProblem ipm;
  std::vector<int> coord_of_var;  // ipm var index -> coordinate index
  bool trivially_infeasible = false;
  bool trivially_unbounded = false;
  std::string note;
};

// fix single-coordinate equalities, reject contradictions
bool presolve_fix(const Assembly& asmb, std::vector<std::pair<VectorXd, double>>& eqs,
                  std::vector<char>& fixed, std::vector<double>& fixed_val, std::string& note) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [c, rhs] : eqs) {
      int nz = -1;
      int count = 0;
      double adj = rhs;
      for (int i = 0; i < asmb.n_coords; ++i) {
        if (c[i] == 0.0) continue;
        if (fixed[i]) {
          adj -= c[i] * fixed_val[i];
          continue;
        }
        ++count;
        nz = i;
      }
      if (count == 0) {
        if (std::abs(adj) > 1e-8 * (1.0 + std::abs(rhs))) {
          note = "inconsistent equality constraints";
          return false;
        }
        c.setZero();
        rhs = 0.0;  // consumed
        continue;
      }
      if (count == 1) {
        double val = adj / c[nz];
        fixed[nz] = 1;
        fixed_val[nz] = val;
        c.setZero();
        rhs = 0.0;  // consumed
        changed = true;
      }
    }
  }
  // anything left needs the general elimination path
  return true;
}

}  // namespace

namespace {

BuiltProblem build_ipm_problem(const Program& prog, const std::vector<LmiExpr>& lmis,
                               const Assembly& asmb, const std::vector<char>& fixed,
                               const std::vector<double>& fixed_val, const VectorXd& obj_coef,
                               const std::vector<std::pair<VectorXd, double>>& ineqs,
                               bool phase_one,
                               const std::vector<char>* eq_touched = nullptr) {
  BuiltProblem out;
  const int nc = asmb.n_coords;

  std::vector<int> var_of_coord(nc, -1);
  for (int i = 0; i < nc; ++i)
    if (!fixed[i]) {
      var_of_coord[i] = static_cast<int>(out.coord_of_var.size());
      out.coord_of_var.push_back(i);
    }
  int m = static_cast<int>(out.coord_of_var.size());
  int tau = -1;
  if (phase_one) {
    tau = m;
    ++m;
  }
  out.ipm.m = m;
  out.ipm.b = VectorXd::Zero(m);
  if (phase_one) {
    out.ipm.b[tau] = 1.0;
  } else {
    for (int i = 0; i < nc; ++i)
      if (!fixed[i]) out.ipm.b[var_of_coord[i]] = obj_coef[i];
  }

  // PSD block per matrix variable
  for (int k = 0; k < prog.n_matrix_vars(); ++k) {
    int n = prog.matrix_dim(k);
    IpmDenseBlock blk;
    blk.dim = 2 * n;
    blk.f0 = MatrixXd::Zero(2 * n, 2 * n);
    for (int local = 0; local < n * n; ++local) {
      int coord = asmb.mat_offset[k] + local;
      SparseEntries ents = asmb.embedded_basis_entries(k, local);
      if (fixed[coord]) {
        for (size_t e = 0; e < ents.size(); ++e)
          blk.f0(ents.r[e], ents.c[e]) += fixed_val[coord] * ents.v[e];
      } else {
        blk.sparse_terms.emplace_back(var_of_coord[coord], std::move(ents));
      }
    }
    if (phase_one) {
      SparseEntries ents;
      for (int d = 0; d < 2 * n; ++d) ents.add(d, d, -1.0);
      blk.sparse_terms.emplace_back(tau, std::move(ents));
    }
    out.ipm.blocks.push_back(std::move(blk));
  }

  // LMI blocks
  for (const auto& lmi : lmis) {
    int d = lmi.dim;
    IpmDenseBlock blk;
    blk.dim = 2 * d;
    blk.f0 = embed_hermitian(lmi.k0);
    std::map<int, MatrixXcd> coef;  // coordinate -> complex coefficient
    for (const auto& st : lmi.scalar_terms) {
      int coord = asmb.coord_scalar(st.var);
      auto it = coef.find(coord);
      if (it == coef.end())
        coef.emplace(coord, st.coef);
      else
        it->second += st.coef;
    }
    for (const auto& ct : lmi.congr_terms) {
      int n = asmb.dim_of(ct.var);
      if (ct.p.cols() != n) throw std::invalid_argument("LMI congruence: wrong column count");
      for (int p = 0; p < n; ++p) {
        MatrixXcd cpp = ct.sign * ct.p.col(p) * ct.p.col(p).adjoint();
        int coord = asmb.coord_diag(ct.var, p);
        auto it = coef.find(coord);
        if (it == coef.end())
          coef.emplace(coord, cpp);
        else
          it->second += cpp;
      }
      for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
          MatrixXcd re_c = ct.sign * (ct.p.col(p) * ct.p.col(q).adjoint() +
                                      ct.p.col(q) * ct.p.col(p).adjoint());
          MatrixXcd im_c = ct.sign * (std::complex<double>(0, 1) *
                                          (ct.p.col(p) * ct.p.col(q).adjoint()) -
                                      std::complex<double>(0, 1) *
                                          (ct.p.col(q) * ct.p.col(p).adjoint()));
          int cre = asmb.coord_off(ct.var, p, q, false);
          int cim = asmb.coord_off(ct.var, p, q, true);
          auto add = [&](int coord, MatrixXcd mc) {
            auto it = coef.find(coord);
            if (it == coef.end())
              coef.emplace(coord, std::move(mc));
            else
              it->second += mc;
          };
          add(cre, std::move(re_c));
          add(cim, std::move(im_c));
        }
    }
    for (auto& [coord, mc] : coef) {
      if (fixed[coord]) {
        blk.f0 += fixed_val[coord] * embed_hermitian(mc);
      } else {
        MatrixXd em = embed_hermitian(mc);
        int nnz = 0;
        for (int r = 0; r < em.rows(); ++r)
          for (int cc = 0; cc < em.cols(); ++cc)
            if (em(r, cc) != 0.0) ++nnz;
        if (nnz <= 8) {
          SparseEntries ents;
          for (int r = 0; r < em.rows(); ++r)
            for (int cc = 0; cc < em.cols(); ++cc)
              if (em(r, cc) != 0.0) ents.add(r, cc, em(r, cc));
          blk.sparse_terms.emplace_back(var_of_coord[coord], std::move(ents));
        } else {
          blk.dense_terms.emplace_back(var_of_coord[coord], std::move(em));
        }
      }
    }
    if (phase_one) {
      SparseEntries ents;
      for (int dd = 0; dd < 2 * d; ++dd) ents.add(dd, dd, -1.0);
      blk.sparse_terms.emplace_back(tau, std::move(ents));
    }
    out.ipm.blocks.push_back(std::move(blk));
  }

  // linear inequality rows (already normalized to f0 + coef.u >= 0)
  for (const auto& [c, f0] : ineqs) {
    IpmLpRow row;
    row.f0 = f0;
    for (int i = 0; i < nc; ++i) {
      if (c[i] == 0.0) continue;
      if (fixed[i])
        row.f0 += c[i] * fixed_val[i];
      else {
        row.var.push_back(var_of_coord[i]);
        row.coef.push_back(c[i]);
      }
    }
    if (phase_one) {
      row.var.push_back(tau);
      row.coef.push_back(-1.0);
    }
    if (row.var.empty()) {
      if (row.f0 < -1e-9) out.trivially_infeasible = true;
      continue;
    }
    out.ipm.lp.push_back(std::move(row));
  }
  if (phase_one) {
    IpmLpRow cap;
    cap.f0 = 1.0;
    cap.var.push_back(tau);
    cap.coef.push_back(-1.0);
    out.ipm.lp.push_back(std::move(cap));
  }

  // coverage check: every variable must touch at least one block or row
  std::vector<char> seen(m, 0);
  if (eq_touched)
    for (int i = 0; i < nc; ++i)
      if (!fixed[i] && (*eq_touched)[i]) seen[var_of_coord[i]] = 1;
  for (const auto& blk : out.ipm.blocks) {
    for (const auto& [vi, e] : blk.sparse_terms) seen[vi] = 1;
    for (const auto& [vi, mtx] : blk.dense_terms) seen[vi] = 1;
  }
  for (const auto& row : out.ipm.lp)
    for (int vi : row.var) seen[vi] = 1;
  for (int i = 0; i < m; ++i)
    if (!seen[i]) {
      if (out.ipm.b[i] != 0.0) {
        out.trivially_unbounded = true;
        out.note = "unconstrained variable with nonzero objective coefficient";
      } else {
        // pin it so the Schur complement stays nonsingular
        IpmLpRow lo, hi;
        lo.f0 = 1.0;
        lo.var.push_back(i);
        lo.coef.push_back(1.0);
        hi.f0 = 1.0;
        hi.var.push_back(i);
        hi.coef.push_back(-1.0);
        out.ipm.lp.push_back(lo);
        out.ipm.lp.push_back(hi);
      }
    }
  return out;
}

}  // namespace

SolveResult Program::solve(const SolveOptions& opt) const {
  Assembly asmb(*this);
  SolveResult res;

  std::vector<char> fixed(asmb.n_coords, 0);
  std::vector<double> fixed_val(asmb.n_coords, 0.0);

  // normalized rows: inequalities as f0 + c.u >= 0, equalities separately
  std::vector<std::pair<VectorXd, double>> ineqs;
  std::vector<std::pair<VectorXd, double>> eqs;
  for (const auto& con : constraints_) {
    VectorXd c = asmb.coef_vector(con.f);
    double shift = con.f.c - con.rhs;  // f(u) - rhs = c.u + shift
    switch (con.sense) {
      case Sense::le:
        ineqs.emplace_back(-c, -shift);
        break;
      case Sense::ge:
        ineqs.emplace_back(c, shift);
        break;
      case Sense::eq:
        eqs.emplace_back(c, -shift);  // c.u = -shift
        break;
    }
  }
  for (size_t i = 0; i < sca_lower_.size(); ++i)
    if (sca_lower_[i].first) {
      VectorXd c = VectorXd::Zero(asmb.n_coords);
      c[asmb.coord_scalar(static_cast<int>(i))] = 1.0;
      ineqs.emplace_back(c, -sca_lower_[i].second);
    }

  std::string note;
  if (!presolve_fix(asmb, eqs, fixed, fixed_val, note)) {
    res.status = Status::infeasible;
    res.message = note;
    return res;
  }
  // leftover multi-coordinate equalities: keep as paired rows is not viable in
  // interior-point form, so eliminate through a dense null-space basis
  std::vector<std::pair<VectorXd, double>> live_eqs;
  for (auto& [c, rhs] : eqs)
    if (c.cwiseAbs().maxCoeff() > 0.0) live_eqs.emplace_back(c, rhs);

  VectorXd obj = asmb.coef_vector(objective_);

  SolveResult out;
  auto finish = [&](const VectorXd& coord_vals, const IpmResult& ir) {
    out.status = ir.status;
    out.iterations = ir.iters;
    out.duality_gap = ir.rel_gap;
    out.message = ir.message;
    out.matrix_values.clear();
    out.scalar_values.clear();
    for (int k = 0; k < n_matrix_vars(); ++k) {
      int n = matrix_dim(k);
      MatrixXcd x(n, n);
      for (int p = 0; p < n; ++p) x(p, p) = coord_vals[asmb.coord_diag(k, p)];
      for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
          std::complex<double> v(coord_vals[asmb.coord_off(k, p, q, false)],
                                 coord_vals[asmb.coord_off(k, p, q, true)]);
          x(p, q) = v;
          x(q, p) = std::conj(v);
        }
      out.matrix_values.push_back(std::move(x));
    }
    for (int i = 0; i < n_scalar_vars(); ++i)
      out.scalar_values.push_back(coord_vals[asmb.coord_scalar(i)]);
    out.objective = out.value(objective_);
    double viol = 0.0;
    for (const auto& con : constraints_) {
      double val = out.value(con.f);
      if (con.sense == Sense::le) viol = std::max(viol, val - con.rhs);
      if (con.sense == Sense::ge) viol = std::max(viol, con.rhs - val);
      if (con.sense == Sense::eq) viol = std::max(viol, std::abs(val - con.rhs));
    }
    for (const auto& lmi : lmis_) {
      MatrixXcd val = lmi.k0;
      for (const auto& st : lmi.scalar_terms) val += out.scalar_values[st.var] * st.coef;
      for (const auto& ct : lmi.congr_terms)
        val += ct.sign * ct.p * out.matrix_values[ct.var] * ct.p.adjoint();
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(val, Eigen::EigenvaluesOnly);
      viol = std::max(viol, -es.eigenvalues()(0));
    }
    for (int k = 0; k < n_matrix_vars(); ++k) {
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(out.matrix_values[k], Eigen::EigenvaluesOnly);
      viol = std::max(viol, -es.eigenvalues()(0));
    }
    out.max_violation = viol;
  };

  if (live_eqs.empty()) {
    BuiltProblem bp = build_ipm_problem(*this, lmis_, asmb, fixed, fixed_val, obj, ineqs, false);
    if (bp.trivially_infeasible) {
      out.status = Status::infeasible;
      out.message = "contradictory constant constraint";
      return out;
    }
    if (bp.trivially_unbounded) {
      out.status = Status::unbounded;
      out.message = bp.note;
      return out;
    }
    IpmResult ir = detail::solve_ipm(bp.ipm, opt);
    VectorXd coord_vals = VectorXd::Zero(asmb.n_coords);
    for (int i = 0; i < asmb.n_coords; ++i)
      if (fixed[i]) coord_vals[i] = fixed_val[i];
    for (size_t j = 0; j < bp.coord_of_var.size(); ++j)
      coord_vals[bp.coord_of_var[j]] = ir.u[static_cast<int>(j)];
    finish(coord_vals, ir);
    if (ir.status == Status::iteration_limit || ir.status == Status::numerical_error) {
      // certify feasibility separately so the caller can trust "infeasible"
      BuiltProblem p1 = build_ipm_problem(*this, lmis_, asmb, fixed, fixed_val, obj, ineqs, true);
      SolveOptions p1opt = opt;
      p1opt.max_iters = 100;
      IpmResult fr = detail::solve_ipm(p1.ipm, p1opt);
      if (fr.status == Status::optimal && fr.dual_obj < -1e-7) {
        out.status = Status::infeasible;
        out.message = "phase-1 margin " + std::to_string(fr.dual_obj);
      }
    }
    return out;
  }

  // general equality elimination: u = u0 + Z v over the free coordinates
  std::vector<int> free_idx;
  for (int i = 0; i < asmb.n_coords; ++i)
    if (!fixed[i]) free_idx.push_back(i);
  const int nf = static_cast<int>(free_idx.size());
  MatrixXd emat(live_eqs.size(), nf);
  VectorXd erhs(live_eqs.size());
  for (size_t r = 0; r < live_eqs.size(); ++r) {
    double adj = live_eqs[r].second;
    for (int j = 0; j < nf; ++j) emat(static_cast<int>(r), j) = live_eqs[r].first[free_idx[j]];
    for (int i = 0; i < asmb.n_coords; ++i)
      if (fixed[i]) adj -= live_eqs[r].first[i] * fixed_val[i];
    erhs[static_cast<int>(r)] = adj;
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(emat);
  VectorXd u0 = cod.solve(erhs);
  if ((emat * u0 - erhs).cwiseAbs().maxCoeff() > 1e-7 * (1.0 + erhs.cwiseAbs().maxCoeff())) {
    out.status = Status::infeasible;
    out.message = "inconsistent equality system";
    return out;
  }
  Eigen::FullPivLU<MatrixXd> lu(emat);
  lu.setThreshold(1e-10);
  MatrixXd kernel = lu.kernel();
  if (kernel.cols() == 1 && kernel.cwiseAbs().maxCoeff() == 0.0) kernel.resize(nf, 0);

  // reparameterized program is built directly at the IPM level: every original
  // functional/block coefficient is recombined through (u0, Z)
  std::vector<char> eq_touched(asmb.n_coords, 0);
  for (const auto& [c, rhs] : live_eqs)
    for (int i = 0; i < asmb.n_coords; ++i)
      if (c[i] != 0.0) eq_touched[i] = 1;
  BuiltProblem bp =
      build_ipm_problem(*this, lmis_, asmb, fixed, fixed_val, obj, ineqs, false, &eq_touched);
  if (bp.trivially_infeasible || bp.trivially_unbounded) {
    out.status = bp.trivially_infeasible ? Status::infeasible : Status::unbounded;
    out.message = bp.note;
    return out;
  }
  IpmProblem red;
  const int mv = static_cast<int>(kernel.cols());
  red.m = mv;
  red.b = kernel.transpose() * bp.ipm.b;
  auto densify = [&](const IpmDenseBlock& blk) {
    std::vector<MatrixXd> per_var(bp.ipm.m, MatrixXd());
    MatrixXd f0 = blk.f0;
    for (const auto& [vi, ents] : blk.sparse_terms) {
      MatrixXd mtx = MatrixXd::Zero(blk.dim, blk.dim);
      for (size_t e = 0; e < ents.size(); ++e) mtx(ents.r[e], ents.c[e]) += ents.v[e];
      if (per_var[vi].size() == 0)
        per_var[vi] = std::move(mtx);
      else
        per_var[vi] += mtx;
    }
    for (const auto& [vi, mtx] : blk.dense_terms) {
      if (per_var[vi].size() == 0)
        per_var[vi] = mtx;
      else
        per_var[vi] += mtx;
    }
    IpmDenseBlock nb;
    nb.dim = blk.dim;
    nb.f0 = f0;
    for (int i = 0; i < bp.ipm.m; ++i)
      if (per_var[i].size() != 0) nb.f0 += u0[i] * per_var[i];
    for (int j = 0; j < mv; ++j) {
      MatrixXd acc = MatrixXd::Zero(blk.dim, blk.dim);
      bool any = false;
      for (int i = 0; i < bp.ipm.m; ++i)
        if (per_var[i].size() != 0 && kernel(i, j) != 0.0) {
          acc += kernel(i, j) * per_var[i];
          any = true;
        }
      if (any) nb.dense_terms.emplace_back(j, std::move(acc));
    }
    return nb;
  };
  for (const auto& blk : bp.ipm.blocks) red.blocks.push_back(densify(blk));
  for (const auto& row : bp.ipm.lp) {
    IpmLpRow nr;
    nr.f0 = row.f0;
    VectorXd c = VectorXd::Zero(bp.ipm.m);
    for (size_t k = 0; k < row.var.size(); ++k) c[row.var[k]] = row.coef[k];
    nr.f0 += c.dot(u0);
    VectorXd cz = kernel.transpose() * c;
    for (int j = 0; j < mv; ++j)
      if (cz[j] != 0.0) {
        nr.var.push_back(j);
        nr.coef.push_back(cz[j]);
      }
    if (!nr.var.empty())
      red.lp.push_back(std::move(nr));
    else if (nr.f0 < -1e-9) {
      out.status = Status::infeasible;
      out.message = "equalities contradict an inequality";
      return out;
    }
  }
  IpmResult ir = detail::solve_ipm(red, opt);
  VectorXd full = u0;
  if (mv > 0) full += kernel * ir.u;
  VectorXd coord_vals = VectorXd::Zero(asmb.n_coords);
  for (int i = 0; i < asmb.n_coords; ++i)
    if (fixed[i]) coord_vals[i] = fixed_val[i];
  for (size_t j = 0; j < bp.coord_of_var.size(); ++j)
    coord_vals[bp.coord_of_var[j]] = full[static_cast<int>(j)];
  finish(coord_vals, ir);
  return out;
}

void Program::dump(std::ostream& os) const {
  os << "conic-program\n";
  os << "matrix_vars " << mat_dims_.size() << "\n";
  for (size_t k = 0; k < mat_dims_.size(); ++k) os << "m" << k << " dim " << mat_dims_[k] << "\n";
  os << "scalar_vars " << sca_lower_.size() << "\n";
  for (size_t i = 0; i < sca_lower_.size(); ++i) {
    os << "s" << i;
    if (sca_lower_[i].first)
      os << " lb " << sca_lower_[i].second << "\n";
    else
      os << " free\n";
  }
  auto put_func = [&os](const LinFunc& f) {
    for (const auto& [id, a] : f.mat)
      for (int p = 0; p < a.rows(); ++p)
        for (int q = p; q < a.cols(); ++q)
          if (a(p, q) != 0.0)
            os << "  m" << id << " " << p << " " << q << " " << a(p, q).real() << " "
               << a(p, q).imag() << "\n";
    for (const auto& [id, b] : f.sca)
      if (b != 0.0) os << "  s" << id << " " << b << "\n";
    if (f.c != 0.0) os << "  const " << f.c << "\n";
  };
  os << "objective maximize\n";
  put_func(objective_);
  os << "constraints " << constraints_.size() << "\n";
  for (const auto& con : constraints_) {
    os << (con.sense == Sense::le ? "le" : con.sense == Sense::ge ? "ge" : "eq") << " rhs "
       << con.rhs << "\n";
    put_func(con.f);
  }
  os << "lmi_blocks " << lmis_.size() << "\n";
  for (const auto& lmi : lmis_) {
    os << "lmi dim " << lmi.dim << " scalar_terms " << lmi.scalar_terms.size()
       << " congruences " << lmi.congr_terms.size() << "\n";
    for (int p = 0; p < lmi.dim; ++p)
      for (int q = p; q < lmi.dim; ++q)
        if (lmi.k0(p, q) != 0.0)
          os << "  k0 " << p << " " << q << " " << lmi.k0(p, q).real() << " "
             << lmi.k0(p, q).imag() << "\n";
  }
}

}  // namespace irsee::conic
