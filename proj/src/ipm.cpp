#include "ipm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace irsee::conic::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// tr(f * g) for symmetric f (dense or entry list) against a general square g
double trdot(const MatrixXd& f, const MatrixXd& g) {
  return (f.array() * g.transpose().array()).sum();
}

double trdot(const SparseEntries& f, const MatrixXd& g) {
  double acc = 0.0;
  for (size_t k = 0; k < f.size(); ++k) acc += f.v[k] * g(f.c[k], f.r[k]);
  return acc;
}

// largest alpha in (0, 1] with x + alpha*dx still PSD-interior; x must be PD
double max_step(const MatrixXd& x, const MatrixXd& dx) {
  Eigen::LLT<MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  MatrixXd l = llt.matrixL();
  MatrixXd w = l.triangularView<Eigen::Lower>().solve(dx);
  w = l.triangularView<Eigen::Lower>().solve(w.transpose().eval());
  w = 0.5 * (w + w.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(w, Eigen::EigenvaluesOnly);
  double lam = es.eigenvalues()(0);
  if (lam >= -1e-14) return kInf;
  return -1.0 / lam;
}

struct BlockVars {
  std::vector<MatrixXd> x, s;
  VectorXd lx, ls;  // lp section
};

}  // namespace

static IpmResult solve_ipm_core(const IpmProblem& prob, const SolveOptions& opt) {
  const int m = prob.m;
  const int nb = static_cast<int>(prob.blocks.size());
  const int nl = static_cast<int>(prob.lp.size());
  IpmResult res;
  res.u = VectorXd::Zero(m);
  if (m == 0) {
    res.status = Status::optimal;
    return res;
  }

  double ndim = 0.0;
  for (const auto& b : prob.blocks) ndim += b.dim;
  ndim += nl;

  // data scale per variable and for F0, used in residual normalization
  VectorXd fscale = VectorXd::Ones(m);
  double f0scale = 1.0;
  for (const auto& b : prob.blocks) {
    f0scale = std::max(f0scale, b.f0.cwiseAbs().maxCoeff());
    for (const auto& [vi, ents] : b.sparse_terms)
      for (double v : ents.v) fscale[vi] = std::max(fscale[vi], std::abs(v));
    for (const auto& [vi, mat] : b.dense_terms)
      fscale[vi] = std::max(fscale[vi], mat.cwiseAbs().maxCoeff());
  }
  for (const auto& row : prob.lp) {
    f0scale = std::max(f0scale, std::abs(row.f0));
    for (size_t k = 0; k < row.var.size(); ++k)
      fscale[row.var[k]] = std::max(fscale[row.var[k]], std::abs(row.coef[k]));
  }
  const double bscale = 1.0 + prob.b.cwiseAbs().maxCoeff();

  BlockVars v;
  v.x.resize(nb);
  v.s.resize(nb);
  double init = 0.0;
  for (int b = 0; b < nb; ++b) {
    double sc = 1.0 + prob.blocks[b].f0.cwiseAbs().maxCoeff();
    for (const auto& [vi, ents] : prob.blocks[b].sparse_terms)
      for (double w : ents.v) sc = std::max(sc, std::abs(w));
    for (const auto& [vi, mat] : prob.blocks[b].dense_terms)
      sc = std::max(sc, mat.cwiseAbs().maxCoeff());
    init = std::max(init, sc);
  }
  for (const auto& row : prob.lp) {
    double sc = 1.0 + std::abs(row.f0);
    for (double c : row.coef) sc = std::max(sc, std::abs(c));
    init = std::max(init, sc);
  }
  init = 10.0 * std::max(1.0, std::sqrt(init));
  for (int b = 0; b < nb; ++b) {
    v.x[b] = init * MatrixXd::Identity(prob.blocks[b].dim, prob.blocks[b].dim);
    v.s[b] = v.x[b];
  }
  v.lx = VectorXd::Constant(std::max(nl, 0), init);
  v.ls = v.lx;
  VectorXd y = VectorXd::Zero(m);
  const double xs0 = init * ndim;

  // per-block variable coverage for fast loops
  auto value_of = [&](int b, const VectorXd& u) {
    const auto& blk = prob.blocks[b];
    MatrixXd f = blk.f0;
    for (const auto& [vi, ents] : blk.sparse_terms)
      for (size_t k = 0; k < ents.size(); ++k) f(ents.r[k], ents.c[k]) += u[vi] * ents.v[k];
    for (const auto& [vi, mat] : blk.dense_terms) f += u[vi] * mat;
    return f;
  };
  auto lp_value = [&](int r, const VectorXd& u) {
    const auto& row = prob.lp[r];
    double f = row.f0;
    for (size_t k = 0; k < row.var.size(); ++k) f += u[row.var[k]] * row.coef[k];
    return f;
  };

  std::vector<MatrixXd> rd(nb);
  VectorXd rdl(nl);
  VectorXd rp(m);

  auto compute_residuals = [&]() {
    // rd = F0 + sum u_i F_i - S ; rp_i = -b_i - <F_i, X> (target 0)
    for (int b = 0; b < nb; ++b) rd[b] = value_of(b, y) - v.s[b];
    for (int r = 0; r < nl; ++r) rdl[r] = lp_value(r, y) - v.ls[r];
    rp = -prob.b;
    for (int b = 0; b < nb; ++b) {
      const auto& blk = prob.blocks[b];
      for (const auto& [vi, ents] : blk.sparse_terms) rp[vi] -= trdot(ents, v.x[b]);
      for (const auto& [vi, mat] : blk.dense_terms) rp[vi] -= trdot(mat, v.x[b]);
    }
    for (int r = 0; r < nl; ++r) {
      const auto& row = prob.lp[r];
      for (size_t k = 0; k < row.var.size(); ++k) rp[row.var[k]] -= row.coef[k] * v.lx[r];
    }
  };

  auto mu_of = [&](const BlockVars& w) {
    double acc = 0.0;
    for (int b = 0; b < nb; ++b) acc += (w.x[b].array() * w.s[b].array()).sum();
    acc += w.lx.dot(w.ls);
    return acc / ndim;
  };

  double best_err = kInf;
  VectorXd best_u = y;
  double best_gap = kInf, best_pobj = 0.0, best_dobj = 0.0;
  int stall = 0;
  double mu_prev = kInf;
  int no_gain = 0;
  double gain_ref = kInf;

  std::vector<MatrixXd> z(nb), t(nb), zc(nb);
  VectorXd zl(nl), tl(nl), zcl(nl);
  std::vector<MatrixXd> dx(nb), ds(nb), dxa(nb), dsa(nb);
  VectorXd dxl(nl), dsl(nl), dxla(nl), dsla(nl);

  for (int iter = 0; iter < opt.max_iters; ++iter) {
    compute_residuals();
    double mu = mu_of(v);

    double pobj = 0.0;
    for (int b = 0; b < nb; ++b) pobj += trdot(prob.blocks[b].f0, v.x[b]);
    for (int r = 0; r < nl; ++r) pobj += prob.lp[r].f0 * v.lx[r];
    double dobj = prob.b.dot(y);
    double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    double pinf = 0.0;
    for (int i = 0; i < m; ++i) pinf = std::max(pinf, std::abs(rp[i]) / (bscale * fscale[i]));
    double dinf = 0.0;
    for (int b = 0; b < nb; ++b)
      if (rd[b].size() > 0) dinf = std::max(dinf, rd[b].cwiseAbs().maxCoeff());
    for (int r = 0; r < nl; ++r) dinf = std::max(dinf, std::abs(rdl[r]));
    dinf /= f0scale;

    if (opt.verbose)
      std::fprintf(stderr, "ipm %3d mu=%9.2e gap=%9.2e pinf=%9.2e dinf=%9.2e obj=%+.9e\n", iter,
                   mu, relgap, pinf, dinf, dobj);

    res.iters = iter;
    res.primal_obj = pobj;
    res.dual_obj = dobj;
    res.rel_gap = relgap;
    if (relgap <= opt.gap_tol && pinf <= opt.feas_tol && dinf <= opt.feas_tol) {
      res.status = Status::optimal;
      res.u = y;
      return res;
    }
    double err = relgap + pinf + dinf;
    if (err < best_err) {
      best_err = err;
      best_u = y;
      best_gap = relgap;
      best_pobj = pobj;
      best_dobj = dobj;
    }
    if (err < 0.99 * gain_ref) {
      gain_ref = err;
      no_gain = 0;
    } else if (++no_gain > 15) {
      if (opt.verbose) std::fprintf(stderr, "      break: stagnation\n");
      break;
    }

    // divergence-based certificates
    double xs = v.lx.sum();
    for (int b = 0; b < nb; ++b) xs += v.x[b].trace();
    if (xs > 1e5 * xs0) {
      double cobj = pobj / xs;
      double amax = 0.0;
      for (int i = 0; i < m; ++i) amax = std::max(amax, std::abs(rp[i] + prob.b[i]) / fscale[i]);
      amax /= xs;
      if (cobj < -1e-8 * f0scale && amax < 1e-7) {
        res.status = Status::infeasible;
        res.u = y;
        res.message = "primal ray certifies infeasibility";
        return res;
      }
    }
    double ynorm = y.cwiseAbs().maxCoeff();
    if (dobj > 1e7 * bscale && ynorm > 0) {
      VectorXd yh = y / ynorm;
      double bdir = prob.b.dot(yh);
      double mineig = kInf;
      for (int b = 0; b < nb; ++b) {
        MatrixXd dirv = value_of(b, yh) - prob.blocks[b].f0;
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(dirv, Eigen::EigenvaluesOnly);
        mineig = std::min(mineig, es.eigenvalues()(0));
      }
      for (int r = 0; r < nl; ++r) mineig = std::min(mineig, lp_value(r, yh) - prob.lp[r].f0);
      if (bdir > 1e-9 && mineig > -1e-7) {
        res.status = Status::unbounded;
        res.u = y;
        res.message = "improving ray certifies unboundedness";
        return res;
      }
    }

    if (!(mu < 0.97 * mu_prev)) {
      if (++stall > 25) break;
    } else {
      stall = 0;
    }
    mu_prev = mu;

    // factorizations and helper products
    bool fact_ok = true;
    for (int b = 0; b < nb; ++b) {
      Eigen::LLT<MatrixXd> llt(v.s[b]);
      if (llt.info() != Eigen::Success) {
        if (opt.verbose) std::fprintf(stderr, "      break: slack factorization, block %d\n", b);
        fact_ok = false;
        break;
      }
      z[b] = llt.solve(MatrixXd::Identity(v.s[b].rows(), v.s[b].cols()));
      t[b] = z[b] * rd[b] * v.x[b];
    }
    if (!fact_ok) break;
    for (int r = 0; r < nl; ++r) {
      zl[r] = 1.0 / v.ls[r];
      tl[r] = rdl[r] * v.lx[r] / v.ls[r];
    }

    // Schur complement M_ij = sum_blocks tr(F_i S^-1 F_j X) + lp terms
    MatrixXd M = MatrixXd::Zero(m, m);
    std::vector<std::vector<std::pair<int, MatrixXd>>> dense_u(nb);
    for (int b = 0; b < nb; ++b) {
      const auto& blk = prob.blocks[b];
      // dense terms: precompute U_j = Z F_j X
      for (const auto& [vj, mat] : blk.dense_terms)
        dense_u[b].emplace_back(vj, MatrixXd(z[b] * mat * v.x[b]));
      for (const auto& [vj, uj] : dense_u[b]) {
        for (const auto& [vi, mat] : blk.dense_terms)
          if (vi <= vj) M(vi, vj) += trdot(mat, uj);
        for (const auto& [vi, ents] : blk.sparse_terms) {
          double val = trdot(ents, uj);
          if (vi <= vj)
            M(vi, vj) += val;
          else
            M(vj, vi) += val;
        }
      }
      const auto& sp = blk.sparse_terms;
      for (size_t a = 0; a < sp.size(); ++a) {
        const auto& [vi, ei] = sp[a];
        for (size_t bdx = a; bdx < sp.size(); ++bdx) {
          const auto& [vj, ej] = sp[bdx];
          double acc = 0.0;
          for (size_t p = 0; p < ei.size(); ++p)
            for (size_t q = 0; q < ej.size(); ++q)
              acc += ei.v[p] * ej.v[q] * z[b](ei.c[p], ej.r[q]) * v.x[b](ej.c[q], ei.r[p]);
          if (vi <= vj)
            M(vi, vj) += acc;
          else
            M(vj, vi) += acc;
        }
      }
    }
    for (int r = 0; r < nl; ++r) {
      const auto& row = prob.lp[r];
      double w = v.lx[r] / v.ls[r];
      for (size_t a = 0; a < row.var.size(); ++a)
        for (size_t c = a; c < row.var.size(); ++c) {
          int vi = row.var[a], vj = row.var[c];
          double val = w * row.coef[a] * row.coef[c];
          if (vi <= vj)
            M(vi, vj) += val;
          else
            M(vj, vi) += val;
        }
    }
    M = M.selfadjointView<Eigen::Upper>();
    const MatrixXd m0 = M;
    double ridge = 1e-13 * M.diagonal().cwiseAbs().maxCoeff();
    M.diagonal().array() += ridge;
    Eigen::LDLT<MatrixXd> msolver(M);
    if (msolver.info() != Eigen::Success) break;

    // rhs for a direction with centering sigma*mu and optional corrector term
    auto direction = [&](double sigmu, bool with_corr, VectorXd& dy_out) {
      VectorXd rhs = prob.b;
      for (int b = 0; b < nb; ++b) {
        const auto& blk = prob.blocks[b];
        MatrixXd extra = -t[b];
        if (sigmu != 0.0) extra += sigmu * z[b];
        if (with_corr) extra -= zc[b];
        for (const auto& [vi, ents] : blk.sparse_terms) rhs[vi] += trdot(ents, extra);
        for (const auto& [vi, mat] : blk.dense_terms) rhs[vi] += trdot(mat, extra);
      }
      for (int r = 0; r < nl; ++r) {
        const auto& row = prob.lp[r];
        double extra = -tl[r];
        if (sigmu != 0.0) extra += sigmu * zl[r];
        if (with_corr) extra -= zcl[r];
        for (size_t k = 0; k < row.var.size(); ++k) rhs[row.var[k]] += row.coef[k] * extra;
      }
      dy_out = msolver.solve(rhs);
      // the ridge and factorization roundoff otherwise set the floor on
      // feasibility progress; refine against the unperturbed matrix
      for (int rfn = 0; rfn < 2; ++rfn)
        dy_out += msolver.solve(VectorXd(rhs - m0 * dy_out));
    };

    auto build_dxds = [&](const VectorXd& dy, double sigmu, bool with_corr,
                          std::vector<MatrixXd>& dxo, std::vector<MatrixXd>& dso, VectorXd& dxlo,
                          VectorXd& dslo) {
      for (int b = 0; b < nb; ++b) {
        const auto& blk = prob.blocks[b];
        MatrixXd dsb = rd[b];
        for (const auto& [vi, ents] : blk.sparse_terms)
          for (size_t k = 0; k < ents.size(); ++k)
            dsb(ents.r[k], ents.c[k]) += dy[vi] * ents.v[k];
        for (const auto& [vi, mat] : blk.dense_terms) dsb += dy[vi] * mat;
        MatrixXd dxb = -v.x[b] - z[b] * dsb * v.x[b];
        if (sigmu != 0.0) dxb += sigmu * z[b];
        if (with_corr) dxb -= zc[b];
        dxb = 0.5 * (dxb + dxb.transpose()).eval();
        dso[b] = std::move(dsb);
        dxo[b] = std::move(dxb);
      }
      for (int r = 0; r < nl; ++r) {
        double dsr = rdl[r];
        const auto& row = prob.lp[r];
        for (size_t k = 0; k < row.var.size(); ++k) dsr += dy[row.var[k]] * row.coef[k];
        double dxr = -v.lx[r] - dsr * v.lx[r] / v.ls[r];
        if (sigmu != 0.0) dxr += sigmu * zl[r];
        if (with_corr) dxr -= zcl[r];
        dslo[r] = dsr;
        dxlo[r] = dxr;
      }
    };

    auto step_len = [&](const std::vector<MatrixXd>& xs_, const VectorXd& lxs,
                        const std::vector<MatrixXd>& d, const VectorXd& dl) {
      double a = kInf;
      for (int b = 0; b < nb; ++b) a = std::min(a, max_step(xs_[b], d[b]));
      for (int r = 0; r < nl; ++r)
        if (dl[r] < 0) a = std::min(a, -lxs[r] / dl[r]);
      return a;
    };

    // predictor
    VectorXd dya;
    dxa.resize(nb);
    dsa.resize(nb);
    dxla.resize(nl);
    dsla.resize(nl);
    direction(0.0, false, dya);
    build_dxds(dya, 0.0, false, dxa, dsa, dxla, dsla);
    double apa = std::min(1.0, step_len(v.x, v.lx, dxa, dxla));
    double ada = std::min(1.0, step_len(v.s, v.ls, dsa, dsla));
    double mu_aff = 0.0;
    for (int b = 0; b < nb; ++b)
      mu_aff += ((v.x[b] + apa * dxa[b]).array() * (v.s[b] + ada * dsa[b]).array()).sum();
    for (int r = 0; r < nl; ++r) mu_aff += (v.lx[r] + apa * dxla[r]) * (v.ls[r] + ada * dsla[r]);
    mu_aff /= ndim;
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::clamp(sigma, 1e-10, 1.0);
    double sigmu = sigma * mu;
    // complementarity must not undercut feasibility: once mu falls far below
    // the residual level the scaling matrices blow up and feasibility stops
    // improving, so the centering target is floored at the residual scale
    // (the data is equilibrated, making the two comparable)
    double resid = std::max(pinf, dinf);
    if (sigmu < 0.3 * resid) sigmu = std::min(0.3 * resid, 30.0 * mu);

    // corrector
    for (int b = 0; b < nb; ++b) zc[b] = z[b] * dsa[b] * dxa[b];
    for (int r = 0; r < nl; ++r) zcl[r] = dsla[r] * dxla[r] / v.ls[r];
    VectorXd dy;
    dx.resize(nb);
    ds.resize(nb);
    dxl.resize(nl);
    dsl.resize(nl);
    direction(sigmu, true, dy);
    build_dxds(dy, sigmu, true, dx, ds, dxl, dsl);

    // the dx composition inherits the forming error of the Schur matrix,
    // which leaves a feasibility floor near eps*cond(S^-1); measure the
    // actual constraint miss of the direction and push it back through the
    // factorization, correcting both sides so the dual row stays exact
    for (int rfn = 0; rfn < 2; ++rfn) {
      VectorXd miss = rp;
      for (int b = 0; b < nb; ++b) {
        const auto& blk = prob.blocks[b];
        for (const auto& [vi, ents] : blk.sparse_terms) miss[vi] -= trdot(ents, dx[b]);
        for (const auto& [vi, mat] : blk.dense_terms) miss[vi] -= trdot(mat, dx[b]);
      }
      for (int r = 0; r < nl; ++r) {
        const auto& row = prob.lp[r];
        for (size_t k = 0; k < row.var.size(); ++k) miss[row.var[k]] -= row.coef[k] * dxl[r];
      }
      VectorXd dy2 = msolver.solve(VectorXd(-miss));
      dy2 += msolver.solve(VectorXd(-miss - m0 * dy2));
      for (int b = 0; b < nb; ++b) {
        const auto& blk = prob.blocks[b];
        MatrixXd dd = MatrixXd::Zero(blk.dim, blk.dim);
        for (const auto& [vi, ents] : blk.sparse_terms)
          for (size_t k = 0; k < ents.size(); ++k) dd(ents.r[k], ents.c[k]) += dy2[vi] * ents.v[k];
        for (const auto& [vi, mat] : blk.dense_terms) dd += dy2[vi] * mat;
        ds[b] += dd;
        MatrixXd dxb = -(z[b] * dd * v.x[b]);
        dx[b] += 0.5 * (dxb + dxb.transpose()).eval();
      }
      for (int r = 0; r < nl; ++r) {
        double ddr = 0.0;
        const auto& row = prob.lp[r];
        for (size_t k = 0; k < row.var.size(); ++k) ddr += dy2[row.var[k]] * row.coef[k];
        dsl[r] += ddr;
        dxl[r] -= ddr * v.lx[r] / v.ls[r];
      }
      dy += dy2;
    }

    const double tau = 0.98;
    double ap = std::min(1.0, tau * step_len(v.x, v.lx, dx, dxl));
    double ad = std::min(1.0, tau * step_len(v.s, v.ls, ds, dsl));
    // the boundary estimate can be slightly optimistic in ill-conditioned
    // states; shrink until the stepped point factorizes
    auto interior = [&](const std::vector<MatrixXd>& xs_, const VectorXd& lxs,
                        const std::vector<MatrixXd>& d, const VectorXd& dl, double a) {
      for (int b = 0; b < nb; ++b) {
        Eigen::LLT<MatrixXd> chk(MatrixXd(xs_[b] + a * d[b]));
        if (chk.info() != Eigen::Success) return false;
      }
      for (int r = 0; r < nl; ++r)
        if (lxs[r] + a * dl[r] <= 0.0) return false;
      return true;
    };
    for (int g = 0; g < 40 && ap > 1e-12 && !interior(v.x, v.lx, dx, dxl, ap); ++g) ap *= 0.8;
    for (int g = 0; g < 40 && ad > 1e-12 && !interior(v.s, v.ls, ds, dsl, ad); ++g) ad *= 0.8;
    if (opt.verbose)
      std::fprintf(stderr, "      sigma=%8.2e apa=%8.2e ada=%8.2e ap=%8.2e ad=%8.2e\n", sigma,
                   apa, ada, ap, ad);
    if (!std::isfinite(ap) || !std::isfinite(ad) || ap <= 1e-12 || ad <= 1e-12) {
      if (opt.verbose) std::fprintf(stderr, "      break: step collapse\n");
      break;
    }

    for (int b = 0; b < nb; ++b) {
      v.x[b] += ap * dx[b];
      v.x[b] = 0.5 * (v.x[b] + v.x[b].transpose()).eval();
      v.s[b] += ad * ds[b];
      v.s[b] = 0.5 * (v.s[b] + v.s[b].transpose()).eval();
    }
    v.lx += ap * dxl;
    v.ls += ad * dsl;
    y += ad * dy;
  }

  res.u = best_u;
  if (best_err <= opt.accept_tol) {
    res.status = Status::optimal;
    res.rel_gap = best_gap;
    res.primal_obj = best_pobj;
    res.dual_obj = best_dobj;
    std::ostringstream msg;
    msg << "accepted at reduced accuracy (scaled error " << best_err << ")";
    res.message = msg.str();
    return res;
  }
  res.status = (res.iters >= opt.max_iters - 1) ? Status::iteration_limit : Status::numerical_error;
  std::ostringstream msg;
  msg << "no convergence (best scaled error " << best_err << ")";
  res.message = msg.str();
  return res;
}

// Ruiz equilibration ahead of the core solve. Channel data mixes path-gain
// scales with unit traces, spreading coefficients over many decades; the core
// iteration stalls on such data. Row scales (one per block, one per LP row)
// and per-variable column scales are balanced to near-unit max norms, the
// scaled problem is solved, and the solution is mapped back. Only u and the
// dual objective need unscaling; the relative gap is reported as-is.
IpmResult solve_ipm(const IpmProblem& prob, const SolveOptions& opt) {
  const int m = prob.m;
  const int nb = static_cast<int>(prob.blocks.size());
  const int nl = static_cast<int>(prob.lp.size());
  if (m == 0) return solve_ipm_core(prob, opt);

  VectorXd d = VectorXd::Ones(m);
  VectorXd eb = VectorXd::Ones(std::max(nb, 1));
  VectorXd el = VectorXd::Ones(std::max(nl, 1));
  auto block_max = [&](int b, int* only_var) {
    double mx = 0.0;
    for (const auto& [vi, ents] : prob.blocks[b].sparse_terms) {
      if (only_var && vi != *only_var) continue;
      for (double w : ents.v) mx = std::max(mx, std::abs(w) * eb[b] * d[vi]);
    }
    for (const auto& [vi, mat] : prob.blocks[b].dense_terms) {
      if (only_var && vi != *only_var) continue;
      mx = std::max(mx, mat.cwiseAbs().maxCoeff() * eb[b] * d[vi]);
    }
    return mx;
  };
  for (int pass = 0; pass < 6; ++pass) {
    for (int b = 0; b < nb; ++b) {
      double mx = block_max(b, nullptr);
      if (mx > 0.0) eb[b] /= std::sqrt(mx);
    }
    for (int r = 0; r < nl; ++r) {
      double mx = 0.0;
      const auto& row = prob.lp[r];
      for (size_t k = 0; k < row.var.size(); ++k)
        mx = std::max(mx, std::abs(row.coef[k]) * el[r] * d[row.var[k]]);
      if (mx > 0.0) el[r] /= std::sqrt(mx);
    }
    VectorXd cmx = VectorXd::Zero(m);
    for (int b = 0; b < nb; ++b) {
      for (const auto& [vi, ents] : prob.blocks[b].sparse_terms)
        for (double w : ents.v) cmx[vi] = std::max(cmx[vi], std::abs(w) * eb[b] * d[vi]);
      for (const auto& [vi, mat] : prob.blocks[b].dense_terms)
        cmx[vi] = std::max(cmx[vi], mat.cwiseAbs().maxCoeff() * eb[b] * d[vi]);
    }
    for (int r = 0; r < nl; ++r) {
      const auto& row = prob.lp[r];
      for (size_t k = 0; k < row.var.size(); ++k)
        cmx[row.var[k]] =
            std::max(cmx[row.var[k]], std::abs(row.coef[k]) * el[r] * d[row.var[k]]);
    }
    for (int i = 0; i < m; ++i)
      if (cmx[i] > 0.0) d[i] /= std::sqrt(cmx[i]);
  }

  IpmProblem sc;
  sc.m = m;
  sc.b = prob.b.cwiseProduct(d);
  const double beta = std::max(1.0, sc.b.cwiseAbs().maxCoeff());
  sc.b /= beta;
  sc.blocks.reserve(nb);
  for (int b = 0; b < nb; ++b) {
    IpmDenseBlock blk;
    blk.dim = prob.blocks[b].dim;
    blk.f0 = eb[b] * prob.blocks[b].f0;
    for (const auto& [vi, ents] : prob.blocks[b].sparse_terms) {
      SparseEntries e = ents;
      for (double& w : e.v) w *= eb[b] * d[vi];
      blk.sparse_terms.emplace_back(vi, std::move(e));
    }
    for (const auto& [vi, mat] : prob.blocks[b].dense_terms)
      blk.dense_terms.emplace_back(vi, MatrixXd(eb[b] * d[vi] * mat));
    sc.blocks.push_back(std::move(blk));
  }
  sc.lp.reserve(nl);
  for (int r = 0; r < nl; ++r) {
    IpmLpRow row = prob.lp[r];
    row.f0 *= el[r];
    for (size_t k = 0; k < row.var.size(); ++k) row.coef[k] *= el[r] * d[row.var[k]];
    sc.lp.push_back(std::move(row));
  }

  IpmResult res = solve_ipm_core(sc, opt);
  res.u = res.u.cwiseProduct(d);
  res.dual_obj = prob.b.dot(res.u);
  return res;
}

}  // namespace irsee::conic::detail
