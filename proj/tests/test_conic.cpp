#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <random>
#include <sstream>

#include "conic.hpp"

using namespace irsee::conic;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;

namespace {

MatrixXcd random_hermitian(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXcd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = cplx(u(rng), u(rng));
  return 0.5 * (b + b.adjoint());
}

double lambda_max(const MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(a.rows() - 1);
}

}  // namespace

TEST_CASE("hermitian embedding round trip doubles the spectrum") {
  MatrixXcd h(2, 2);
  h << cplx(2, 0), cplx(0, 1), cplx(0, -1), cplx(2, 0);
  MatrixXd e = embed_hermitian(h);
  REQUIRE(e.rows() == 4);
  CHECK((e - e.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(e, Eigen::EigenvaluesOnly);
  // spectrum of h is {1, 3}; the embedding repeats each eigenvalue
  CHECK(es.eigenvalues()(0) == doctest::Approx(1.0));
  CHECK(es.eigenvalues()(1) == doctest::Approx(1.0));
  CHECK(es.eigenvalues()(2) == doctest::Approx(3.0));
  CHECK(es.eigenvalues()(3) == doctest::Approx(3.0));
  MatrixXcd back = unembed_hermitian(e);
  CHECK((back - h).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  // inner products pick up a factor 2 through the embedding
  MatrixXcd g(2, 2);
  g << cplx(1, 0), cplx(0.5, -0.25), cplx(0.5, 0.25), cplx(-1, 0);
  double direct = (h.adjoint() * g).trace().real();
  double embedded = 0.5 * (embed_hermitian(h).transpose() * embed_hermitian(g)).trace();
  CHECK(embedded == doctest::Approx(direct));
}

TEST_CASE("bounded scalar program") {
  Program prog;
  ScalarVar s = prog.add_scalar_var(0.0);
  prog.set_objective(LinFunc{}.add(s, 1.0));
  prog.add_constraint(LinFunc{}.add(s, 1.0), Sense::le, 3.0);
  SolveResult r = prog.solve();
  REQUIRE(r.ok());
  CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(r.scalar_values[0] == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(r.duality_gap < 1e-7);
}

TEST_CASE("real trace-constrained maximization reaches the top eigenvalue") {
  Program prog;
  MatrixVar x = prog.add_matrix_var(2);
  MatrixXcd c(2, 2);
  c << 2, 1, 1, 0;
  prog.set_objective(LinFunc{}.add(x, c));
  prog.add_constraint(LinFunc{}.add(x, MatrixXcd::Identity(2, 2)), Sense::le, 1.0);
  SolveResult r = prog.solve();
  REQUIRE(r.ok());
  CHECK(r.objective == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-7));
  CHECK(r.max_violation < 1e-7);
}

TEST_CASE("complex trace-constrained maximization recovers the top eigenvector") {
  Program prog;
  MatrixVar x = prog.add_matrix_var(2);
  MatrixXcd c(2, 2);
  c << cplx(2, 0), cplx(0, 1), cplx(0, -1), cplx(2, 0);
  prog.set_objective(LinFunc{}.add(x, c));
  prog.add_constraint(LinFunc{}.add(x, MatrixXcd::Identity(2, 2)), Sense::le, 1.0);
  SolveResult r = prog.solve();
  REQUIRE(r.ok());
  CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-7));
  // optimum is vv^H with v = [i, 1]/sqrt(2)
  CHECK(r.matrix_values[0](0, 0).real() == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(r.matrix_values[0](0, 1).imag() == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(r.matrix_values[0](0, 1).real() == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("scalar bounded by a diagonal matrix through an LMI") {
  Program prog;
  ScalarVar s = prog.add_scalar_var();
  prog.set_objective(LinFunc{}.add(s, 1.0));
  MatrixXcd d = MatrixXcd::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  LmiExpr& lmi = prog.add_lmi(2);
  lmi.constant(d);
  lmi.add_scalar(s, -MatrixXcd::Identity(2, 2));
  SolveResult r = prog.solve();
  REQUIRE(r.ok());
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("negative trace bound on a PSD variable is infeasible") {
  Program prog;
  MatrixVar x = prog.add_matrix_var(2);
  prog.set_objective(LinFunc{}.add(x, MatrixXcd::Identity(2, 2)));
  prog.add_constraint(LinFunc{}.add(x, MatrixXcd::Identity(2, 2)), Sense::le, -1.0);
  SolveResult r = prog.solve();
  CHECK(r.status == Status::infeasible);
}

TEST_CASE("conflicting scalar LMI bounds are infeasible") {
  Program prog;
  ScalarVar s = prog.add_scalar_var(0.0);
  prog.set_objective(LinFunc{}.add(s, 1.0));
  // -I + s I >= 0 forces s >= 1, but s <= 0.5
  LmiExpr& lmi = prog.add_lmi(2);
  lmi.constant(-MatrixXcd::Identity(2, 2));
  lmi.add_scalar(s, MatrixXcd::Identity(2, 2));
  prog.add_constraint(LinFunc{}.add(s, 1.0), Sense::le, 0.5);
  SolveResult r = prog.solve();
  CHECK(r.status == Status::infeasible);
}

TEST_CASE("unit-diagonal correlation matrix maximizing the off-diagonal") {
  Program prog;
  MatrixVar x = prog.add_matrix_var(2);
  MatrixXcd e01 = MatrixXcd::Zero(2, 2);
  e01(0, 1) = 0.5;
  e01(1, 0) = 0.5;  // tr(e01^H X) = Re X_01
  prog.set_objective(LinFunc{}.add(x, e01));
  MatrixXcd e00 = MatrixXcd::Zero(2, 2), e11 = MatrixXcd::Zero(2, 2);
  e00(0, 0) = 1.0;
  e11(1, 1) = 1.0;
  prog.add_constraint(LinFunc{}.add(x, e00), Sense::eq, 1.0);
  prog.add_constraint(LinFunc{}.add(x, e11), Sense::eq, 1.0);
  SolveResult r = prog.solve();
  REQUIRE(r.ok());
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.matrix_values[0](0, 0).real() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.matrix_values[0](0, 1).real() == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("multi-coordinate equality goes through null-space elimination") {
  Program prog;
  MatrixVar x = prog.add_matrix_var(2);
  MatrixXcd c(2, 2);
  c << 2, 1, 1, 0;
  prog.set_objective(LinFunc{}.add(x, c));
  prog.add_constraint(LinFunc{}.add(x, MatrixXcd::Identity(2, 2)), Sense::eq, 1.0);
  SolveResult r = prog.solve();
  REQUIRE(r.ok());
  CHECK(r.objective == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-6));
  CHECK(r.matrix_values[0].trace().real() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("random spectral-norm oracles over both fields") {
  std::mt19937_64 rng(7021);
  for (int trial = 0; trial < 8; ++trial) {
    int n = 2 + trial % 5;
    MatrixXcd c = random_hermitian(n, rng);
    if (trial % 2 == 0) c = c.real().cast<cplx>();
    Program prog;
    MatrixVar x = prog.add_matrix_var(n);
    prog.set_objective(LinFunc{}.add(x, c));
    prog.add_constraint(LinFunc{}.add(x, MatrixXcd::Identity(n, n)), Sense::le, 1.0);
    SolveResult r = prog.solve();
    REQUIRE(r.ok());
    CHECK(r.objective == doctest::Approx(lambda_max(c)).epsilon(1e-6));
  }
}

TEST_CASE("congruence-constrained trace maximization") {
  std::mt19937_64 rng(40);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXcd p(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) p(i, j) = cplx(u(rng), u(rng));
  p += 2.0 * MatrixXcd::Identity(2, 2);  // keep it well conditioned
  Program prog;
  MatrixVar x = prog.add_matrix_var(2);
  prog.set_objective(LinFunc{}.add(x, MatrixXcd::Identity(2, 2)));
  LmiExpr& lmi = prog.add_lmi(2);
  lmi.constant(MatrixXcd::Identity(2, 2));
  lmi.add_congruence(x, p, -1.0);  // I - P X P^H >= 0
  SolveResult r = prog.solve();
  REQUIRE(r.ok());
  double expected = (p * p.adjoint()).inverse().trace().real();
  CHECK(r.objective == doctest::Approx(expected).epsilon(1e-6));
  CHECK(r.max_violation < 1e-6);
}

TEST_CASE("ray detection on an unbounded direction") {
  Program prog;
  ScalarVar s = prog.add_scalar_var(0.0);
  prog.set_objective(LinFunc{}.add(s, 1.0));
  SolveResult r = prog.solve();
  CHECK(r.status == Status::unbounded);
}

TEST_CASE("scalar and matrix variables coupled through shared rows") {
  std::mt19937_64 rng(99);
  MatrixXcd a = random_hermitian(3, rng);
  a = a * a.adjoint();  // PSD objective data
  Program prog;
  MatrixVar x = prog.add_matrix_var(3);
  ScalarVar t = prog.add_scalar_var();
  prog.set_objective(LinFunc{}.add(t, 1.0));
  LinFunc gap;  // tr(A X) - t >= 0
  gap.add(x, a).add(t, -1.0);
  prog.add_constraint(gap, Sense::ge, 0.0);
  prog.add_constraint(LinFunc{}.add(x, MatrixXcd::Identity(3, 3)), Sense::le, 1.0);
  SolveResult r = prog.solve();
  REQUIRE(r.ok());
  CHECK(r.objective == doctest::Approx(lambda_max(a)).epsilon(1e-6));
  CHECK(r.value(gap) == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("program dump is readable text") {
  Program prog;
  MatrixVar x = prog.add_matrix_var(2);
  ScalarVar s = prog.add_scalar_var(0.0);
  prog.set_objective(LinFunc{}.add(x, MatrixXcd::Identity(2, 2)).add(s, 2.0).add(0.5));
  prog.add_constraint(LinFunc{}.add(s, 1.0), Sense::le, 4.0);
  LmiExpr& lmi = prog.add_lmi(2);
  lmi.constant(MatrixXcd::Identity(2, 2));
  lmi.add_scalar(s, -MatrixXcd::Identity(2, 2));
  std::ostringstream oss;
  prog.dump(oss);
  std::string text = oss.str();
  CHECK(text.find("conic-program") != std::string::npos);
  CHECK(text.find("matrix_vars 1") != std::string::npos);
  CHECK(text.find("lmi dim 2") != std::string::npos);
}
