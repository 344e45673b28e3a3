#include <catch2/catch.hpp>

#include "kryfun/dense_funm.hpp"
#include "kryfun/oracle.hpp"
#include "kryfun/prng.hpp"
#include "kryfun/sparse.hpp"

using namespace kryfun;

TEST_CASE("diagonal reference path") {
  SparseMatrix a = build_diag_spectrum(1001, {0.0, 40.0});
  Vector v = random_unit_vector(1001, 301);
  FunctionSpec spec(FunctionKind::Exp, 1.0);
  OracleResult result = reference_fAv(a, v, spec);
  REQUIRE(result.method == OracleResult::Method::DiagonalExact);
  for (Index i : {0, 500, 1000})
    REQUIRE(result.exact(i) == Approx(std::exp(-a.diagonal()(i)) * v(i)).epsilon(1e-15));
}

TEST_CASE("tau = 0 returns v") {
  SparseMatrix a = build_convection_diffusion(3, 96.0, 128.0);
  Vector v = random_unit_vector(27, 302);
  for (FunctionKind kind : {FunctionKind::Exp, FunctionKind::Cos}) {
    OracleResult result = reference_fAv(a, v, FunctionSpec(kind, 0.0));
    REQUIRE((result.exact - v).norm() < 1e-13);
  }
  OracleResult sine = reference_fAv(a, v, FunctionSpec(FunctionKind::Sin, 0.0));
  REQUIRE(sine.exact.norm() < 1e-13);
}

TEST_CASE("dense path agrees with an eigendecomposition evaluation") {
  SparseMatrix a = build_convection_diffusion(4, 96.0, 128.0);
  Vector v = Vector::Constant(64, 1.0);
  const double h = 1.0 / 5.0;
  FunctionSpec spec(FunctionKind::Exp, h * h);
  OracleResult pade = reference_fAv(a, v, spec);
  REQUIRE(pade.method == OracleResult::Method::DenseKernel);

  Eigen::ComplexEigenSolver<ComplexMatrix> eig(a.dense().cast<Complex>());
  REQUIRE(eig.info() == Eigen::Success);
  ComplexVector w = eig.eigenvectors().inverse() * v.cast<Complex>();
  for (Index i = 0; i < 64; ++i) w(i) *= spec(eig.eigenvalues()(i));
  ComplexVector reference = eig.eigenvectors() * w;
  REQUIRE((reference.real() - pade.exact).norm() < 1e-9 * pade.exact.norm());
  REQUIRE(reference.imag().norm() < 1e-9 * pade.exact.norm());
}

TEST_CASE("diagonal path equals the dense kernels on diagonal matrices") {
  SparseMatrix a = build_diag_spectrum(120, {-1.0, 2.0});
  Vector v = random_unit_vector(120, 303);
  for (FunctionKind kind : {FunctionKind::Exp, FunctionKind::Cos, FunctionKind::Sin}) {
    FunctionSpec spec(kind, 0.7);
    OracleResult diag_path = reference_fAv(a, v, spec);
    Vector dense_path = funm(spec, a.dense()) * v;
    REQUIRE((diag_path.exact - dense_path).norm() < 1e-12 * (1.0 + dense_path.norm()));
  }
}

TEST_CASE("eigendecomposition route matches the Pade route for cos and sin") {
  SparseMatrix a = build_convection_diffusion(5, 0.0, 0.0);  // symmetric, N = 125
  Vector v = random_unit_vector(125, 304);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a.dense());
  for (FunctionKind kind : {FunctionKind::Cos, FunctionKind::Sin}) {
    FunctionSpec spec(kind, 0.01);
    OracleResult pade = reference_fAv(a, v, spec);
    Vector w = eig.eigenvectors().transpose() * v;
    for (Index i = 0; i < 125; ++i) w(i) *= spec(eig.eigenvalues()(i));
    Vector reference = eig.eigenvectors() * w;
    REQUIRE((reference - pade.exact).norm() < 1e-9 * (1.0 + pade.exact.norm()));
  }
}

TEST_CASE("size cap on the dense path") {
  // tridiagonal, so the diagonal shortcut does not apply
  std::vector<std::tuple<Index, Index, double>> entries;
  const Index n = 3100;
  for (Index i = 0; i < n; ++i) {
    entries.emplace_back(i, i, 2.0);
    if (i + 1 < n) {
      entries.emplace_back(i, i + 1, -1.0);
      entries.emplace_back(i + 1, i, -1.0);
    }
  }
  SparseMatrix a = SparseMatrix::from_triplets(n, std::move(entries));
  Vector v = random_unit_vector(n, 305);
  REQUIRE_THROWS_AS(reference_fAv(a, v, FunctionSpec(FunctionKind::Exp, 1.0)), InputError);
}

TEST_CASE("true_error") {
  OracleResult oracle;
  oracle.exact = (Vector(3) << 3.0, 0.0, 4.0).finished();
  SECTION("exact approximation") {
    auto [abs_err, rel_err] = true_error(oracle.exact, oracle);
    REQUIRE(abs_err == 0.0);
    REQUIRE(rel_err == 0.0);
  }
  SECTION("zero approximation of a unit reference") {
    OracleResult unit;
    unit.exact = Vector::Unit(4, 1);
    auto [abs_err, rel_err] = true_error(Vector::Zero(4), unit);
    REQUIRE(abs_err == 1.0);
    REQUIRE(rel_err == 1.0);
  }
  SECTION("hand-computed norms") {
    Vector approx = (Vector(3) << 0.0, 0.0, 0.0).finished();
    auto [abs_err, rel_err] = true_error(approx, oracle);
    REQUIRE(abs_err == Approx(5.0));
    REQUIRE(rel_err == Approx(1.0));
  }
  SECTION("zero reference falls back to the absolute error") {
    OracleResult zero;
    zero.exact = Vector::Zero(2);
    auto [abs_err, rel_err] = true_error(Vector::Constant(2, 0.3), zero);
    REQUIRE(abs_err == rel_err);
  }
  REQUIRE_THROWS_AS(true_error(Vector::Zero(2), oracle), DimensionError);
}
