#pragma once

#include <optional>
#include <utility>

#include "kryfun/dense_funm.hpp"
#include "kryfun/sparse.hpp"
#include "kryfun/types.hpp"

namespace kryfun {

/// Snapshot of an Arnoldi or Lanczos factorization after m steps:
///   A V = V H + h_next v_next e_m^T,   V e_1 = v / beta.
/// h_next == 0 marks a lucky breakdown: the Krylov space is A-invariant and
/// the approximation built from this decomposition is exact.
struct KrylovDecomposition {
  Matrix basis;                             // N x m, orthonormal columns
  Matrix hess;                              // m x m upper Hessenberg
  std::optional<SymTridiagonal> tridiagonal;  // set on the Lanczos path
  double h_next = 0.0;
  Vector v_next;  // unit next vector; zero vector when exact
  double beta = 0.0;
  Index steps = 0;
  bool exact = false;
};

/// Arnoldi process with modified Gram-Schmidt and one refinement pass.
class ArnoldiProcess {
 public:
  ArnoldiProcess(const SparseMatrix& a, const Vector& v, Index max_dim,
                 double breakdown_tol = 1e-14)
      : a_(a), max_dim_(max_dim), breakdown_tol_(breakdown_tol) {
    if (v.size() != a.size()) throw DimensionError("arnoldi: vector length does not match");
    if (max_dim < 1 || max_dim > a.size()) throw InputError("arnoldi: need 1 <= m <= N");
    beta_ = v.norm();
    if (beta_ == 0.0) throw InputError("arnoldi: starting vector is zero");
    fro_ = a.frobenius_norm();
    basis_.resize(a.size(), max_dim + 1);
    hess_ = Matrix::Zero(max_dim + 1, max_dim);
    basis_.col(0) = v / beta_;
  }

  /// Extends the factorization by one step. Returns false once no further
  /// step is possible (breakdown already happened or max_dim is reached).
  bool step() {
    if (exact_ || steps_ == max_dim_) return false;
    const Index j = steps_;
    Vector w = a_ * basis_.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i <= j; ++i) {
        const double h = basis_.col(i).dot(w);
        w -= h * basis_.col(i);
        hess_(i, j) += h;
      }
    }
    const double h_next = w.norm();
    ++steps_;
    if (h_next <= breakdown_tol_ * fro_) {
      hess_(j + 1, j) = 0.0;
      exact_ = true;
      return false;
    }
    hess_(j + 1, j) = h_next;
    basis_.col(j + 1) = w / h_next;
    return true;
  }

  Index steps() const { return steps_; }
  bool exact() const { return exact_; }
  double beta() const { return beta_; }

  KrylovDecomposition decomposition() const {
    if (steps_ == 0) throw InputError("arnoldi: no steps taken yet");
    KrylovDecomposition dec;
    dec.basis = basis_.leftCols(steps_);
    dec.hess = hess_.topLeftCorner(steps_, steps_);
    dec.h_next = exact_ ? 0.0 : hess_(steps_, steps_ - 1);
    dec.v_next = exact_ ? Vector::Zero(basis_.rows()).eval() : basis_.col(steps_).eval();
    dec.beta = beta_;
    dec.steps = steps_;
    dec.exact = exact_;
    return dec;
  }

 private:
  const SparseMatrix& a_;
  Index max_dim_;
  double breakdown_tol_;
  double beta_ = 0.0;
  double fro_ = 0.0;
  Matrix basis_;
  Matrix hess_;
  Index steps_ = 0;
  bool exact_ = false;
};

/// Lanczos process for symmetric A. Full reorthogonalization is on by
/// default; the basis is stored anyway to form approximations, and the
/// estimates downstream need its quality.
class LanczosProcess {
 public:
  LanczosProcess(const SparseMatrix& a, const Vector& v, Index max_dim, bool reorth = true,
                 double breakdown_tol = 1e-14)
      : a_(a), max_dim_(max_dim), reorth_(reorth), breakdown_tol_(breakdown_tol) {
    if (!a.is_symmetric()) throw InputError("lanczos: matrix is not symmetric");
    if (v.size() != a.size()) throw DimensionError("lanczos: vector length does not match");
    if (max_dim < 1 || max_dim > a.size()) throw InputError("lanczos: need 1 <= m <= N");
    beta_ = v.norm();
    if (beta_ == 0.0) throw InputError("lanczos: starting vector is zero");
    fro_ = a.frobenius_norm();
    basis_.resize(a.size(), max_dim + 1);
    alpha_.resize(max_dim);
    eta_.resize(max_dim);
    basis_.col(0) = v / beta_;
  }

  bool step() {
    if (exact_ || steps_ == max_dim_) return false;
    const Index j = steps_;
    Vector w = a_ * basis_.col(j);
    if (j > 0) w -= eta_(j - 1) * basis_.col(j - 1);
    alpha_(j) = basis_.col(j).dot(w);
    w -= alpha_(j) * basis_.col(j);
    if (reorth_) {
      for (int pass = 0; pass < 2; ++pass)
        w -= basis_.leftCols(j + 1) * (basis_.leftCols(j + 1).transpose() * w);
    }
    const double eta = w.norm();
    ++steps_;
    if (eta <= breakdown_tol_ * fro_) {
      eta_(j) = 0.0;
      exact_ = true;
      return false;
    }
    eta_(j) = eta;
    basis_.col(j + 1) = w / eta;
    return true;
  }

  Index steps() const { return steps_; }
  bool exact() const { return exact_; }
  double beta() const { return beta_; }

  KrylovDecomposition decomposition() const {
    if (steps_ == 0) throw InputError("lanczos: no steps taken yet");
    KrylovDecomposition dec;
    dec.tridiagonal = SymTridiagonal(alpha_.head(steps_), eta_.head(steps_ - 1));
    dec.basis = basis_.leftCols(steps_);
    dec.hess = dec.tridiagonal->dense();
    dec.h_next = exact_ ? 0.0 : eta_(steps_ - 1);
    dec.v_next = exact_ ? Vector::Zero(basis_.rows()).eval() : basis_.col(steps_).eval();
    dec.beta = beta_;
    dec.steps = steps_;
    dec.exact = exact_;
    return dec;
  }

 private:
  const SparseMatrix& a_;
  Index max_dim_;
  bool reorth_;
  double breakdown_tol_;
  double beta_ = 0.0;
  double fro_ = 0.0;
  Matrix basis_;
  Vector alpha_;
  Vector eta_;
  Index steps_ = 0;
  bool exact_ = false;
};

inline KrylovDecomposition arnoldi(const SparseMatrix& a, const Vector& v, Index m,
                                   double breakdown_tol = 1e-14) {
  ArnoldiProcess process(a, v, m, breakdown_tol);
  while (process.step()) {
  }
  return process.decomposition();
}

inline KrylovDecomposition lanczos(const SparseMatrix& a, const Vector& v, Index m,
                                   bool reorth = true) {
  LanczosProcess process(a, v, m, reorth);
  while (process.step()) {
  }
  return process.decomposition();
}

/// Krylov approximation f_m = beta V f(-tau H) e_1, with the spectral path
/// when the decomposition is tridiagonal.
inline Vector krylov_approx(const KrylovDecomposition& dec, const FunctionSpec& spec) {
  Vector y;
  if (dec.tridiagonal) {
    y = funm_hermitian(*dec.tridiagonal, spec).col(0);
  } else {
    y = funm(spec, dec.hess).col(0);
  }
  return dec.beta * (dec.basis * y);
}

}  // namespace kryfun
