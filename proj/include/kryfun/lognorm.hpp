#pragma once

#include <cmath>

#include "kryfun/dense_funm.hpp"
#include "kryfun/prng.hpp"
#include "kryfun/sparse.hpp"
#include "kryfun/types.hpp"

namespace kryfun {

/// Logarithmic 2-norm of -A: mu2[-A] = lambda_max( -(A + A^T)/2 ).
/// Diagonal matrices are handled exactly (-min of the diagonal); otherwise a
/// symmetric Lanczos iteration with full reorthogonalization runs on the
/// symmetrized operator until the extremal Ritz pair has relative residual
/// below tol, capped at 300 steps.
inline double log_norm_neg(const SparseMatrix& a, double tol = 1e-8) {
  if (a.is_diagonal()) return -a.diagonal().minCoeff();

  const Index n = a.size();
  const SparseMatrix at = a.transposed();
  const double fro = a.frobenius_norm();
  auto sym_neg_apply = [&](const Vector& x) -> Vector {
    return -0.5 * (a * x + at * x);
  };

  const Index max_steps = std::min<Index>(300, n);
  Matrix basis(n, max_steps + 1);
  Vector alpha(max_steps), eta(max_steps);
  basis.col(0) = random_unit_vector(n, 0x6b727966756eULL);

  double best = 0.0;
  for (Index j = 0; j < max_steps; ++j) {
    Vector w = sym_neg_apply(basis.col(j));
    if (j > 0) w -= eta(j - 1) * basis.col(j - 1);
    alpha(j) = basis.col(j).dot(w);
    w -= alpha(j) * basis.col(j);
    for (int pass = 0; pass < 2; ++pass)
      w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
    eta(j) = w.norm();

    const Index m = j + 1;
    TridiagonalEigen eig = symtrid_eig(SymTridiagonal(alpha.head(m), eta.head(m - 1)));
    const double theta = eig.values(m - 1);
    const double residual = eta(j) * std::abs(eig.vectors(m - 1, m - 1));
    best = theta;
    if (residual <= tol * std::max(std::abs(theta), 1e-8 * fro)) return theta;
    if (eta(j) <= 1e-14 * fro) return theta;  // invariant subspace found
    basis.col(j + 1) = w / eta(j);
  }
  throw ConvergenceError("log_norm_neg: Lanczos did not converge within 300 steps", best);
}

}  // namespace kryfun
