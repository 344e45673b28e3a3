#pragma once

#include <utility>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "kryfun/function_spec.hpp"
#include "kryfun/types.hpp"

namespace kryfun {

namespace detail {

template <class Mat>
void require_square_finite(const Mat& m, const char* who) {
  if (m.rows() != m.cols()) throw DimensionError(std::string(who) + ": matrix must be square");
  if (!m.allFinite()) throw InputError(std::string(who) + ": matrix has non-finite entries");
}

}  // namespace detail

/// e^M by scaling-and-squaring with the degree-13 diagonal Pade approximant.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> expm(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
  detail::require_square_finite(m, "expm");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> e = m.exp();
  if (!e.allFinite()) throw OverflowError("expm: result overflowed");
  return e;
}

/// (cos M, sin M) for complex M through e^{iM} and e^{-iM}.
inline std::pair<ComplexMatrix, ComplexMatrix> cos_sin(const ComplexMatrix& m) {
  detail::require_square_finite(m, "cos_sin");
  const Complex i(0.0, 1.0);
  ComplexMatrix ep = expm<Complex>(i * m);
  ComplexMatrix en = expm<Complex>(-i * m);
  return {0.5 * (ep + en), Complex(0.0, -0.5) * (ep - en)};
}

/// (cos M, sin M) for real M: one complex exponential, e^{iM} = cos M + i sin M.
inline std::pair<Matrix, Matrix> cos_sin(const Matrix& m) {
  detail::require_square_finite(m, "cos_sin");
  ComplexMatrix e = expm<Complex>(Complex(0.0, 1.0) * m.cast<Complex>());
  return {e.real(), e.imag()};
}

/// f(M) = kind(-tau M) for real square M; real for all three kinds.
inline Matrix funm(const FunctionSpec& spec, const Matrix& m) {
  const Matrix scaled = -spec.tau * m;
  switch (spec.kind) {
    case FunctionKind::Exp: return expm<double>(scaled);
    case FunctionKind::Cos: return cos_sin(scaled).first;
    case FunctionKind::Sin: return cos_sin(scaled).second;
  }
  return {};
}

inline ComplexMatrix funm(const FunctionSpec& spec, const ComplexMatrix& m) {
  const ComplexMatrix scaled = Complex(-spec.tau, 0.0) * m;
  switch (spec.kind) {
    case FunctionKind::Exp: return expm<Complex>(scaled);
    case FunctionKind::Cos: return cos_sin(scaled).first;
    case FunctionKind::Sin: return cos_sin(scaled).second;
  }
  return {};
}

/// Symmetric tridiagonal matrix stored as its diagonal and off-diagonal.
struct SymTridiagonal {
  Vector diag;
  Vector offdiag;

  SymTridiagonal() = default;
  SymTridiagonal(Vector d, Vector e) : diag(std::move(d)), offdiag(std::move(e)) {
    if (offdiag.size() != diag.size() - 1 && !(diag.size() == 0 && offdiag.size() == 0))
      throw DimensionError("SymTridiagonal: offdiag must have length m-1");
    if (!diag.allFinite() || !offdiag.allFinite())
      throw InputError("SymTridiagonal: non-finite entries");
  }

  Index size() const { return diag.size(); }

  Matrix dense() const {
    Matrix t = Matrix::Zero(size(), size());
    for (Index i = 0; i < size(); ++i) {
      t(i, i) = diag(i);
      if (i + 1 < size()) {
        t(i, i + 1) = offdiag(i);
        t(i + 1, i) = offdiag(i);
      }
    }
    return t;
  }
};

struct TridiagonalEigen {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, T = Q diag(values) Q^T
};

/// Spectral decomposition of a symmetric tridiagonal matrix.
inline TridiagonalEigen symtrid_eig(const SymTridiagonal& t) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver;
  solver.computeFromTridiagonal(t.diag, t.offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    double best = t.diag.size() > 0 ? t.diag.maxCoeff() : 0.0;
    throw ConvergenceError("symtrid_eig: QL iteration failed to converge", best);
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// f(T) = Q kind(-tau Lambda) Q^T through the spectral decomposition.
inline Matrix funm_hermitian(const SymTridiagonal& t, const FunctionSpec& spec) {
  TridiagonalEigen eig = symtrid_eig(t);
  Vector fvals(eig.values.size());
  for (Index i = 0; i < eig.values.size(); ++i) fvals(i) = spec(eig.values(i));
  return eig.vectors * fvals.asDiagonal() * eig.vectors.transpose();
}

}  // namespace kryfun
