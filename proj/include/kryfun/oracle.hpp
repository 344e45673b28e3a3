#pragma once

#include <utility>

#include "kryfun/dense_funm.hpp"
#include "kryfun/sparse.hpp"
#include "kryfun/types.hpp"

namespace kryfun {

/// Reference value of f(-tau A) v at desk scale. Diagonal operators are
/// evaluated elementwise at any size; everything else is densified and sent
/// through the dense kernels, capped at N = 3000.
struct OracleResult {
  enum class Method { DiagonalExact, DenseKernel };
  Vector exact;
  Method method = Method::DiagonalExact;
  Index dense_dim = 0;
};

inline OracleResult reference_fAv(const SparseMatrix& a, const Vector& v,
                                  const FunctionSpec& spec) {
  if (v.size() != a.size()) throw DimensionError("reference_fAv: vector length mismatch");
  OracleResult result;
  if (a.is_diagonal()) {
    const Vector d = a.diagonal();
    result.exact.resize(a.size());
    for (Index i = 0; i < a.size(); ++i) result.exact(i) = spec(d(i)) * v(i);
    result.method = OracleResult::Method::DiagonalExact;
    return result;
  }
  if (a.size() > 3000)
    throw InputError("reference_fAv: dense reference capped at N = 3000; use a smaller instance");
  result.exact = funm(spec, a.dense()) * v;
  result.method = OracleResult::Method::DenseKernel;
  result.dense_dim = a.size();
  return result;
}

/// (absolute, relative) error of an approximation against the reference;
/// the relative error falls back to the absolute one for a zero reference.
inline std::pair<double, double> true_error(const Vector& approx, const OracleResult& oracle) {
  if (approx.size() != oracle.exact.size())
    throw DimensionError("true_error: length mismatch");
  const double abs_err = (oracle.exact - approx).norm();
  const double ref = oracle.exact.norm();
  return {abs_err, ref > 0.0 ? abs_err / ref : abs_err};
}

}  // namespace kryfun
