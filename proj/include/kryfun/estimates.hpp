#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "kryfun/dense_funm.hpp"
#include "kryfun/divided_difference.hpp"
#include "kryfun/krylov.hpp"
#include "kryfun/sparse.hpp"
#include "kryfun/types.hpp"

namespace kryfun {

/// H bordered by interpolation nodes, one row per node:
///   M_0 = H,   M_j = [ M_{j-1}  0 ]
///               [ e_last^T z_{j-1} ].
/// For f analytic, f(assembled) is block lower triangular with f(H) in the
/// top-left corner and the (m+k, 1) entry equal to e_m^T phi_k(H) e_1, the
/// k-th difference-quotient moment of f at the nodes.
struct AugmentedMatrix {
  ComplexMatrix base;
  NodeSequence nodes;
  ComplexMatrix assembled;
};

inline AugmentedMatrix augment(const ComplexMatrix& h, NodeSequence nodes) {
  if (h.rows() != h.cols()) throw DimensionError("augment: H must be square");
  if (nodes.empty()) throw InputError("augment: empty node list");
  const Index m = h.rows();
  const Index k = nodes.size();
  ComplexMatrix assembled = ComplexMatrix::Zero(m + k, m + k);
  assembled.topLeftCorner(m, m) = h;
  for (Index j = 0; j < k; ++j) {
    assembled(m + j, m + j - 1) = 1.0;
    assembled(m + j, m + j) = nodes[j];
  }
  return {h, std::move(nodes), std::move(assembled)};
}

/// Real fast path for the single-node augmentation used on every step.
inline Matrix augment_real(const Matrix& h, double z0) {
  if (h.rows() != h.cols()) throw DimensionError("augment: H must be square");
  const Index m = h.rows();
  Matrix assembled = Matrix::Zero(m + 1, m + 1);
  assembled.topLeftCorner(m, m) = h;
  assembled(m, m - 1) = 1.0;
  assembled(m, m) = z0;
  return assembled;
}

/// First column of f applied to the z0-augmented H. Entries 1..m reproduce
/// f(H) e_1; entry m+1 is the phi_1 moment e_m^T phi_1(H) e_1.
inline Vector augmented_first_column(const Matrix& h, double z0, const FunctionSpec& spec) {
  return funm(spec, augment_real(h, z0)).col(0);
}

/// A posteriori estimates and the relative versions that track the true
/// relative error. The denominator is the computable ||f_m||.
struct EstimatePair {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double xi1_rel = 0.0;
  double xi2_rel = 0.0;
  double approx_norm = 0.0;
};

namespace detail {

inline EstimatePair make_estimates(double beta, double h_next, double moment_f,
                                   double moment_phi1, double approx_norm) {
  EstimatePair est;
  est.xi1 = beta * h_next * std::abs(moment_f);
  est.xi2 = beta * h_next * std::abs(moment_phi1);
  est.approx_norm = approx_norm;
  if (approx_norm > 0.0) {
    est.xi1_rel = est.xi1 / approx_norm;
    est.xi2_rel = est.xi2 / approx_norm;
  } else {
    est.xi1_rel = est.xi1;
    est.xi2_rel = est.xi2;
  }
  return est;
}

}  // namespace detail

/// Approximation and xi_1/xi_2 estimates from one matrix-function evaluation
/// of the augmented projected matrix, with z0 = h_{1,1}:
///   c = f(-tau augment(H, z0)) e_1,
///   f_m = beta V c_{1:m},  xi_1 = beta h_next |c_m|,  xi_2 = beta h_next |c_{m+1}|.
inline std::pair<Vector, EstimatePair> xi_estimates(const KrylovDecomposition& dec,
                                                    const FunctionSpec& spec) {
  const Index m = dec.steps;
  const double z0 = dec.hess(0, 0);
  const Vector c = augmented_first_column(dec.hess, z0, spec);
  Vector approx = dec.beta * (dec.basis * c.head(m));
  EstimatePair est =
      detail::make_estimates(dec.beta, dec.h_next, c(m - 1), c(m), approx.norm());
  return {std::move(approx), est};
}

/// ceil(20 e ||A||): index beyond which the error-expansion tail is dominated
/// by the leading terms.
inline Index tail_index(double norm_a) {
  if (norm_a < 0.0) throw InputError("tail_index: negative norm");
  return static_cast<Index>(std::ceil(20.0 * std::exp(1.0) * norm_a));
}

/// phi_k moment e_m^T phi_k(H) e_1 of f(z) = kind(-tau z), extracted as the
/// bottom-left entry of f applied to the node-chained augmented matrix.
inline Complex phi_moment(const FunctionSpec& spec, const ComplexMatrix& h,
                          const NodeSequence& nodes) {
  AugmentedMatrix aug = augment(h, nodes);
  ComplexMatrix f = funm(spec, aug.assembled);
  return f(f.rows() - 1, 0);
}

/// One term of the error expansion
///   E_m(f) = sum_k  [beta h_next e_m^T phi_k(H) e_1] q_{k-1}(A) v_next,
/// q_0 = 1, q_k(z) = (z - z_0) ... (z - z_{k-1}).
struct ExpansionTerm {
  Index k = 0;
  Complex coefficient;      // beta h_next e_m^T phi_k(H) e_1
  ComplexVector direction;  // q_{k-1}(A) v_next
  double term_norm = 0.0;
};

struct ExpansionResult {
  std::vector<ExpansionTerm> terms;
  std::vector<ComplexVector> partial_sums;
};

namespace detail {

/// Moments e_m^T phi_k(H) e_1 for k = 1..count, all from one evaluation of
/// f over the fully chained augmented matrix (its top-left blocks are the
/// partially chained ones).
inline std::vector<Complex> phi_moments_augmented(const FunctionSpec& spec,
                                                  const ComplexMatrix& h,
                                                  const std::vector<Complex>& nodes) {
  const Index m = h.rows();
  AugmentedMatrix aug = augment(h, NodeSequence(nodes));
  ComplexMatrix f = funm(spec, aug.assembled);
  std::vector<Complex> moments(nodes.size());
  for (std::size_t k = 1; k <= nodes.size(); ++k)
    moments[k - 1] = f(m + static_cast<Index>(k) - 1, 0);
  return moments;
}

/// Same moments through the spectral decomposition of a Hermitian projected
/// matrix: e_m^T phi_k(T) e_1 = sum_i Q(m,i) Q(1,i) f[lambda_i, z_0..z_{k-1}],
/// with the divided-difference rows computed by the scaled-Taylor table.
/// Unlike the augmented extraction this keeps per-k relative accuracy, which
/// the finite-expansion identity needs once k is large.
inline std::vector<Complex> phi_moments_spectral(const FunctionSpec& spec,
                                                 const SymTridiagonal& t,
                                                 const std::vector<Complex>& nodes) {
  TridiagonalEigen eig = symtrid_eig(t);
  const Index m = t.size();
  std::vector<Complex> moments(nodes.size(), Complex(0.0, 0.0));
  std::vector<Complex> chained(nodes.size() + 1);
  for (std::size_t j = 0; j < nodes.size(); ++j) chained[j + 1] = nodes[j];
  for (Index i = 0; i < m; ++i) {
    const double weight = eig.vectors(m - 1, i) * eig.vectors(0, i);
    chained[0] = eig.values(i);
    std::vector<Complex> row = detail::spec_divdiff_row(spec, chained);
    for (std::size_t k = 1; k <= nodes.size(); ++k) moments[k - 1] += weight * row[k];
  }
  return moments;
}

}  // namespace detail

/// Terms 1..K of the error expansion for the decomposition's approximation,
/// together with the running partial sums. Nodes are reused cyclically (the
/// last node repeats) when fewer than K are given. Terms stop early once
/// negligible against the running sum.
inline ExpansionResult expansion_terms(const SparseMatrix& a, const KrylovDecomposition& dec,
                                       const FunctionSpec& spec, const NodeSequence& nodes,
                                       Index count) {
  if (count < 1) throw InputError("expansion_terms: need K >= 1");
  if (nodes.empty()) throw InputError("expansion_terms: empty node list");
  count = std::min<Index>(count, 5000);

  ExpansionResult result;
  if (dec.h_next == 0.0) return result;  // exact approximation, no error terms

  std::vector<Complex> padded(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k)
    padded[static_cast<std::size_t>(k)] = k < nodes.size() ? nodes[k] : nodes[nodes.size() - 1];

  const std::vector<Complex> moments =
      dec.tridiagonal
          ? detail::phi_moments_spectral(spec, *dec.tridiagonal, padded)
          : detail::phi_moments_augmented(spec, dec.hess.cast<Complex>(), padded);

  ComplexVector direction = dec.v_next.cast<Complex>();
  ComplexVector sum = ComplexVector::Zero(a.size());
  const double scale = dec.beta * dec.h_next;
  for (Index k = 1; k <= count; ++k) {
    ExpansionTerm term;
    term.k = k;
    term.coefficient = scale * moments[static_cast<std::size_t>(k - 1)];
    term.direction = direction;
    term.term_norm = std::abs(term.coefficient) * direction.norm();
    sum += term.coefficient * direction;
    result.terms.push_back(term);
    result.partial_sums.push_back(sum);
    if (term.term_norm < 1e-2 * std::numeric_limits<double>::epsilon() * sum.norm()) break;
    if (k < count) {
      direction = a * direction - padded[static_cast<std::size_t>(k - 1)] * direction;
    }
  }
  return result;
}

/// Eigenvalues of H ordered so equal values are contiguous, for use as
/// expansion nodes.
inline NodeSequence ritz_nodes(const ComplexMatrix& h) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(h, false);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("ritz_nodes: eigenvalue iteration failed", 0.0);
  std::vector<Complex> values(solver.eigenvalues().data(),
                              solver.eigenvalues().data() + solver.eigenvalues().size());
  return NodeSequence::contiguous_sorted(std::move(values));
}

}  // namespace kryfun
