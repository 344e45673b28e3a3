#pragma once

#include <algorithm>
#include <cmath>
#include <tuple>
#include <utility>
#include <vector>

#include "kryfun/types.hpp"

namespace kryfun {

/// Square real sparse matrix in compressed-sparse-row form.
/// Column indices are strictly increasing within every row.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  SparseMatrix(Index n, std::vector<Index> row_ptr, std::vector<Index> col_idx,
               std::vector<double> values)
      : n_(n),
        row_ptr_(std::move(row_ptr)),
        col_idx_(std::move(col_idx)),
        values_(std::move(values)) {
    validate();
  }

  /// Builds from (row, col, value) triplets; duplicates are summed.
  static SparseMatrix from_triplets(Index n,
                                    std::vector<std::tuple<Index, Index, double>> entries) {
    std::sort(entries.begin(), entries.end());
    std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1, 0);
    std::vector<Index> col_idx;
    std::vector<double> values;
    col_idx.reserve(entries.size());
    values.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
      auto [r, c, v] = entries[k];
      if (r < 0 || r >= n || c < 0 || c >= n)
        throw InputError("SparseMatrix::from_triplets: index out of range");
      if (k > 0 && std::get<0>(entries[k - 1]) == r && std::get<1>(entries[k - 1]) == c) {
        values.back() += v;
        continue;
      }
      col_idx.push_back(c);
      values.push_back(v);
      row_ptr[static_cast<std::size_t>(r) + 1]++;
    }
    for (Index i = 0; i < n; ++i)
      row_ptr[static_cast<std::size_t>(i) + 1] += row_ptr[static_cast<std::size_t>(i)];
    return SparseMatrix(n, std::move(row_ptr), std::move(col_idx), std::move(values));
  }

  Index size() const { return n_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }
  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// y = A x
  void multiply(const Vector& x, Vector& y) const {
    if (x.size() != n_) throw DimensionError("matvec: vector length does not match");
    y.resize(n_);
    for (Index i = 0; i < n_; ++i) {
      double s = 0.0;
      for (Index k = row_ptr_[static_cast<std::size_t>(i)];
           k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
        s += values_[static_cast<std::size_t>(k)] * x(col_idx_[static_cast<std::size_t>(k)]);
      y(i) = s;
    }
  }

  template <class Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> operator*(
      const Eigen::MatrixBase<Derived>& xexpr) const {
    using Scalar = typename Derived::Scalar;
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = xexpr;
    if (x.size() != n_) throw DimensionError("matvec: vector length does not match");
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(n_);
    for (Index i = 0; i < n_; ++i) {
      Scalar s{};
      for (Index k = row_ptr_[static_cast<std::size_t>(i)];
           k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
        s += values_[static_cast<std::size_t>(k)] * x(col_idx_[static_cast<std::size_t>(k)]);
      y(i) = s;
    }
    return y;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
  }

  SparseMatrix transposed() const {
    std::vector<std::tuple<Index, Index, double>> entries;
    entries.reserve(values_.size());
    for (Index i = 0; i < n_; ++i)
      for (Index k = row_ptr_[static_cast<std::size_t>(i)];
           k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
        entries.emplace_back(col_idx_[static_cast<std::size_t>(k)], i,
                             values_[static_cast<std::size_t>(k)]);
    return from_triplets(n_, std::move(entries));
  }

  SparseMatrix scaled(double t) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= t;
    return SparseMatrix(n_, row_ptr_, col_idx_, std::move(v));
  }

  /// Exact structural + value equality of A and A^T.
  bool is_symmetric() const {
    SparseMatrix at = transposed();
    return at.row_ptr_ == row_ptr_ && at.col_idx_ == col_idx_ && at.values_ == values_;
  }

  bool is_diagonal() const {
    for (Index i = 0; i < n_; ++i)
      for (Index k = row_ptr_[static_cast<std::size_t>(i)];
           k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
        if (col_idx_[static_cast<std::size_t>(k)] != i) return false;
    return true;
  }

  /// Diagonal entries (zeros where not stored).
  Vector diagonal() const {
    Vector d = Vector::Zero(n_);
    for (Index i = 0; i < n_; ++i)
      for (Index k = row_ptr_[static_cast<std::size_t>(i)];
           k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
        if (col_idx_[static_cast<std::size_t>(k)] == i) d(i) = values_[static_cast<std::size_t>(k)];
    return d;
  }

  Matrix dense() const {
    Matrix a = Matrix::Zero(n_, n_);
    for (Index i = 0; i < n_; ++i)
      for (Index k = row_ptr_[static_cast<std::size_t>(i)];
           k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
        a(i, col_idx_[static_cast<std::size_t>(k)]) = values_[static_cast<std::size_t>(k)];
    return a;
  }

 private:
  void validate() const {
    if (n_ < 0) throw InputError("SparseMatrix: negative dimension");
    if (row_ptr_.size() != static_cast<std::size_t>(n_) + 1)
      throw InputError("SparseMatrix: row_ptr must have length n+1");
    if (row_ptr_.front() != 0 || row_ptr_.back() != static_cast<Index>(values_.size()))
      throw InputError("SparseMatrix: row_ptr endpoints do not match nnz");
    if (col_idx_.size() != values_.size())
      throw InputError("SparseMatrix: col_idx/values length mismatch");
    for (Index i = 0; i < n_; ++i) {
      const Index lo = row_ptr_[static_cast<std::size_t>(i)];
      const Index hi = row_ptr_[static_cast<std::size_t>(i) + 1];
      if (hi < lo) throw InputError("SparseMatrix: row_ptr not monotone");
      for (Index k = lo; k < hi; ++k) {
        const Index c = col_idx_[static_cast<std::size_t>(k)];
        if (c < 0 || c >= n_) throw InputError("SparseMatrix: column index out of range");
        if (k > lo && c <= col_idx_[static_cast<std::size_t>(k) - 1])
          throw InputError("SparseMatrix: columns not strictly increasing within a row");
        if (!std::isfinite(values_[static_cast<std::size_t>(k)]))
          throw InputError("SparseMatrix: non-finite value");
      }
    }
  }

  Index n_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// Closed real interval [a, b] assumed to contain spec(A).
struct SpectralInterval {
  double a = 0.0;
  double b = 0.0;

  SpectralInterval() = default;
  SpectralInterval(double lo, double hi) : a(lo), b(hi) {
    if (!(a <= b)) throw InputError("SpectralInterval: requires a <= b");
  }
};

/// Diagonal matrix with N equidistant eigenvalues spanning the interval.
inline SparseMatrix build_diag_spectrum(Index n, const SpectralInterval& interval) {
  if (n < 2) throw InputError("build_diag_spectrum: need N >= 2");
  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1);
  std::vector<Index> col_idx(static_cast<std::size_t>(n));
  std::vector<double> values(static_cast<std::size_t>(n));
  const double step = (interval.b - interval.a) / static_cast<double>(n - 1);
  for (Index i = 0; i < n; ++i) {
    row_ptr[static_cast<std::size_t>(i)] = i;
    col_idx[static_cast<std::size_t>(i)] = i;
    values[static_cast<std::size_t>(i)] = interval.a + step * static_cast<double>(i);
  }
  row_ptr[static_cast<std::size_t>(n)] = n;
  return SparseMatrix(n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

/// 3D convection-diffusion operator on the unit cube, seven-point Laplacian
/// stencil plus central first-order differences, Dirichlet boundary:
///   A = -(1/h^2) [ I (x) (I (x) C1) + (B (x) I + I (x) C2) (x) I ]
/// with h = 1/(n+1), B = tridiag(1,-2,1), C_j = tridiag(1+z_j, -2, 1-z_j),
/// z_j = delta_j h / 2. Dimension N = n^3.
inline SparseMatrix build_convection_diffusion(Index n, double delta1, double delta2) {
  if (n < 2) throw InputError("build_convection_diffusion: need n >= 2");
  const double h = 1.0 / static_cast<double>(n + 1);
  const double zeta1 = delta1 * h / 2.0;
  const double zeta2 = delta2 * h / 2.0;
  const double scale = -1.0 / (h * h);
  const Index nn = n * n;
  const Index total = n * n * n;

  std::vector<std::tuple<Index, Index, double>> entries;
  entries.reserve(static_cast<std::size_t>(7 * total));
  for (Index i1 = 0; i1 < n; ++i1) {
    for (Index i2 = 0; i2 < n; ++i2) {
      for (Index i3 = 0; i3 < n; ++i3) {
        const Index row = i1 * nn + i2 * n + i3;
        // diagonal: C1 + B + C2 each contribute -2
        entries.emplace_back(row, row, scale * -6.0);
        // I (x) I (x) C1 couples along i3
        if (i3 > 0) entries.emplace_back(row, row - 1, scale * (1.0 + zeta1));
        if (i3 + 1 < n) entries.emplace_back(row, row + 1, scale * (1.0 - zeta1));
        // I (x) C2 (x) I couples along i2
        if (i2 > 0) entries.emplace_back(row, row - n, scale * (1.0 + zeta2));
        if (i2 + 1 < n) entries.emplace_back(row, row + n, scale * (1.0 - zeta2));
        // B (x) I (x) I couples along i1
        if (i1 > 0) entries.emplace_back(row, row - nn, scale * 1.0);
        if (i1 + 1 < n) entries.emplace_back(row, row + nn, scale * 1.0);
      }
    }
  }
  return SparseMatrix::from_triplets(total, std::move(entries));
}

}  // namespace kryfun
