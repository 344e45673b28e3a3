#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "kryfun/function_spec.hpp"
#include "kryfun/types.hpp"

namespace kryfun {

/// Ordered interpolation nodes z_0, z_1, ... with the contiguity invariant:
/// equal nodes must be adjacent (z_i = z_j with i < j forces every node in
/// between to be equal as well). Confluent divided differences rely on it.
class NodeSequence {
 public:
  NodeSequence() = default;

  explicit NodeSequence(std::vector<Complex> nodes) : nodes_(std::move(nodes)) {
    validate_contiguity();
  }

  /// k copies of the same node.
  static NodeSequence confluent(Complex z0, Index k) {
    return NodeSequence(std::vector<Complex>(static_cast<std::size_t>(k), z0));
  }

  /// Sorts lexicographically by (re, im), which makes equal values adjacent.
  static NodeSequence contiguous_sorted(std::vector<Complex> nodes) {
    std::sort(nodes.begin(), nodes.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return NodeSequence(std::move(nodes));
  }

  const std::vector<Complex>& values() const { return nodes_; }
  Index size() const { return static_cast<Index>(nodes_.size()); }
  bool empty() const { return nodes_.empty(); }
  Complex operator[](Index i) const { return nodes_[static_cast<std::size_t>(i)]; }

 private:
  void validate_contiguity() const {
    // A value whose run has ended must never reappear.
    std::vector<Complex> closed;
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      if (nodes_[i] == nodes_[i - 1]) continue;
      closed.push_back(nodes_[i - 1]);
      for (const Complex& z : closed) {
        if (z == nodes_[i])
          throw InputError("NodeSequence: equal nodes must be contiguous");
      }
    }
  }

  std::vector<Complex> nodes_;
};

/// Newton divided difference f[z_0, ..., z_k] for f(z) = kind(-tau z).
/// Repeated (contiguous) nodes use the analytic derivatives of the kind,
/// f[z,...,z] (r+1 copies) = f^(r)(z) / r!.
inline Complex divided_difference(const FunctionSpec& spec, const NodeSequence& nodes) {
  if (nodes.empty()) throw InputError("divided_difference: empty node list");
  const Index n = nodes.size();
  std::vector<Complex> table(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) table[static_cast<std::size_t>(i)] = spec(nodes[i]);
  double factorial = 1.0;
  for (Index order = 1; order < n; ++order) {
    factorial *= static_cast<double>(order);
    // After this sweep, table[i] = f[z_i, ..., z_{i+order}].
    for (Index i = 0; i + order < n; ++i) {
      const Complex lo = nodes[i];
      const Complex hi = nodes[i + order];
      auto& slot = table[static_cast<std::size_t>(i)];
      if (hi == lo) {
        slot = spec.derivative(lo, static_cast<int>(order)) / factorial;
      } else {
        slot = (table[static_cast<std::size_t>(i + 1)] - slot) / (hi - lo);
      }
    }
  }
  return table[0];
}

/// First-order difference quotient phi_1(z) = (f(z) - f(z0)) / (z - z0) for
/// f(z) = kind(-tau z), with the confluent limit f'(z0) once z is within
/// 1e-8 * (1 + |z0|) of z0.
inline Complex phi1_scalar(const FunctionSpec& spec, Complex z0, Complex z) {
  if (std::abs(z - z0) <= 1e-8 * (1.0 + std::abs(z0))) return spec.derivative(z0, 1);
  return (spec(z) - spec(z0)) / (z - z0);
}

namespace detail {

/// Row of exponential divided differences
///   { e[x_0], e[x_0,x_1], ..., e[x_0,...,x_k] }
/// computed with uniform per-entry relative accuracy via the Opitz table:
/// the full table is exp(Z) for the bidiagonal Z = bidiag(x_i; 1), evaluated
/// as a Taylor series after shifting the nodes to their mean and scaling the
/// exponent so the node radius is <= 0.35, then repeatedly squaring.
/// The naive recurrence loses all accuracy here because high-order entries
/// decay like 1/k! while the recurrence subtracts O(1) quantities.
inline std::vector<Complex> exp_divdiff_row(const std::vector<Complex>& x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (n == 1) return {std::exp(x[0])};

  Complex mean = 0.0;
  for (const Complex& xi : x) mean += xi;
  mean /= static_cast<double>(n);
  std::vector<Complex> shifted(n);
  double radius = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    shifted[i] = x[i] - mean;
    radius = std::max(radius, std::abs(shifted[i]));
  }

  int squarings = 0;
  if (radius > 0.35) squarings = static_cast<int>(std::ceil(std::log2(radius / 0.35)));
  const double scale = std::ldexp(1.0, -squarings);

  // F = sum_j (c Z)^j / j! over the upper triangle, c = 2^-squarings.
  ComplexMatrix table = ComplexMatrix::Identity(static_cast<Index>(n), static_cast<Index>(n));
  ComplexMatrix term = table;
  for (int j = 1; j <= 400; ++j) {
    ComplexMatrix next = ComplexMatrix::Zero(static_cast<Index>(n), static_cast<Index>(n));
    const double inv = scale / static_cast<double>(j);
    for (Index r = 0; r < static_cast<Index>(n); ++r) {
      for (Index c = r; c < static_cast<Index>(n); ++c) {
        Complex v = term(r, c) * shifted[static_cast<std::size_t>(c)];
        if (c > r) v += term(r, c - 1);
        next(r, c) = v * inv;
      }
    }
    term.swap(next);
    table += term;
    bool settled = true;
    for (Index r = 0; r < static_cast<Index>(n) && settled; ++r)
      for (Index c = r; c < static_cast<Index>(n); ++c)
        if (std::abs(term(r, c)) > 1e-20 * std::abs(table(r, c))) {
          settled = false;
          break;
        }
    if (settled) break;
  }

  for (int s = 0; s < squarings; ++s) {
    ComplexMatrix sq = ComplexMatrix::Zero(static_cast<Index>(n), static_cast<Index>(n));
    for (Index r = 0; r < static_cast<Index>(n); ++r)
      for (Index c = r; c < static_cast<Index>(n); ++c)
        for (Index l = r; l <= c; ++l) sq(r, c) += table(r, l) * table(l, c);
    table.swap(sq);
  }

  const Complex shift = std::exp(mean);
  std::vector<Complex> row(n);
  for (std::size_t j = 0; j < n; ++j) row[j] = shift * table(0, static_cast<Index>(j));
  return row;
}

/// Row of divided differences of f(z) = kind(-tau z) at the given nodes,
/// reduced to exponential rows: f[z_0..z_j] of z -> e^{az} equals
/// a^j * exp[a z_0, ..., a z_j], and cos/sin split into two exponentials.
inline std::vector<Complex> spec_divdiff_row(const FunctionSpec& spec,
                                             const std::vector<Complex>& nodes) {
  const std::size_t n = nodes.size();
  auto scaled_row = [&nodes, n](Complex a) {
    std::vector<Complex> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = a * nodes[i];
    std::vector<Complex> row = exp_divdiff_row(x);
    Complex powa = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] *= powa;
      powa *= a;
    }
    return row;
  };

  switch (spec.kind) {
    case FunctionKind::Exp:
      return scaled_row(Complex(-spec.tau, 0.0));
    case FunctionKind::Cos: {
      // cos(-tau z) = (e^{-i tau z} + e^{i tau z}) / 2
      auto plus = scaled_row(Complex(0.0, -spec.tau));
      auto minus = scaled_row(Complex(0.0, spec.tau));
      for (std::size_t j = 0; j < n; ++j) plus[j] = 0.5 * (plus[j] + minus[j]);
      return plus;
    }
    case FunctionKind::Sin: {
      // sin(-tau z) = (e^{-i tau z} - e^{i tau z}) / (2i)
      auto plus = scaled_row(Complex(0.0, -spec.tau));
      auto minus = scaled_row(Complex(0.0, spec.tau));
      const Complex half_over_i(0.0, -0.5);
      for (std::size_t j = 0; j < n; ++j) plus[j] = half_over_i * (plus[j] - minus[j]);
      return plus;
    }
  }
  return {};
}

}  // namespace detail

}  // namespace kryfun
