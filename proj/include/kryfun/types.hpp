#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace kryfun {

using Index = Eigen::Index;
using Real = double;
using Complex = std::complex<double>;

using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Invalid argument values or violated preconditions.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Operands whose shapes do not match.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An iteration hit its cap; carries the best value reached so far.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double best)
      : std::runtime_error(what), best_estimate(best) {}
  double best_estimate;
};

/// A computation produced Inf/NaN.
struct OverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based offending line.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line_number)
      : std::runtime_error(what + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  std::size_t line;
};

}  // namespace kryfun
