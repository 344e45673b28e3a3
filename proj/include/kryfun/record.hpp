#pragma once

#include <optional>
#include <vector>

#include "kryfun/bounds.hpp"
#include "kryfun/types.hpp"

namespace kryfun {

/// Which a posteriori estimate drives the stopping rule when no oracle is
/// available.
enum class Estimator { Xi1, Xi2 };

/// One row of a convergence trace: for plain runs `step` is the Krylov
/// dimension m, for restarted runs the cumulative dimension k*m.
struct ConvergenceRecord {
  Index step = 0;
  double xi1 = 0.0;
  double xi2 = 0.0;
  double xi1_rel = 0.0;
  double xi2_rel = 0.0;
  std::optional<double> true_rel;
  std::optional<BoundReport> bounds;
  double wall_ms = 0.0;
};

}  // namespace kryfun
