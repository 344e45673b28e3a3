#pragma once

#include <chrono>
#include <utility>
#include <vector>

#include "kryfun/estimates.hpp"
#include "kryfun/krylov.hpp"
#include "kryfun/oracle.hpp"
#include "kryfun/record.hpp"
#include "kryfun/restart.hpp"
#include "kryfun/sparse.hpp"

namespace kryfun {

enum class Method { Arnoldi, Lanczos };

struct RunOptions {
  Method method = Method::Arnoldi;
  Index max_dim = 200;
  double eps = 1e-12;
  Estimator estimator = Estimator::Xi2;
  /// Stop on the true relative error (and record it) when a reference value
  /// is supplied; otherwise stop on the chosen relative estimate.
  const OracleResult* oracle = nullptr;
  double breakdown_tol = 1e-14;
  bool reorth = true;
};

struct RunResult {
  Vector approx;
  std::vector<ConvergenceRecord> records;
  bool converged = false;
  Index matvecs = 0;
};

namespace detail {

template <class Process>
RunResult run_stepwise(Process& process, const FunctionSpec& spec, const RunOptions& options) {
  RunResult result;
  using clock = std::chrono::steady_clock;
  while (true) {
    const auto t0 = clock::now();
    const Index before = process.steps();
    process.step();
    if (process.steps() == before) break;  // dimension cap reached

    auto [approx, est] = xi_estimates(process.decomposition(), spec);
    ConvergenceRecord record;
    record.step = process.steps();
    record.xi1 = est.xi1;
    record.xi2 = est.xi2;
    record.xi1_rel = est.xi1_rel;
    record.xi2_rel = est.xi2_rel;
    if (options.oracle) record.true_rel = true_error(approx, *options.oracle).second;
    record.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    result.records.push_back(record);
    result.approx = std::move(approx);

    const double monitored =
        options.oracle ? *record.true_rel
                       : (options.estimator == Estimator::Xi1 ? est.xi1_rel : est.xi2_rel);
    if (monitored <= options.eps || process.exact()) {
      result.converged = true;
      break;
    }
  }
  result.matvecs = process.steps();
  return result;
}

}  // namespace detail

/// Grows the Krylov space one step at a time, recording xi_1/xi_2 (and the
/// true relative error when a reference is given) until the stopping rule
/// fires or max_dim is reached.
inline RunResult run_krylov(const SparseMatrix& a, const Vector& v, const FunctionSpec& spec,
                            const RunOptions& options = {}) {
  if (options.eps <= 0.0) throw InputError("run_krylov: eps must be positive");
  const Index cap = std::min(options.max_dim, a.size());
  if (options.method == Method::Lanczos) {
    LanczosProcess process(a, v, cap, options.reorth, options.breakdown_tol);
    return detail::run_stepwise(process, spec, options);
  }
  ArnoldiProcess process(a, v, cap, options.breakdown_tol);
  return detail::run_stepwise(process, spec, options);
}

}  // namespace kryfun
