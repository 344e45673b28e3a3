#pragma once

#include <chrono>
#include <optional>

#include "kryfun/bounds.hpp"
#include "kryfun/lognorm.hpp"
#include "kryfun/run.hpp"

namespace kryfun {

/// Stepwise driver that additionally tabulates the four exponential error bounds at
/// every recorded step. Exponential only. mu2[-A] is computed once up front;
/// the Hermitian bounds use the supplied spectral interval (estimated from
/// Ritz values when absent and the method is Lanczos).
inline RunResult run_krylov_with_bounds(const SparseMatrix& a, const Vector& v,
                                        const FunctionSpec& spec, const RunOptions& options,
                                        Index n_t = 257,
                                        std::optional<SpectralInterval> interval = {}) {
  detail::require_exp(spec, "run_krylov_with_bounds");
  if (options.eps <= 0.0) throw InputError("run_krylov_with_bounds: eps must be positive");
  const double mu2 = log_norm_neg(a);
  const bool hermitian_path = options.method == Method::Lanczos;
  if (hermitian_path && !interval) interval = estimate_spectral_interval(a);

  RunResult result;
  using clock = std::chrono::steady_clock;
  auto drive = [&](auto& process) {
    while (true) {
      const auto t0 = clock::now();
      const Index before = process.steps();
      process.step();
      if (process.steps() == before) break;

      KrylovDecomposition dec = process.decomposition();
      auto [approx, est] = xi_estimates(dec, spec);
      ConvergenceRecord record;
      record.step = process.steps();
      record.xi1 = est.xi1;
      record.xi2 = est.xi2;
      record.xi1_rel = est.xi1_rel;
      record.xi2_rel = est.xi2_rel;
      if (options.oracle) record.true_rel = true_error(approx, *options.oracle).second;
      record.bounds = compute_bound_report(a, dec, spec, mu2,
                                           hermitian_path ? interval : std::nullopt, n_t);
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
  };

  const Index cap = std::min(options.max_dim, a.size());
  if (options.method == Method::Lanczos) {
    LanczosProcess process(a, v, cap, options.reorth, options.breakdown_tol);
    drive(process);
  } else {
    ArnoldiProcess process(a, v, cap, options.breakdown_tol);
    drive(process);
  }
  return result;
}

}  // namespace kryfun
