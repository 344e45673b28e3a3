#pragma once

#include <chrono>
#include <utility>
#include <vector>

#include "kryfun/estimates.hpp"
#include "kryfun/krylov.hpp"
#include "kryfun/oracle.hpp"
#include "kryfun/record.hpp"
#include "kryfun/sparse.hpp"

namespace kryfun {

/// Accumulated state of the restarted Arnoldi method. The cycles' projected
/// matrices stack into the block lower-bidiagonal h_acc (diagonal blocks
/// H^(j), subdiagonal blocks h^(j)_{m+1,m} e_1 e_m^T), which together with
/// W = [V^(1), ..., V^(k)] forms a Krylov-like decomposition of A.
struct RestartState {
  Index cycles = 0;
  Index block = 0;          // requested block size m
  Index total_dim = 0;      // sum of realized block sizes
  Matrix h_acc;             // total_dim x total_dim
  double beta = 0.0;        // ||v||
  double h_last = 0.0;      // current cycle's h_{m+1,m}; 0 after breakdown
  Vector f_approx;          // running approximation to f(A) v
  bool exact = false;       // lucky breakdown happened
};

/// xi estimates for the restarted method: the plain formulas applied to the
/// accumulated Hessenberg matrix, z0 = (h_acc)_{1,1}.
inline EstimatePair xi_estimates_restarted(const RestartState& state, const FunctionSpec& spec) {
  if (state.cycles < 1) throw InputError("xi_estimates_restarted: no completed cycle");
  const Index k = state.total_dim;
  const Vector c = augmented_first_column(state.h_acc, state.h_acc(0, 0), spec);
  return detail::make_estimates(state.beta, state.h_last, c(k - 1), c(k),
                                state.f_approx.norm());
}

/// Runs Arnoldi cycles of length m, each on the previous cycle's next vector,
/// and accumulates the Krylov-like approximation
///   f_approx += beta V^(k) [f(-tau h_acc) e_1]_{trailing block}.
class RestartProcess {
 public:
  RestartProcess(const SparseMatrix& a, const Vector& v, const FunctionSpec& spec, Index block,
                 double breakdown_tol = 1e-14)
      : a_(a), spec_(spec), breakdown_tol_(breakdown_tol) {
    if (block < 2) throw InputError("restarted_approx: need block size m >= 2");
    state_.block = block;
    state_.beta = v.norm();
    if (state_.beta == 0.0) throw InputError("restarted_approx: starting vector is zero");
    state_.f_approx = Vector::Zero(a.size());
    start_ = v / state_.beta;
  }

  /// Runs one cycle; returns false once the process is exact (breakdown).
  bool cycle() {
    if (state_.exact) return false;
    ArnoldiProcess process(a_, start_, std::min(state_.block, a_.size()), breakdown_tol_);
    while (process.step()) {
    }
    KrylovDecomposition dec = process.decomposition();
    matvecs_ += dec.steps;

    const Index old = state_.total_dim;
    const Index grown = old + dec.steps;
    Matrix h_acc = Matrix::Zero(grown, grown);
    if (old > 0) {
      h_acc.topLeftCorner(old, old) = state_.h_acc;
      h_acc(old, old - 1) = prev_h_;  // h^(k-1)_{m+1,m} e_1 e_m^T coupling block
    }
    h_acc.block(old, old, dec.steps, dec.steps) = dec.hess;
    state_.h_acc = std::move(h_acc);
    state_.total_dim = grown;
    state_.cycles += 1;
    state_.h_last = dec.h_next;

    const Vector c = augmented_first_column(state_.h_acc, state_.h_acc(0, 0), spec_);
    state_.f_approx += state_.beta * (dec.basis * c.segment(old, dec.steps));
    estimates_ = detail::make_estimates(state_.beta, state_.h_last, c(grown - 1), c(grown),
                                        state_.f_approx.norm());

    if (dec.exact) {
      state_.exact = true;
      return false;
    }
    prev_h_ = dec.h_next;
    start_ = dec.v_next;
    return true;
  }

  const RestartState& state() const { return state_; }
  const EstimatePair& estimates() const { return estimates_; }
  const Vector& approx() const { return state_.f_approx; }
  Index matvecs() const { return matvecs_; }

 private:
  const SparseMatrix& a_;
  FunctionSpec spec_;
  double breakdown_tol_;
  RestartState state_;
  EstimatePair estimates_;
  Vector start_;
  double prev_h_ = 0.0;
  Index matvecs_ = 0;
};

struct RestartOptions {
  Index max_cycles = 60;
  double eps = 1e-12;
  Estimator estimator = Estimator::Xi2;
  /// When set, the stopping rule uses the true relative error against this
  /// reference instead of the estimator, and records carry true_rel.
  const OracleResult* oracle = nullptr;
  double breakdown_tol = 1e-14;
};

struct RestartResult {
  Vector approx;
  std::vector<ConvergenceRecord> records;
  bool converged = false;
  Index matvecs = 0;
};

inline RestartResult restarted_approx(const SparseMatrix& a, const Vector& v,
                                      const FunctionSpec& spec, Index block,
                                      const RestartOptions& options = {}) {
  if (options.eps <= 0.0) throw InputError("restarted_approx: eps must be positive");
  RestartProcess process(a, v, spec, block, options.breakdown_tol);
  RestartResult result;
  using clock = std::chrono::steady_clock;
  for (Index k = 0; k < options.max_cycles; ++k) {
    const auto t0 = clock::now();
    const bool more = process.cycle();
    const EstimatePair& est = process.estimates();
    ConvergenceRecord record;
    record.step = process.state().total_dim;
    record.xi1 = est.xi1;
    record.xi2 = est.xi2;
    record.xi1_rel = est.xi1_rel;
    record.xi2_rel = est.xi2_rel;
    if (options.oracle)
      record.true_rel = true_error(process.approx(), *options.oracle).second;
    record.wall_ms =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    result.records.push_back(record);

    const double monitored =
        options.oracle ? *record.true_rel
                       : (options.estimator == Estimator::Xi1 ? est.xi1_rel : est.xi2_rel);
    if (monitored <= options.eps || !more) {
      result.converged = monitored <= options.eps || process.state().exact;
      break;
    }
  }
  result.approx = process.approx();
  result.matvecs = process.matvecs();
  return result;
}

}  // namespace kryfun
