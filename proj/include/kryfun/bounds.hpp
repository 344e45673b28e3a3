#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "kryfun/divided_difference.hpp"
#include "kryfun/estimates.hpp"
#include "kryfun/krylov.hpp"
#include "kryfun/lognorm.hpp"
#include "kryfun/sparse.hpp"

namespace kryfun {

/// (e^x - 1) / x, switching to a 4-term series below |x| = 1e-6 to avoid the
/// 0/0 form while keeping ~1e-14 accuracy.
inline double expm1_over_x(double x) {
  if (std::abs(x) < 1e-6) return 1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0;
  return std::expm1(x) / x;
}

/// gamma_1 = e^{tau (b-a)} (e^{-tau lambda_min} - 1) / (-tau lambda_min),
/// the constant tying xi_1 to the error norm for Hermitian A with spectrum
/// in [a, b]; the quotient factor degenerates to 1 at lambda_min = 0.
inline double gamma1(const SpectralInterval& interval, double lambda_min, double tau) {
  if (tau < 0.0) throw InputError("gamma1: tau must be nonnegative");
  if (lambda_min < interval.a || lambda_min > interval.b)
    throw InputError("gamma1: lambda_min must lie in [a, b]");
  const double front = std::exp(tau * (interval.b - interval.a));
  if (lambda_min == 0.0) return front;
  return front * expm1_over_x(-tau * lambda_min);
}

namespace detail {

inline void require_exp(const FunctionSpec& spec, const char* who) {
  if (spec.kind != FunctionKind::Exp)
    throw InputError(std::string(who) + ": bounds are exponential-only");
  if (spec.tau < 0.0) throw InputError(std::string(who) + ": tau must be nonnegative");
}

inline const SymTridiagonal& require_tridiagonal(const KrylovDecomposition& dec,
                                                 const char* who) {
  if (!dec.tridiagonal)
    throw InputError(std::string(who) + ": needs a Lanczos (tridiagonal) decomposition");
  return *dec.tridiagonal;
}

/// max over n_t uniform samples of |e_m^T e^{-t H} e_1|, t in [0, tau].
/// Spectral evaluation for tridiagonal H, one dense call per sample otherwise.
inline double max_moment_exp(const KrylovDecomposition& dec, double tau, Index n_t) {
  if (n_t < 2) throw InputError("bounds: need at least 2 samples");
  const Index m = dec.steps;
  double best = 0.0;
  if (dec.tridiagonal) {
    TridiagonalEigen eig = symtrid_eig(*dec.tridiagonal);
    for (Index j = 0; j < n_t; ++j) {
      const double t = tau * static_cast<double>(j) / static_cast<double>(n_t - 1);
      double moment = 0.0;
      for (Index i = 0; i < m; ++i)
        moment += eig.vectors(m - 1, i) * eig.vectors(0, i) * std::exp(-t * eig.values(i));
      best = std::max(best, std::abs(moment));
    }
  } else {
    for (Index j = 0; j < n_t; ++j) {
      const double t = tau * static_cast<double>(j) / static_cast<double>(n_t - 1);
      best = std::max(best, std::abs(funm(FunctionSpec(FunctionKind::Exp, t), dec.hess)(m - 1, 0)));
    }
  }
  return best;
}

/// max over samples of |e_m^T phi_1(-t H_m) e_1| where phi_1 carries the node
/// -t z0; equals the (m+1, 1) entry of e^{-t augment(H, z0)} divided by t.
inline double max_moment_phi1(const KrylovDecomposition& dec, double z0, double tau,
                              Index n_t) {
  if (n_t < 2) throw InputError("bounds: need at least 2 samples");
  const Index m = dec.steps;
  double best = (m == 1) ? 1.0 : 0.0;  // t = 0 limit
  if (dec.tridiagonal) {
    TridiagonalEigen eig = symtrid_eig(*dec.tridiagonal);
    for (Index j = 1; j < n_t; ++j) {
      const double t = tau * static_cast<double>(j) / static_cast<double>(n_t - 1);
      const FunctionSpec at_t(FunctionKind::Exp, t);
      Complex moment = 0.0;
      for (Index i = 0; i < m; ++i)
        moment += eig.vectors(m - 1, i) * eig.vectors(0, i) *
                  phi1_scalar(at_t, z0, eig.values(i));
      best = std::max(best, std::abs(moment) / t);
    }
  } else {
    const Matrix augmented = augment_real(dec.hess, z0);
    for (Index j = 1; j < n_t; ++j) {
      const double t = tau * static_cast<double>(j) / static_cast<double>(n_t - 1);
      const double entry = funm(FunctionSpec(FunctionKind::Exp, t), augmented)(m, 0);
      best = std::max(best, std::abs(entry) / t);
    }
  }
  return best;
}

inline double shifted_next_norm(const SparseMatrix& a, const KrylovDecomposition& dec,
                                double z0) {
  return (a * dec.v_next - z0 * dec.v_next).norm();
}

}  // namespace detail

/// Error bound for general operators through the logarithmic norm:
///   ||E_m|| <= tau beta h_next max_t |e_m^T e^{-t H_m} e_1| (e^{tau mu2}-1)/(tau mu2),
/// mu2 = mu2[-A]; the max is approximated by n_t uniform samples.
inline double bound41(const KrylovDecomposition& dec, const FunctionSpec& spec,
                          double mu2, Index n_t = 257) {
  detail::require_exp(spec, "bound41");
  if (dec.h_next == 0.0 || spec.tau == 0.0) return 0.0;
  const double max_moment = detail::max_moment_exp(dec, spec.tau, n_t);
  return spec.tau * dec.beta * dec.h_next * max_moment * expm1_over_x(spec.tau * mu2);
}

/// Hermitian refinement: ||E_m|| <= gamma_1 tau beta eta |e_m^T e^{-tau T_m} e_1|.
inline double bound42(const KrylovDecomposition& dec, const FunctionSpec& spec,
                          const SpectralInterval& interval, double lambda_min) {
  detail::require_exp(spec, "bound42");
  const SymTridiagonal& t = detail::require_tridiagonal(dec, "bound42");
  if (dec.h_next == 0.0) return 0.0;
  const Index m = dec.steps;
  const double moment = std::abs(funm_hermitian(t, spec)(m - 1, 0));
  return gamma1(interval, lambda_min, spec.tau) * spec.tau * dec.beta * dec.h_next * moment;
}

/// Expansion-based bound on general A:
///   ||E_m|| <= (1 + gamma_2) tau beta h_next max_t |e_m^T phi_1(-t H_m) e_1|,
///   gamma_2 = ||(A - z0 I) v_next|| (e^{tau mu2} - 1) / mu2.
/// Returns (bound, gamma_2).
inline std::pair<double, double> bound43(const SparseMatrix& a,
                                             const KrylovDecomposition& dec,
                                             const FunctionSpec& spec, double mu2, double z0,
                                             Index n_t = 257) {
  detail::require_exp(spec, "bound43");
  const double gamma2 =
      detail::shifted_next_norm(a, dec, z0) * spec.tau * expm1_over_x(spec.tau * mu2);
  if (dec.h_next == 0.0 || spec.tau == 0.0) return {0.0, gamma2};
  const double max_moment = detail::max_moment_phi1(dec, z0, spec.tau, n_t);
  return {(1.0 + gamma2) * spec.tau * dec.beta * dec.h_next * max_moment, gamma2};
}

/// Hermitian refinement of the expansion bound:
///   ||E_m|| <= (1 + gamma_3) tau beta eta |e_m^T phi_1(-tau T_m) e_1|,
///   gamma_3 = tau gamma_1 ||(A - z0 I) v_next||,  z0 in [a, b].
inline double bound44(const SparseMatrix& a, const KrylovDecomposition& dec,
                          const FunctionSpec& spec, const SpectralInterval& interval,
                          double lambda_min, double z0) {
  detail::require_exp(spec, "bound44");
  const SymTridiagonal& t = detail::require_tridiagonal(dec, "bound44");
  if (z0 < interval.a || z0 > interval.b)
    throw InputError("bound44: z0 must lie in [a, b]");
  if (dec.h_next == 0.0 || spec.tau == 0.0) return 0.0;
  const double gamma3 =
      spec.tau * gamma1(interval, lambda_min, spec.tau) * detail::shifted_next_norm(a, dec, z0);
  // |e_m^T phi_1(-tau T) e_1| with node -tau z0, i.e. the tau-folded spectral
  // moment divided by tau.
  TridiagonalEigen eig = symtrid_eig(t);
  const Index m = dec.steps;
  Complex folded = 0.0;
  for (Index i = 0; i < m; ++i)
    folded += eig.vectors(m - 1, i) * eig.vectors(0, i) * phi1_scalar(spec, z0, eig.values(i));
  return (1.0 + gamma3) * dec.beta * dec.h_next * std::abs(folded);
}

/// Everything the bounds table reports for one step. Hermitian-only entries
/// stay NaN for nonsymmetric operators.
struct BoundReport {
  double bound41 = std::numeric_limits<double>::quiet_NaN();
  double bound42 = std::numeric_limits<double>::quiet_NaN();
  double bound43 = std::numeric_limits<double>::quiet_NaN();
  double bound44 = std::numeric_limits<double>::quiet_NaN();
  double gamma1 = std::numeric_limits<double>::quiet_NaN();
  double gamma2 = std::numeric_limits<double>::quiet_NaN();
  double gamma3 = std::numeric_limits<double>::quiet_NaN();
  double mu2 = std::numeric_limits<double>::quiet_NaN();
  Index t_samples = 0;
};

/// Spectral interval from Lanczos extremal Ritz values, widened by 1% of the
/// spread on both ends. For generated matrices with a known spectrum prefer
/// the exact interval.
inline SpectralInterval estimate_spectral_interval(const SparseMatrix& a, Index steps = 80) {
  if (a.is_diagonal()) {
    const Vector d = a.diagonal();
    return {d.minCoeff(), d.maxCoeff()};
  }
  KrylovDecomposition dec =
      lanczos(a, random_unit_vector(a.size(), 0x696e74657276ULL), std::min(steps, a.size()));
  TridiagonalEigen eig = symtrid_eig(*dec.tridiagonal);
  const double lo = eig.values(0);
  const double hi = eig.values(eig.values.size() - 1);
  const double margin = 0.01 * std::max(hi - lo, 1e-300);
  return {lo - margin, hi + margin};
}

/// Assembles the applicable bounds for one decomposition. The Hermitian
/// bounds need the spectral interval; pass it when the spectrum is known.
inline BoundReport compute_bound_report(const SparseMatrix& a, const KrylovDecomposition& dec,
                                        const FunctionSpec& spec, double mu2,
                                        const std::optional<SpectralInterval>& interval,
                                        Index n_t = 257) {
  BoundReport report;
  report.mu2 = mu2;
  report.t_samples = n_t;
  const double z0 = dec.hess(0, 0);
  report.bound41 = bound41(dec, spec, mu2, n_t);
  auto [b43, g2] = bound43(a, dec, spec, mu2, z0, n_t);
  report.bound43 = b43;
  report.gamma2 = g2;
  if (dec.tridiagonal && interval) {
    const double lambda_min = interval->a;
    report.gamma1 = gamma1(*interval, lambda_min, spec.tau);
    report.bound42 = bound42(dec, spec, *interval, lambda_min);
    report.bound44 = bound44(a, dec, spec, *interval, lambda_min, z0);
    report.gamma3 =
        spec.tau * report.gamma1 * detail::shifted_next_norm(a, dec, z0);
  }
  return report;
}

}  // namespace kryfun
