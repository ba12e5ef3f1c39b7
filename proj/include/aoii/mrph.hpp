#pragma once

#include <optional>
#include <vector>

#include "aoii/numerics.hpp"
#include "aoii/phase_type.hpp"

namespace aoii {

/// Generator pair governing one time regime of a multi-regime absorbing chain.
struct Regime {
  Matrix transient;
  Matrix absorbing;
};

/**
 * Multi-regime phase-type distribution: regime m governs the half-open
 * interval [boundaries[m], boundaries[m+1]), the last regime runs to
 * infinity. boundaries[0] == 0 and boundaries strictly increase.
 */
struct MrphSpec {
  std::vector<double> boundaries;
  std::vector<Regime> regimes;
  RowVector initial;

  std::size_t regime_count() const { return regimes.size(); }
};

void validate(const MrphSpec& spec);

/**
 * Cached LU factorization of a transient sub-generator A together with
 * A^{-1} 1 and A^{-2} 1, the pieces every moment integral is built from.
 */
class RegimeKernel {
 public:
  /// Throws SingularMatrixError when A is singular to working precision.
  explicit RegimeKernel(Matrix a);

  const Matrix& a() const { return a_; }
  Eigen::Index size() const { return a_.rows(); }
  /// A^{-1} 1
  const Vector& h1() const { return h1_; }
  /// A^{-2} 1
  const Vector& h2() const { return h2_; }
  Matrix solve(const Matrix& rhs) const { return lu_.solve(rhs); }

  /// t x1 - x A^{-1} 1; I_1 over [l, u] is term1(beta, l) - term1(beta e^{A(u-l)}, u).
  double term1(const RowVector& x, double t) const { return t * x.sum() - x.dot(h1_); }
  /// t^2 x1 - 2t x A^{-1} 1 + 2 x A^{-2} 1; same telescoping for I_2.
  double term2(const RowVector& x, double t) const {
    return t * t * x.sum() - 2.0 * t * x.dot(h1_) + 2.0 * x.dot(h2_);
  }

 private:
  Matrix a_;
  Eigen::PartialPivLU<Matrix> lu_;
  Vector h1_;
  Vector h2_;
};

/// beta_1 .. beta_M with beta_{m+1} = beta_m e^{A_m (gamma_{m+1} - gamma_m)}.
std::vector<RowVector> propagate_initials(const MrphSpec& spec);

/// Regime index governing time t (half-open convention).
std::size_t regime_at(const MrphSpec& spec, double t);

/// f_T(t) = -beta_m e^{A_m (t - gamma_m)} A_m 1 on the regime containing t.
double mrph_pdf(const MrphSpec& spec, double t);

/// nu(t): per-absorbing-state absorption rate, beta_m e^{A_m(t-gamma_m)} B_m.
RowVector absorption_rates(const MrphSpec& spec, double t);

/**
 * Closed-form regime integrals. With G(t) = beta e^{A (t - lower)}:
 *   order 0: int G(t) b dt
 *   order 1: int -t G(t) A 1 dt
 *   order 2: int -t^2 G(t) A 1 dt
 * over [lower, upper]; `upper` may be +infinity. Order 0 requires b.
 */
double regime_integral(const RowVector& beta, const Matrix& a, const std::optional<Vector>& b,
                       double lower, double upper, int order);

Moments mrph_moments(const MrphSpec& spec);

/// p_l = int_0^inf nu_l(t) dt.
RowVector mrph_absorption_probs(const MrphSpec& spec);

}  // namespace aoii
