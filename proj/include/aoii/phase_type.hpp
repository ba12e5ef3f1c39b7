#pragma once

#include "aoii/numerics.hpp"

namespace aoii {

/// Absorbing CTMC: K transient states with sub-generator `transient`, L
/// absorbing states reached at rates `absorbing`, initial row vector `initial`.
struct AmcSpec {
  Matrix transient;
  Matrix absorbing;
  RowVector initial;
};

/// Checks the AmcSpec invariants (sign pattern, zero row sums of [A | B],
/// stochastic initial vector, nonsingular A); throws on violation.
void validate(const AmcSpec& spec);

struct PdfCdf {
  double density;
  double cdf;
};

struct Moments {
  double mean;
  double second;
};

/// f(t) = -beta e^{tA} A 1 and F(t) = 1 - beta e^{tA} 1.
PdfCdf ph_pdf_cdf(const AmcSpec& spec, double t);

/// (-beta A^{-1} 1, 2 beta A^{-2} 1).
Moments ph_moments(const AmcSpec& spec);

/// p = -beta A^{-1} B.
RowVector absorption_probs(const AmcSpec& spec);

/// Embedded chain with d_ij = -a_ij / a_jj (column diagonal), d_ii = 0.
Matrix embedded_dtmc(const Matrix& a);

/// Embedded jump chain with d_ij = -a_ij / a_ii (row diagonal), d_ii = 0.
/// This is the variant whose fundamental matrix counts state visits.
Matrix embedded_jump_chain(const Matrix& a);

/// F = (I - D)^{-1}.
Matrix fundamental_matrix(const Matrix& d);

}  // namespace aoii
