#include "aoii/phase_type.hpp"

#include <cmath>
#include <string>

namespace aoii {

void validate(const AmcSpec& spec) {
  const Eigen::Index k = spec.transient.rows();
  if (k < 1 || spec.transient.cols() != k) {
    throw Error(ErrorKind::Dimension, "transient sub-generator must be square and non-empty");
  }
  if (spec.absorbing.rows() != k || spec.absorbing.cols() < 1) {
    throw Error(ErrorKind::Dimension, "absorption sub-generator must have K rows");
  }
  if (spec.initial.size() != k) throw Error(ErrorKind::Dimension, "initial vector must have K entries");
  if (!all_finite(spec.transient) || !all_finite(spec.absorbing) || !all_finite(spec.initial)) {
    throw Error(ErrorKind::Domain, "AMC has non-finite entries");
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    double scale = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i != j && spec.transient(i, j) < 0) {
        throw Error(ErrorKind::NegativeRate, "negative off-diagonal transient rate");
      }
      scale = std::max(scale, std::abs(spec.transient(i, j)));
    }
    if (!(spec.transient(i, i) < 0)) {
      throw Error(ErrorKind::Domain, "transient diagonal must be negative");
    }
    if ((spec.absorbing.row(i).array() < 0).any()) {
      throw Error(ErrorKind::NegativeRate, "negative absorption rate");
    }
    const double sum = spec.transient.row(i).sum() + spec.absorbing.row(i).sum();
    if (std::abs(sum) > 1e-12 * std::max(1.0, scale)) {
      throw Error(ErrorKind::RowSum, "row " + std::to_string(i) + " of [A | B] does not sum to 0");
    }
  }
  if ((spec.initial.array() < 0).any() || std::abs(spec.initial.sum() - 1.0) > 1e-12) {
    throw Error(ErrorKind::Domain, "initial vector must be a probability vector");
  }
}

PdfCdf ph_pdf_cdf(const AmcSpec& spec, double t) {
  if (!(t >= 0)) throw Error(ErrorKind::Domain, "ph_pdf_cdf: t must be nonnegative");
  const RowVector g = spec.initial * expm(t * spec.transient);
  const double density = -(g * spec.transient).sum();
  return {std::max(0.0, density), std::clamp(1.0 - g.sum(), 0.0, 1.0)};
}

Moments ph_moments(const AmcSpec& spec) {
  const Vector ones = Vector::Ones(spec.transient.rows());
  const Vector h1 = linear_solve(spec.transient, ones);
  const Vector h2 = linear_solve(spec.transient, h1);
  return {-spec.initial.dot(h1), 2.0 * spec.initial.dot(h2)};
}

RowVector absorption_probs(const AmcSpec& spec) {
  const Matrix x = linear_solve(spec.transient, spec.absorbing);
  return -spec.initial * x;
}

Matrix embedded_dtmc(const Matrix& a) {
  const Eigen::Index k = a.rows();
  Matrix d = Matrix::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (a(j, j) == 0) throw Error(ErrorKind::Domain, "embedded_dtmc: zero diagonal entry");
  }
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      if (i != j) d(i, j) = -a(i, j) / a(j, j);
  return d;
}

Matrix embedded_jump_chain(const Matrix& a) {
  const Eigen::Index k = a.rows();
  Matrix d = Matrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (a(i, i) == 0) throw Error(ErrorKind::Domain, "embedded_jump_chain: zero diagonal entry");
    for (Eigen::Index j = 0; j < k; ++j)
      if (i != j) d(i, j) = -a(i, j) / a(i, i);
  }
  return d;
}

Matrix fundamental_matrix(const Matrix& d) {
  const Matrix system = Matrix::Identity(d.rows(), d.cols()) - d;
  return inverse(system);
}

}  // namespace aoii
