#pragma once

#include "aoii/numerics.hpp"

namespace aoii {

/// Validated generator of a finite irreducible CTMC. States are 0-based.
class Generator {
 public:
  /// Checks sign pattern, zero row sums (1e-12 relative to the row scale),
  /// N >= 2 and irreducibility; throws Error with a distinct kind for each.
  static Generator validate(Matrix q);

  Eigen::Index size() const { return q_.rows(); }
  const Matrix& matrix() const { return q_; }
  double rate(Eigen::Index i, Eigen::Index j) const { return q_(i, j); }
  /// sigma_i = -q_ii.
  double holding_rate(Eigen::Index i) const { return -q_(i, i); }
  Vector holding_rates() const { return -q_.diagonal(); }

 private:
  explicit Generator(Matrix q) : q_(std::move(q)) {}
  Matrix q_;
};

struct Channel {
  /// Service rate of the exponential delay channel.
  double mu;
};

/// Throws Error{InvalidArgument} unless mu is finite and positive.
Channel make_channel(double mu);

/// rho_ij = q_ij / sigma_i off the diagonal, zero on it.
Matrix jump_probs(const Generator& g);

/// Diagonal -sigma, off-diagonal sigma/(n-1).
Generator make_symmetric(int n, double sigma);

Generator make_binary(double sigma1, double sigma2);

/**
 * Heterogeneous generator with holding rates spread linearly,
 * sigma_i = sigma_min + i (sigma_max - sigma_min) / n for i = 1..n, and the
 * off-diagonal rates of each row spread linearly over
 * [p_min sigma_i/(n-1), p_max sigma_i/(n-1)] in increasing column order.
 * The diagonal is then set to minus the realized off-diagonal sum.
 */
Generator make_spread(int n, double sigma_min, double sigma_max, double p_min, double p_max);

}  // namespace aoii
