#pragma once

#include <array>

namespace aoii {

/// Scalar reference results for the two-state source; index 0 is the cycle
/// that starts synchronized at state 1, index 1 the one at state 2.
struct BinaryClosedForm {
  double maoii;
  double rate;
  std::array<double, 2> duration;
  std::array<double, 2> area;
  std::array<double, 2> transmissions;
  std::array<double, 2> stay;   ///< p_11, p_22: resynchronization at the same value
  std::array<double, 2> leave;  ///< p_12, p_21
  std::array<double, 2> stationary;
};

/**
 * Two-state source (rates sigma1: 1 -> 2, sigma2: 2 -> 1) with thresholds
 * tau1 (cycle at 1) and tau2 (cycle at 2). Written entirely in scalar
 * arithmetic, independent of the matrix pipeline.
 */
BinaryClosedForm binary_closed_form(double sigma1, double sigma2, double mu, double tau1, double tau2);

struct SymmetricClosedForm {
  double maoii;
  double rate;
  double duration;
  double area;
  double transmissions;
};

/// N-state symmetric source (every off-diagonal rate sigma / (N - 1)) with a
/// common threshold tau.
SymmetricClosedForm symmetric_closed_form(int n, double sigma, double mu, double tau);

}  // namespace aoii
