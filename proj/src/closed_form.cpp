#include "aoii/closed_form.hpp"

#include <cmath>

#include "aoii/error.hpp"

namespace aoii {

namespace {

struct BinaryCycle {
  double d, a, c, p_switch;
};

// Cycle that starts synchronized at a state left at rate `leave`; the source
// then sits in the other state, which it leaves at rate `s`.
BinaryCycle binary_cycle(double leave, double s, double mu, double tau) {
  const double r = s + mu;
  const double e = std::exp(-s * tau);
  BinaryCycle out;
  out.d = (1.0 - e) / s + e / r + 1.0 / leave;
  out.a = 1.0 / (s * s) - e / (s * s) - tau * e / s + tau * e / r + e / (r * r);
  out.c = e;
  out.p_switch = mu * e / r;
  return out;
}

void check_rates(double a, double b, double mu) {
  if (!(a > 0) || !(b > 0) || !(mu > 0) || !std::isfinite(a) || !std::isfinite(b) ||
      !std::isfinite(mu)) {
    throw Error(ErrorKind::Domain, "rates must be positive and finite");
  }
}

}  // namespace

BinaryClosedForm binary_closed_form(double sigma1, double sigma2, double mu, double tau1, double tau2) {
  check_rates(sigma1, sigma2, mu);
  if (!(tau1 >= 0) || !(tau2 >= 0)) throw Error(ErrorKind::Domain, "thresholds must be nonnegative");
  const BinaryCycle one = binary_cycle(sigma1, sigma2, mu, tau1);
  const BinaryCycle two = binary_cycle(sigma2, sigma1, mu, tau2);
  // Two-state embedded chain: pi_1 / pi_2 = p_21 / p_12.
  const double p12 = one.p_switch;
  const double p21 = two.p_switch;
  const double pi1 = p21 / (p12 + p21);
  const double pi2 = p12 / (p12 + p21);
  const double time = pi1 * one.d + pi2 * two.d;
  BinaryClosedForm out;
  out.maoii = (pi1 * one.a + pi2 * two.a) / time;
  out.rate = (pi1 * one.c + pi2 * two.c) / time;
  out.duration = {one.d, two.d};
  out.area = {one.a, two.a};
  out.transmissions = {one.c, two.c};
  out.stay = {1.0 - p12, 1.0 - p21};
  out.leave = {p12, p21};
  out.stationary = {pi1, pi2};
  return out;
}

SymmetricClosedForm symmetric_closed_form(int n, double sigma, double mu, double tau) {
  if (n < 2) throw Error(ErrorKind::TooFewStates, "symmetric source needs at least 2 states");
  check_rates(sigma, sigma, mu);
  if (!(tau >= 0)) throw Error(ErrorKind::Domain, "threshold must be nonnegative");
  const double m = n - 1.0;
  const double e = std::exp(-sigma * tau / m);
  const double u = m / sigma;                // mean out-of-sync time with no transmissions
  const double v = m / (sigma + mu * m);     // mean remaining time once transmitting
  SymmetricClosedForm out;
  out.duration = (1.0 - e) * u + e * v + 1.0 / sigma;
  out.area = u * u - e * u * u + e * v * v + tau * e * (v - u);
  out.transmissions = e / (1.0 - sigma * (n - 2.0) / ((sigma + mu) * m));
  // All cycles are identical by symmetry.
  out.maoii = out.area / out.duration;
  out.rate = out.transmissions / out.duration;
  return out;
}

}  // namespace aoii
