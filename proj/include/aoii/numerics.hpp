#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aoii/error.hpp"

namespace aoii {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Solves above this condition number still return, but are flagged.
inline constexpr double kConditionWarning = 1e12;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.derived().array().isFinite().all();
}

namespace detail {

// Padé numerator coefficients b_0..b_m of the diagonal [m/m] approximant to exp.
template <typename Scalar>
struct PadeCoefficients {
  static constexpr Scalar b3[] = {120, 60, 12, 1};
  static constexpr Scalar b5[] = {30240, 15120, 3360, 420, 30, 1};
  static constexpr Scalar b7[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
  static constexpr Scalar b9[] = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                  2162160.,     110880.,     3960.,       90.,        1.};
  static constexpr Scalar b13[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                                   1187353796428800.,  129060195264000.,   10559470521600.,
                                   670442572800.,      33522128640.,       1323241920.,
                                   40840800.,          960960.,            16380.,
                                   182.,               1.};
};

// Theta_m from Higham (2005): largest 1-norm for which the [m/m] approximant
// reaches double precision without scaling.
inline constexpr double kTheta3 = 1.495585217958292e-2;
inline constexpr double kTheta5 = 2.539398330063230e-1;
inline constexpr double kTheta7 = 9.504178996162932e-1;
inline constexpr double kTheta9 = 2.097847961257068e0;
inline constexpr double kTheta13 = 5.371920351148152e0;

template <typename MatrixType, std::size_t Size>
void pade_low(const MatrixType& A, const typename MatrixType::Scalar (&b)[Size], MatrixType& U,
              MatrixType& V) {
  const auto n = A.rows();
  const MatrixType I = MatrixType::Identity(n, n);
  const MatrixType A2 = A * A;
  // Horner in A^2: odd coefficients build U / A, even coefficients build V.
  MatrixType u = b[Size - 1] * I;
  MatrixType v = b[Size - 2] * I;
  for (int k = static_cast<int>(Size) - 3; k >= 1; k -= 2) {
    u = (A2 * u).eval() + b[k] * I;
    v = (A2 * v).eval() + b[k - 1] * I;
  }
  U.noalias() = A * u;
  V = v;
}

template <typename MatrixType>
void pade13(const MatrixType& A, MatrixType& U, MatrixType& V) {
  using Scalar = typename MatrixType::Scalar;
  const auto& b = PadeCoefficients<Scalar>::b13;
  const auto n = A.rows();
  const MatrixType I = MatrixType::Identity(n, n);
  const MatrixType A2 = A * A;
  const MatrixType A4 = A2 * A2;
  const MatrixType A6 = A4 * A2;
  MatrixType tmp = b[13] * A6 + b[11] * A4 + b[9] * A2;
  MatrixType u = A6 * tmp;
  u += b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I;
  U.noalias() = A * u;
  tmp = b[12] * A6 + b[10] * A4 + b[8] * A2;
  V.noalias() = A6 * tmp;
  V += b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

}  // namespace detail

/**
 * Matrix exponential by scaling and squaring with diagonal Padé approximants
 * (degree 3, 5, 7, 9 or 13 selected from the 1-norm).
 *
 * Throws Error{Dimension} for non-square input and Error{Domain} for
 * non-finite entries.
 */
template <typename Derived>
typename Derived::PlainObject expm(const Eigen::MatrixBase<Derived>& A) {
  using MatrixType = typename Derived::PlainObject;
  using Scalar = typename Derived::Scalar;
  if (A.rows() != A.cols()) {
    throw Error(ErrorKind::Dimension, "expm: matrix is " + std::to_string(A.rows()) + "x" +
                                          std::to_string(A.cols()) + ", expected square");
  }
  if (!all_finite(A)) throw Error(ErrorKind::Domain, "expm: non-finite entry");
  const auto n = A.rows();
  if (n == 0) return MatrixType(0, 0);

  const MatrixType M = A;
  const double norm = static_cast<double>(M.cwiseAbs().colwise().sum().maxCoeff());
  MatrixType U(n, n), V(n, n);
  int squarings = 0;
  using C = detail::PadeCoefficients<Scalar>;
  if (norm < detail::kTheta3) {
    detail::pade_low(M, C::b3, U, V);
  } else if (norm < detail::kTheta5) {
    detail::pade_low(M, C::b5, U, V);
  } else if (norm < detail::kTheta7) {
    detail::pade_low(M, C::b7, U, V);
  } else if (norm < detail::kTheta9) {
    detail::pade_low(M, C::b9, U, V);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / detail::kTheta13))));
    const MatrixType scaled = M / static_cast<Scalar>(std::ldexp(1.0, squarings));
    detail::pade13(scaled, U, V);
  }
  // exp(A) ~ (V - U)^{-1} (V + U); V - U is well conditioned for these norms.
  MatrixType result = (V - U).partialPivLu().solve(V + U);
  for (int k = 0; k < squarings; ++k) result = (result * result).eval();
  return result;
}

/// Linear-solve outcome with the reciprocal-condition estimate attached.
template <typename Scalar>
struct Solution {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> x;
  double condition = 1.0;

  bool ill_conditioned() const { return condition > kConditionWarning; }
};

/// Solves A X = B by partial-pivoting LU and reports the condition estimate.
template <typename DerivedA, typename DerivedB>
Solution<typename DerivedA::Scalar> solve_checked(const Eigen::MatrixBase<DerivedA>& A,
                                                  const Eigen::MatrixBase<DerivedB>& B) {
  using Scalar = typename DerivedA::Scalar;
  if (A.rows() != A.cols()) throw Error(ErrorKind::Dimension, "linear_solve: A is not square");
  if (B.rows() != A.rows()) {
    throw Error(ErrorKind::Dimension, "linear_solve: right-hand side has " +
                                          std::to_string(B.rows()) + " rows, expected " +
                                          std::to_string(A.rows()));
  }
  if (!all_finite(A) || !all_finite(B)) {
    throw Error(ErrorKind::Domain, "linear_solve: non-finite entry");
  }
  Eigen::PartialPivLU<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> lu(A);
  const double rcond = static_cast<double>(lu.rcond());
  const double eps = static_cast<double>(std::numeric_limits<Scalar>::epsilon());
  const double condition = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(rcond > eps)) {
    throw SingularMatrixError(
        "linear_solve: matrix is singular to working precision (condition ~ " +
            std::to_string(condition) + ")",
        condition);
  }
  Solution<Scalar> out;
  out.x = lu.solve(B.derived());
  out.condition = condition;
  return out;
}

template <typename DerivedA, typename DerivedB>
typename DerivedB::PlainObject linear_solve(const Eigen::MatrixBase<DerivedA>& A,
                                            const Eigen::MatrixBase<DerivedB>& B) {
  return solve_checked(A, B).x;
}

/// Inverse as n solves against the identity.
template <typename Derived>
typename Derived::PlainObject inverse(const Eigen::MatrixBase<Derived>& A) {
  using MatrixType = typename Derived::PlainObject;
  return solve_checked(A, MatrixType::Identity(A.rows(), A.cols())).x;
}

/// Returns the matrix with row and column k removed.
Matrix remove_index(const Matrix& m, Eigen::Index k);
/// Returns the vector with entry k removed.
RowVector remove_index(const RowVector& v, Eigen::Index k);
Vector remove_index(const Vector& v, Eigen::Index k);

}  // namespace aoii
