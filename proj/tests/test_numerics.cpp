#include <doctest.h>

#include "aoii/numerics.hpp"
#include "oracles.hpp"

using namespace aoii;

namespace {

double max_rel(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

Matrix scaled_to_norm(Matrix a, double norm) {
  return a * (norm / a.cwiseAbs().colwise().sum().maxCoeff());
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("expm of the zero matrix is the identity") {
    CHECK(expm(Matrix::Zero(4, 4)).isApprox(Matrix::Identity(4, 4), 0.0));
  }

  TEST_CASE("expm of a diagonal matrix exponentiates the diagonal") {
    const Vector d = (Vector(4) << -3.0, -0.5, 0.0, 1.25).finished();
    const Matrix e = expm(Matrix(d.asDiagonal()));
    for (int i = 0; i < 4; ++i) CHECK(e(i, i) == doctest::Approx(std::exp(d[i])).epsilon(1e-14));
    CHECK((e - Matrix(e.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("expm of a rotation generator is a rotation") {
    const double theta = 0.8;
    Matrix a(2, 2);
    a << 0, theta, -theta, 0;
    const Matrix e = expm(a);
    CHECK(e(0, 0) == doctest::Approx(std::cos(theta)).epsilon(1e-14));
    CHECK(e(0, 1) == doctest::Approx(std::sin(theta)).epsilon(1e-14));
    CHECK(e(1, 0) == doctest::Approx(-std::sin(theta)).epsilon(1e-14));
  }

  TEST_CASE("expm of a nilpotent matrix truncates its series") {
    Matrix a(3, 3);
    a << 0, 2, 1, 0, 0, 3, 0, 0, 0;
    Matrix expected = Matrix::Identity(3, 3) + a + 0.5 * a * a;
    CHECK(max_rel(expm(a), expected) < 1e-14);
  }

  TEST_CASE("expm matches independent oracles across every Pade branch") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double norm : {1e-3, 0.01, 0.2, 0.9, 2.0, 5.0, 40.0, 300.0}) {
      for (int trial = 0; trial < 4; ++trial) {
        Matrix a(5, 5);
        for (int i = 0; i < 25; ++i) a.data()[i] = u(rng);
        a = scaled_to_norm(a, norm);
        CAPTURE(norm);
        CHECK(max_rel(expm(a), oracle::expm_taylor(a)) < 1e-11);
      }
    }
  }

  TEST_CASE("expm of generators matches the ODE oracle") {
    std::mt19937_64 rng(5);
    for (int n : {2, 3, 6}) {
      const Matrix q = oracle::random_generator(rng, n);
      for (double t : {0.05, 1.0, 7.5}) {
        const Matrix qt = t * q;
        const Matrix e = expm(qt);
        CHECK(max_rel(e, oracle::expm_ode(qt)) < 1e-9);
        // stochastic: rows sum to one, entries nonnegative
        CHECK((e.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
        CHECK(e.minCoeff() > -1e-14);
      }
    }
  }

  TEST_CASE("expm group properties") {
    std::mt19937_64 rng(3);
    const Matrix q = oracle::random_generator(rng, 4);
    CHECK(max_rel(expm(q) * expm(-q), Matrix::Identity(4, 4)) < 1e-12);
    CHECK(max_rel(expm(3.0 * q), expm(q) * expm(2.0 * q)) < 1e-12);
  }

  TEST_CASE("expm is templated on the scalar type") {
    Eigen::Matrix2f a;
    a << 0.f, 1.f, -1.f, 0.f;
    const Eigen::Matrix2f e = expm(a);
    CHECK(e(0, 0) == doctest::Approx(std::cos(1.0)).epsilon(1e-6));
    Eigen::Matrix<long double, 2, 2> b;
    b << -1, 1, 2, -2;
    const auto eb = expm(b);
    CHECK(static_cast<double>(eb.row(0).sum()) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("expm rejects bad input") {
    CHECK_THROWS_AS(expm(Matrix(2, 3)), Error);
    try {
      expm(Matrix(2, 3));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Dimension);
    }
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = std::nan("");
    try {
      expm(a);
      FAIL("expected a domain error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Domain);
    }
  }

  TEST_CASE("linear_solve agrees with the defining equation") {
    std::mt19937_64 rng(9);
    const Matrix q = oracle::random_generator(rng, 6);
    const Matrix a = q.topLeftCorner(5, 5);  // strictly substochastic: nonsingular
    const Matrix b = Matrix::Random(5, 3);
    const Matrix x = linear_solve(a, b);
    CHECK((a * x - b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((inverse(a) * a - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
    const auto sol = solve_checked(a, b);
    CHECK_FALSE(sol.ill_conditioned());
    CHECK(sol.condition >= 1.0);
  }

  TEST_CASE("singular systems raise SingularMatrixError") {
    Matrix a(3, 3);
    a << 1, 2, 3, 2, 4, 6, 1, 0, 1;
    try {
      linear_solve(a, Vector::Ones(3));
      FAIL("expected a singular-matrix error");
    } catch (const SingularMatrixError& e) {
      CHECK(e.kind() == ErrorKind::Singular);
      CHECK(e.condition() > 1e15);
    }
  }

  TEST_CASE("ill-conditioned systems are flagged but solved") {
    const int n = 11;
    Matrix h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = 1.0 / (i + j + 1);
    const auto sol = solve_checked(h, Vector::Ones(n));
    CHECK(sol.ill_conditioned());
    CHECK(sol.condition > kConditionWarning);
  }

  TEST_CASE("solve dimension checks") {
    CHECK_THROWS_AS(linear_solve(Matrix::Identity(3, 3), Vector::Ones(2)), Error);
    CHECK_THROWS_AS(linear_solve(Matrix(2, 3), Vector::Ones(2)), Error);
  }

  TEST_CASE("remove_index drops one row and column") {
    Matrix m(3, 3);
    m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    Matrix expected(2, 2);
    expected << 1, 3, 7, 9;
    CHECK(remove_index(m, 1) == expected);
    const RowVector r = (RowVector(3) << 1, 2, 3).finished();
    CHECK(remove_index(r, 0) == (RowVector(2) << 2, 3).finished());
    const Vector v = (Vector(3) << 1, 2, 3).finished();
    CHECK(remove_index(v, 2) == (Vector(2) << 1, 2).finished());
  }
}
