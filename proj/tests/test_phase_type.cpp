#include <doctest.h>

#include "aoii/phase_type.hpp"
#include "oracles.hpp"

using namespace aoii;

namespace {

AmcSpec exponential(double lambda) {
  return {Matrix::Constant(1, 1, -lambda), Matrix::Constant(1, 1, lambda), RowVector::Ones(1)};
}

AmcSpec erlang2(double lambda) {
  Matrix a(2, 2);
  a << -lambda, lambda, 0, -lambda;
  Matrix b(2, 1);
  b << 0, lambda;
  return {a, b, RowVector::Unit(2, 0)};
}

AmcSpec random_spec(std::mt19937_64& rng, int k, int l) {
  auto [a, b] = oracle::random_absorbing(rng, k, l);
  return {a, b, oracle::random_distribution(rng, k)};
}

/// Time beyond which the survival function is below 1e-14.
double tail_horizon(const AmcSpec& s) {
  double t = 1;
  while (1 - ph_pdf_cdf(s, t).cdf > 1e-14) t *= 2;
  return t;
}

}  // namespace

TEST_SUITE("phase_type") {
  TEST_CASE("exponential special case") {
    const double lambda = 1.7;
    const AmcSpec s = exponential(lambda);
    CHECK_NOTHROW(validate(s));
    const PdfCdf at0 = ph_pdf_cdf(s, 0);
    CHECK(at0.density == doctest::Approx(lambda).epsilon(1e-15));
    CHECK(at0.cdf == 0.0);
    for (double t : {0.1, 1.0, 3.0}) {
      const PdfCdf v = ph_pdf_cdf(s, t);
      CHECK(v.density == doctest::Approx(lambda * std::exp(-lambda * t)).epsilon(1e-13));
      CHECK(v.cdf == doctest::Approx(1 - std::exp(-lambda * t)).epsilon(1e-13));
    }
    const Moments m = ph_moments(s);
    CHECK(m.mean == doctest::Approx(1 / lambda).epsilon(1e-15));
    CHECK(m.second == doctest::Approx(2 / (lambda * lambda)).epsilon(1e-15));
    CHECK(absorption_probs(s)[0] == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("Erlang-2 closed forms") {
    const double lambda = 0.8;
    const AmcSpec s = erlang2(lambda);
    CHECK(ph_pdf_cdf(s, 1 / lambda).cdf == doctest::Approx(1 - 2 * std::exp(-1.0)).epsilon(1e-13));
    const Moments m = ph_moments(s);
    CHECK(m.mean == doctest::Approx(2 / lambda).epsilon(1e-14));
    CHECK(m.second == doctest::Approx(6 / (lambda * lambda)).epsilon(1e-14));
  }

  TEST_CASE("symmetric two-sink race splits evenly") {
    Matrix a(1, 1);
    a << -2;
    Matrix b(1, 2);
    b << 1, 1;
    const RowVector p = absorption_probs({a, b, RowVector::Ones(1)});
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
  }

  TEST_CASE("moments and cdf agree with quadrature of the density") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 8; ++trial) {
      const AmcSpec s = random_spec(rng, 4, 2);
      CHECK_NOTHROW(validate(s));
      const double horizon = tail_horizon(s);
      auto pdf = [&](double t) { return ph_pdf_cdf(s, t).density; };
      const double mass = oracle::integrate(pdf, 0, horizon);
      const double mean = oracle::integrate([&](double t) { return t * pdf(t); }, 0, horizon);
      const double second = oracle::integrate([&](double t) { return t * t * pdf(t); }, 0, horizon);
      const Moments m = ph_moments(s);
      CHECK(std::abs(mass - 1) < 1e-8);
      CHECK(oracle::rel_err_strict(m.mean, mean) < 1e-6);
      CHECK(oracle::rel_err_strict(m.second, second) < 1e-6);
      CHECK(m.second >= m.mean * m.mean);
      for (double t : {0.3, 1.1, 2.5}) {
        CHECK(std::abs(ph_pdf_cdf(s, t).cdf - oracle::integrate(pdf, 0, t)) < 1e-8);
      }
    }
  }

  TEST_CASE("cdf is nondecreasing and density nonnegative") {
    std::mt19937_64 rng(2);
    const AmcSpec s = random_spec(rng, 5, 3);
    double previous = 0;
    for (double t = 0; t < 10; t += 0.25) {
      const PdfCdf v = ph_pdf_cdf(s, t);
      CHECK(v.density >= 0);
      CHECK(v.cdf >= previous);
      previous = v.cdf;
    }
    CHECK(oracle::error_kind([&] { ph_pdf_cdf(s, -1); }) == ErrorKind::Domain);
  }

  TEST_CASE("absorption probabilities match Monte Carlo") {
    std::mt19937_64 rng(4);
    const AmcSpec s = random_spec(rng, 4, 3);
    const RowVector p = absorption_probs(s);
    CHECK(std::abs(p.sum() - 1) < 1e-10);
    CHECK(p.minCoeff() >= 0);

    const aoii::MrphSpec single{{0.0}, {{s.transient, s.absorbing}}, s.initial};
    const int runs = 1000000;
    RowVector counts = RowVector::Zero(3);
    for (int r = 0; r < runs; ++r) counts[oracle::sample_mrph(single, rng).sink] += 1;
    for (int l = 0; l < 3; ++l) {
      const double freq = counts[l] / runs;
      const double se = std::sqrt(p[l] * (1 - p[l]) / runs);
      CAPTURE(l);
      CHECK(std::abs(freq - p[l]) < 3 * se + 1e-12);
    }
  }

  TEST_CASE("absorption probabilities always sum to one") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
      const AmcSpec s = random_spec(rng, 1 + trial % 6, 1 + trial % 4);
      CHECK(std::abs(absorption_probs(s).sum() - 1) < 1e-10);
    }
  }

  TEST_CASE("validate rejects malformed chains") {
    AmcSpec s = erlang2(1.0);
    s.initial << 0.7, 0.7;
    CHECK(oracle::error_kind([&] { validate(s); }) == ErrorKind::Domain);
    s = erlang2(1.0);
    s.absorbing(1, 0) = 2;
    CHECK(oracle::error_kind([&] { validate(s); }) == ErrorKind::RowSum);
    s = erlang2(1.0);
    s.absorbing.resize(3, 1);
    CHECK(oracle::error_kind([&] { validate(s); }) == ErrorKind::Dimension);
  }

  TEST_CASE("embedded chain follows the column-diagonal ratio") {
    CHECK(embedded_dtmc(Matrix(Vector::Constant(3, -2.0).asDiagonal())).isZero(0));
    Matrix a(2, 2);
    a << -2, 1, 1, -2;
    const Matrix d = embedded_dtmc(a);
    CHECK(d(0, 1) == 0.5);
    CHECK(d(1, 0) == 0.5);
    CHECK(d(0, 0) == 0.0);

    // cycle of a symmetric N=3 source (sigma = mu = 1) with both states transmitting
    Matrix c(2, 2);
    c << -2, 0.5, 0.5, -2;
    const Matrix dc = embedded_dtmc(c);
    CHECK(dc(0, 1) == doctest::Approx(0.25));

    // unequal diagonals separate the two conventions
    Matrix u(2, 2);
    u << -1, 0.5, 2, -4;
    CHECK(embedded_dtmc(u)(0, 1) == doctest::Approx(0.5 / 4));
    CHECK(embedded_jump_chain(u)(0, 1) == doctest::Approx(0.5 / 1));
    CHECK(embedded_jump_chain(u).rowwise().sum().maxCoeff() <= 1.0);
    Matrix zero = Matrix::Zero(2, 2);
    CHECK(oracle::error_kind([&] { embedded_dtmc(zero); }) == ErrorKind::Domain);
  }

  TEST_CASE("fundamental matrix") {
    CHECK(fundamental_matrix(Matrix::Zero(3, 3)).isIdentity(0));
    Matrix d = Matrix::Zero(2, 2);
    d(0, 1) = 0.3;
    Matrix expected = Matrix::Identity(2, 2);
    expected(0, 1) = 0.3;
    CHECK((fundamental_matrix(d) - expected).cwiseAbs().maxCoeff() < 1e-15);

    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 5; ++trial) {
      auto [a, b] = oracle::random_absorbing(rng, 5, 2);
      const Matrix jump = embedded_jump_chain(a);
      const Matrix f = fundamental_matrix(jump);
      CHECK((f - oracle::neumann(jump)).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(f.diagonal().minCoeff() >= 1.0);
    }
  }

  TEST_CASE("jump-chain visit counts match simulation") {
    // F row sums are the expected number of visits to transient states;
    // each visit except the first is one transient-to-transient move.
    std::mt19937_64 rng(12);
    auto [a, b] = oracle::random_absorbing(rng, 3, 1);
    const RowVector beta = oracle::random_distribution(rng, 3);
    const double expected = (beta * fundamental_matrix(embedded_jump_chain(a))).sum();
    std::uniform_real_distribution<double> u(0, 1);
    const int runs = 200000;
    double visits = 0, visits_sq = 0;
    for (int r = 0; r < runs; ++r) {
      double x = u(rng);
      Eigen::Index s = 0;
      while (s < 2 && x >= beta[s]) x -= beta[s++];
      int count = 1;
      for (;;) {
        RowVector w(4);
        w << a.row(s), b.row(s);
        w[s] = 0;
        double y = u(rng) * w.sum();
        Eigen::Index t = 0;
        while (t < 3 && y >= w[t]) y -= w[t++];
        if (t == 3) break;
        s = t;
        ++count;
      }
      visits += count;
      visits_sq += double(count) * count;
    }
    const double mean = visits / runs;
    const double se = std::sqrt((visits_sq / runs - mean * mean) / runs);
    CHECK(std::abs(mean - expected) < 3 * se);
  }
}
