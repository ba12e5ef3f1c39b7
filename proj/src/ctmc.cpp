#include "aoii/ctmc.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace aoii {

namespace {

bool reaches_all(const Matrix& q, bool transpose) {
  const Eigen::Index n = q.rows();
  std::vector<bool> seen(n, false);
  std::vector<Eigen::Index> stack{0};
  seen[0] = true;
  Eigen::Index count = 1;
  while (!stack.empty()) {
    const Eigen::Index u = stack.back();
    stack.pop_back();
    for (Eigen::Index v = 0; v < n; ++v) {
      const double rate = transpose ? q(v, u) : q(u, v);
      if (v != u && rate > 0 && !seen[v]) {
        seen[v] = true;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

}  // namespace

Generator Generator::validate(Matrix q) {
  if (q.rows() != q.cols()) throw Error(ErrorKind::Dimension, "generator must be square");
  if (q.rows() < 2) {
    throw Error(ErrorKind::TooFewStates, "generator needs at least 2 states, got " +
                                             std::to_string(q.rows()));
  }
  if (!all_finite(q)) throw Error(ErrorKind::Domain, "generator has non-finite entries");
  const Eigen::Index n = q.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    double scale = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && q(i, j) < 0) {
        throw Error(ErrorKind::NegativeRate, "generator entry (" + std::to_string(i) + "," +
                                                 std::to_string(j) + ") is negative");
      }
      scale = std::max(scale, std::abs(q(i, j)));
    }
    if (std::abs(q.row(i).sum()) > 1e-12 * std::max(1.0, scale)) {
      throw Error(ErrorKind::RowSum, "generator row " + std::to_string(i) + " sums to " +
                                         std::to_string(q.row(i).sum()) + ", expected 0");
    }
    if (!(q(i, i) < 0)) {
      throw Error(ErrorKind::Reducible, "state " + std::to_string(i) + " is absorbing");
    }
  }
  if (!reaches_all(q, false) || !reaches_all(q, true)) {
    throw Error(ErrorKind::Reducible, "generator is reducible");
  }
  return Generator(std::move(q));
}

Channel make_channel(double mu) {
  if (!std::isfinite(mu) || !(mu > 0)) {
    throw Error(ErrorKind::InvalidArgument, "channel rate mu must be finite and positive");
  }
  return Channel{mu};
}

Matrix jump_probs(const Generator& g) {
  Matrix rho = g.matrix();
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    const double sigma = g.holding_rate(i);
    rho.row(i) /= sigma;
    rho(i, i) = 0;
  }
  return rho;
}

Generator make_symmetric(int n, double sigma) {
  if (n < 2) throw Error(ErrorKind::TooFewStates, "symmetric source needs n >= 2");
  if (!std::isfinite(sigma) || !(sigma > 0)) {
    throw Error(ErrorKind::InvalidArgument, "symmetric source needs sigma > 0");
  }
  Matrix q = Matrix::Constant(n, n, sigma / (n - 1));
  q.diagonal().setConstant(-sigma);
  return Generator::validate(std::move(q));
}

Generator make_binary(double sigma1, double sigma2) {
  if (!(sigma1 > 0) || !(sigma2 > 0) || !std::isfinite(sigma1) || !std::isfinite(sigma2)) {
    throw Error(ErrorKind::InvalidArgument, "binary source needs positive rates");
  }
  Matrix q(2, 2);
  q << -sigma1, sigma1, sigma2, -sigma2;
  return Generator::validate(std::move(q));
}

Generator make_spread(int n, double sigma_min, double sigma_max, double p_min, double p_max) {
  if (n < 2) throw Error(ErrorKind::TooFewStates, "spread source needs n >= 2");
  if (!(sigma_min > 0) || !(sigma_max >= sigma_min) || !std::isfinite(sigma_max)) {
    throw Error(ErrorKind::InvalidArgument, "spread source needs 0 < sigma_min <= sigma_max");
  }
  if (!(p_min >= 0) || std::abs(p_min + p_max - 2.0) > 1e-12 || p_max < p_min) {
    throw Error(ErrorKind::InvalidArgument,
                "spread source needs 0 <= p_min <= p_max with p_min + p_max = 2");
  }
  Matrix q = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double sigma = sigma_min + (i + 1) * (sigma_max - sigma_min) / n;
    const double lo = p_min * sigma / (n - 1);
    const double hi = p_max * sigma / (n - 1);
    for (int k = 0, col = 0; col < n; ++col) {
      if (col == i) continue;
      q(i, col) = n == 2 ? 0.5 * (lo + hi) : lo + k * (hi - lo) / (n - 2);
      ++k;
    }
    q(i, i) = -q.row(i).sum();
  }
  return Generator::validate(std::move(q));
}

}  // namespace aoii
