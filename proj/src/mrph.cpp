#include "aoii/mrph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace aoii {

void validate(const MrphSpec& spec) {
  const std::size_t m = spec.regimes.size();
  if (m == 0) throw Error(ErrorKind::Dimension, "MRPH needs at least one regime");
  if (spec.boundaries.size() != m) {
    throw Error(ErrorKind::Dimension, "MRPH needs one boundary per regime");
  }
  if (spec.boundaries.front() != 0.0) {
    throw Error(ErrorKind::Domain, "first MRPH boundary must be 0");
  }
  for (std::size_t k = 1; k < m; ++k) {
    if (!(spec.boundaries[k] > spec.boundaries[k - 1]) || !std::isfinite(spec.boundaries[k])) {
      throw Error(ErrorKind::Domain, "MRPH boundaries must be finite and strictly increasing");
    }
  }
  const Eigen::Index states = spec.initial.size();
  const Eigen::Index sinks = spec.regimes.front().absorbing.cols();
  for (const Regime& r : spec.regimes) {
    if (r.transient.rows() != states || r.absorbing.cols() != sinks) {
      throw Error(ErrorKind::Dimension, "MRPH regimes must share K and L");
    }
    validate(AmcSpec{r.transient, r.absorbing, spec.initial});
  }
}

RegimeKernel::RegimeKernel(Matrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols()) throw Error(ErrorKind::Dimension, "sub-generator must be square");
  lu_.compute(a_);
  const double rcond = lu_.rcond();
  if (!(rcond > std::numeric_limits<double>::epsilon())) {
    throw SingularMatrixError("transient sub-generator is singular",
                              rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());
  }
  h1_ = lu_.solve(Vector::Ones(a_.rows()));
  h2_ = lu_.solve(h1_);
}

std::vector<RowVector> propagate_initials(const MrphSpec& spec) {
  std::vector<RowVector> betas;
  betas.reserve(spec.regimes.size());
  betas.push_back(spec.initial);
  for (std::size_t m = 0; m + 1 < spec.regimes.size(); ++m) {
    const double width = spec.boundaries[m + 1] - spec.boundaries[m];
    betas.push_back(betas.back() * expm(width * spec.regimes[m].transient));
  }
  return betas;
}

std::size_t regime_at(const MrphSpec& spec, double t) {
  const auto it = std::upper_bound(spec.boundaries.begin(), spec.boundaries.end(), t);
  return static_cast<std::size_t>(std::distance(spec.boundaries.begin(), it)) - 1;
}

namespace {

RowVector occupancy(const MrphSpec& spec, double t, std::size_t& m) {
  if (!(t >= 0)) throw Error(ErrorKind::Domain, "MRPH evaluated at negative time");
  m = regime_at(spec, t);
  const std::vector<RowVector> betas = propagate_initials(spec);
  return betas[m] * expm((t - spec.boundaries[m]) * spec.regimes[m].transient);
}

}  // namespace

double mrph_pdf(const MrphSpec& spec, double t) {
  std::size_t m = 0;
  const RowVector g = occupancy(spec, t, m);
  return std::max(0.0, -(g * spec.regimes[m].transient).sum());
}

RowVector absorption_rates(const MrphSpec& spec, double t) {
  std::size_t m = 0;
  const RowVector g = occupancy(spec, t, m);
  return g * spec.regimes[m].absorbing;
}

double regime_integral(const RowVector& beta, const Matrix& a, const std::optional<Vector>& b,
                       double lower, double upper, int order) {
  if (!(upper >= lower)) throw Error(ErrorKind::Domain, "regime_integral: upper < lower");
  if (order < 0 || order > 2) throw Error(ErrorKind::InvalidArgument, "order must be 0, 1 or 2");
  if (order == 0 && !b) throw Error(ErrorKind::InvalidArgument, "order 0 needs an absorption column");
  const RegimeKernel kernel(a);
  const bool infinite = std::isinf(upper);
  const RowVector end = infinite ? RowVector::Zero(beta.size())
                                 : RowVector(beta * expm((upper - lower) * a));
  switch (order) {
    case 0: return (end - beta).dot(kernel.solve(*b).col(0).transpose());
    case 1: return kernel.term1(beta, lower) - (infinite ? 0.0 : kernel.term1(end, upper));
    default: return kernel.term2(beta, lower) - (infinite ? 0.0 : kernel.term2(end, upper));
  }
}

Moments mrph_moments(const MrphSpec& spec) {
  const std::vector<RowVector> betas = propagate_initials(spec);
  const std::size_t last = spec.regimes.size() - 1;
  Moments out{0, 0};
  for (std::size_t m = 0; m <= last; ++m) {
    const RegimeKernel kernel(spec.regimes[m].transient);
    out.mean += kernel.term1(betas[m], spec.boundaries[m]);
    out.second += kernel.term2(betas[m], spec.boundaries[m]);
    if (m < last) {
      out.mean -= kernel.term1(betas[m + 1], spec.boundaries[m + 1]);
      out.second -= kernel.term2(betas[m + 1], spec.boundaries[m + 1]);
    }
  }
  return out;
}

RowVector mrph_absorption_probs(const MrphSpec& spec) {
  const std::vector<RowVector> betas = propagate_initials(spec);
  const std::size_t last = spec.regimes.size() - 1;
  RowVector p = RowVector::Zero(spec.regimes.front().absorbing.cols());
  for (std::size_t m = 0; m <= last; ++m) {
    const RegimeKernel kernel(spec.regimes[m].transient);
    const Matrix solved = kernel.solve(spec.regimes[m].absorbing);
    const RowVector end = m < last ? betas[m + 1] : RowVector::Zero(betas[m].size());
    p += (end - betas[m]) * solved;
  }
  return p;
}

}  // namespace aoii
