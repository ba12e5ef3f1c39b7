#include "aoii/cycle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <string>

namespace aoii {

namespace {

void check_thresholds(const Generator& g, const ThresholdVector& tau) {
  if (tau.cycle < 0 || tau.cycle >= g.size()) {
    throw Error(ErrorKind::InvalidArgument, "cycle index out of range");
  }
  if (tau.taus.size() != g.size() - 1) {
    throw Error(ErrorKind::Dimension, "threshold vector must have N-1 entries");
  }
  for (double t : tau.taus) {
    if (std::isnan(t) || t < 0) throw Error(ErrorKind::Domain, "thresholds must be nonnegative");
  }
}

// Distinct finite values of {0} U taus, ascending.
std::vector<double> boundaries_of(const Vector& taus) {
  std::vector<double> b{0.0};
  for (double t : taus)
    if (std::isfinite(t)) b.push_back(t);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

std::uint64_t active_mask(const Vector& taus, double boundary) {
  std::uint64_t mask = 0;
  for (Eigen::Index k = 0; k < taus.size(); ++k)
    if (taus[k] <= boundary) mask |= std::uint64_t{1} << k;
  return mask;
}

}  // namespace

RegimeLayout esat_regimes(const Generator& g, const ThresholdVector& tau) {
  check_thresholds(g, tau);
  RegimeLayout layout;
  layout.boundaries = boundaries_of(tau.taus);
  for (double b : layout.boundaries) {
    std::vector<Eigen::Index> states;
    for (Eigen::Index k = 0; k < tau.taus.size(); ++k)
      if (tau.taus[k] <= b) states.push_back(source_state(tau.cycle, k));
    layout.active.push_back(std::move(states));
  }
  return layout;
}

MrphSpec esat_mrph(const Generator& g, const Channel& ch, const ThresholdVector& tau) {
  const RegimeLayout layout = esat_regimes(g, tau);
  const Eigen::Index j = tau.cycle;
  const Eigen::Index n = g.size();
  const Matrix base = remove_index(g.matrix(), j);
  MrphSpec spec;
  spec.boundaries = layout.boundaries;
  spec.initial = remove_index(RowVector(g.matrix().row(j)), j) / g.holding_rate(j);
  for (const auto& states : layout.active) {
    Regime r{base, Matrix::Zero(n - 1, n)};
    for (Eigen::Index k = 0; k < n - 1; ++k) r.absorbing(k, j) = g.rate(source_state(j, k), j);
    for (Eigen::Index i : states) {
      const Eigen::Index k = transient_index(j, i);
      r.transient(k, k) -= ch.mu;
      r.absorbing(k, i) = ch.mu;
    }
    spec.regimes.push_back(std::move(r));
  }
  return spec;
}

// ---------------------------------------------------------------------------

EsatCycleModel::EsatCycleModel(const Generator& g, const Channel& ch, Eigen::Index cycle)
    : cycle_(cycle), n_(g.size()), mu_(ch.mu), sigma_(g.holding_rate(cycle)) {
  if (cycle < 0 || cycle >= n_) throw Error(ErrorKind::InvalidArgument, "cycle index out of range");
  if (n_ - 1 > 63) throw Error(ErrorKind::InvalidArgument, "ESAT supports at most 64 states");
  base_ = remove_index(g.matrix(), cycle);
  inflow_ = base_;
  inflow_.diagonal().setZero();
  to_cycle_ = remove_index(Vector(g.matrix().col(cycle)), cycle);
  initial_ = remove_index(RowVector(g.matrix().row(cycle)), cycle) / sigma_;
}

std::size_t EsatCycleModel::WidthHash::operator()(const WidthKey& k) const noexcept {
  const auto bits = std::bit_cast<std::uint64_t>(k.width);
  return std::hash<std::uint64_t>{}(k.mask * 0x9E3779B97F4A7C15ull ^ bits);
}

Matrix EsatCycleModel::sub_generator(std::uint64_t mask) const {
  Matrix a = base_;
  for (Eigen::Index k = 0; k < n_ - 1; ++k)
    if (mask >> k & 1) a(k, k) -= mu_;
  return a;
}

const EsatCycleModel::MaskData& EsatCycleModel::mask_data(std::uint64_t mask) {
  auto it = masks_.find(mask);
  if (it != masks_.end()) return it->second;
  MaskData data;
  data.kernel = std::make_unique<RegimeKernel>(sub_generator(mask));
  Matrix absorbing = Matrix::Zero(n_ - 1, n_);
  absorbing.col(cycle_) = to_cycle_;
  for (Eigen::Index k = 0; k < n_ - 1; ++k)
    if (mask >> k & 1) absorbing(k, source_state(cycle_, k)) = mu_;
  data.solved_absorbing = data.kernel->solve(absorbing);
  data.solved_inflow = data.kernel->solve(inflow_);
  return masks_.emplace(mask, std::move(data)).first->second;
}

const Matrix& EsatCycleModel::transition(std::uint64_t mask, double width) {
  const WidthKey key{mask, width};
  auto it = exps_.find(key);
  if (it != exps_.end()) return it->second;
  return exps_.emplace(key, expm(width * mask_data(mask).kernel->a())).first->second;
}

CycleParams EsatCycleModel::evaluate(const Vector& taus) {
  const Eigen::Index k_states = n_ - 1;
  if (taus.size() != k_states) throw Error(ErrorKind::Dimension, "threshold vector must have N-1 entries");
  for (double t : taus)
    if (std::isnan(t) || t < 0) throw Error(ErrorKind::Domain, "thresholds must be nonnegative");

  const std::vector<double> bounds = boundaries_of(taus);
  const std::size_t regimes = bounds.size();
  // Regime in which each state's threshold is reached (regimes when never).
  std::vector<std::size_t> start(k_states, regimes);
  for (Eigen::Index k = 0; k < k_states; ++k) {
    if (!std::isfinite(taus[k])) continue;
    start[k] = static_cast<std::size_t>(
        std::lower_bound(bounds.begin(), bounds.end(), taus[k]) - bounds.begin());
  }

  CycleParams out;
  out.next = RowVector::Zero(n_);
  Vector attempts = Vector::Zero(k_states);
  double mean = 0, second = 0;
  RowVector beta = initial_;
  RowVector end(k_states);
  for (std::size_t m = 0; m < regimes; ++m) {
    const std::uint64_t mask = active_mask(taus, bounds[m]);
    const MaskData& data = mask_data(mask);
    for (Eigen::Index k = 0; k < k_states; ++k)
      if (start[k] == m) attempts[k] += beta[k];
    const bool last = m + 1 == regimes;
    if (last) {
      end.setZero();
    } else {
      end = beta * transition(mask, bounds[m + 1] - bounds[m]);
    }
    mean += data.kernel->term1(beta, bounds[m]);
    second += data.kernel->term2(beta, bounds[m]);
    if (!last) {
      mean -= data.kernel->term1(end, bounds[m + 1]);
      second -= data.kernel->term2(end, bounds[m + 1]);
    }
    const RowVector delta = end - beta;
    out.next += delta * data.solved_absorbing;
    const RowVector inflow = delta * data.solved_inflow;
    for (Eigen::Index k = 0; k < k_states; ++k)
      if (start[k] <= m) attempts[k] += inflow[k];
    beta = end;
  }
  out.duration = mean + 1.0 / sigma_;
  out.area = 0.5 * second;
  out.transmissions = attempts.sum();
  return out;
}

CycleParams esat_cycle(const Generator& g, const Channel& ch, const ThresholdVector& tau) {
  check_thresholds(g, tau);
  EsatCycleModel model(g, ch, tau.cycle);
  return model.evaluate(tau.taus);
}

// ---------------------------------------------------------------------------

EatCycleModel::EatCycleModel(const Generator& g, const Channel& ch, Eigen::Index cycle)
    : cycle_(cycle), n_(g.size()), mu_(ch.mu) {
  if (cycle < 0 || cycle >= n_) throw Error(ErrorKind::InvalidArgument, "cycle index out of range");
  const double sigma = g.holding_rate(cycle);
  a1_ = remove_index(g.matrix(), cycle);
  const Matrix a2 = a1_ - mu_ * Matrix::Identity(n_ - 1, n_ - 1);
  initial_ = remove_index(RowVector(g.matrix().row(cycle)), cycle) / sigma;
  const RegimeKernel first(a1_);
  const RegimeKernel second(a2);
  a2_inv_ = second.solve(Matrix::Identity(n_ - 1, n_ - 1));
  m1_ = first.h1() - second.h1();
  m2_ = first.h2() - second.h2();
  visits_ = fundamental_matrix(embedded_jump_chain(a2)).rowwise().sum();
  k_area_ = initial_.dot(first.h2());
  k_duration_ = -initial_.dot(first.h1()) + 1.0 / sigma;
  value_term_ = Vector::Zero(n_ - 1);
}

RowVector EatCycleModel::occupancy(double tau) const {
  if (!(tau >= 0)) throw Error(ErrorKind::Domain, "EAT threshold must be nonnegative");
  if (std::isinf(tau)) return RowVector::Zero(n_ - 1);
  return tau == 0 ? initial_ : RowVector(initial_ * expm(tau * a1_));
}

CycleParams EatCycleModel::evaluate(double tau) const {
  const RowVector w = occupancy(tau);
  CycleParams out;
  out.duration = w.dot(m1_) + k_duration_;
  out.area = (std::isinf(tau) ? 0.0 : tau * w.dot(m1_)) - w.dot(m2_) + k_area_;
  out.transmissions = w.dot(visits_);
  out.next = RowVector::Zero(n_);
  const RowVector moved = -mu_ * (w * a2_inv_);
  for (Eigen::Index k = 0; k < n_ - 1; ++k) out.next[source_state(cycle_, k)] = moved[k];
  out.next[cycle_] = 1.0 - moved.sum();
  return out;
}

void EatCycleModel::set_objective(double lambda, const Vector& values) {
  if (values.size() != n_) throw Error(ErrorKind::Dimension, "value vector must have N entries");
  lambda_ = lambda;
  Vector relative(n_ - 1);
  for (Eigen::Index k = 0; k < n_ - 1; ++k)
    relative[k] = values[source_state(cycle_, k)] - values[cycle_];
  value_term_ = -mu_ * (a2_inv_ * relative);
}

double EatCycleModel::objective_at(double tau, const RowVector& w) const {
  const double num = w.dot(tau * m1_ - m2_ + lambda_ * visits_ + value_term_) + k_area_;
  const double den = w.dot(m1_) + k_duration_;
  return num / den;
}

double EatCycleModel::derivative_at(double tau, const RowVector& w) const {
  const RowVector wd = w * a1_;
  const Vector inner = tau * m1_ - m2_ + lambda_ * visits_ + value_term_;
  const double num = w.dot(inner) + k_area_;
  const double num_d = wd.dot(inner) + w.dot(m1_);
  const double den = w.dot(m1_) + k_duration_;
  const double den_d = wd.dot(m1_);
  return (num_d * den - num * den_d) / (den * den);
}

CycleParams eat_cycle(const Generator& g, const Channel& ch, Eigen::Index j, double tau) {
  return EatCycleModel(g, ch, j).evaluate(tau);
}

// ---------------------------------------------------------------------------

CycleParams ps_cycle(const Generator& g, const Channel& ch, double gamma, Eigen::Index j) {
  if (!(gamma >= 0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::Domain, "Poisson intensity must be finite and nonnegative");
  }
  const Eigen::Index n = g.size();
  if (j < 0 || j >= n) throw Error(ErrorKind::InvalidArgument, "cycle index out of range");
  const Eigen::Index k_states = n - 1;
  // Transient layout: [idle_0 .. idle_{K-1}, busy_0 .. busy_{K-1}].
  AmcSpec spec{Matrix::Zero(2 * k_states, 2 * k_states), Matrix::Zero(2 * k_states, n),
               RowVector::Zero(2 * k_states)};
  for (Eigen::Index k = 0; k < k_states; ++k) {
    const Eigen::Index i = source_state(j, k);
    for (Eigen::Index kk = 0; kk < k_states; ++kk) {
      if (kk == k) continue;
      const double rate = g.rate(i, source_state(j, kk));
      spec.transient(k, kk) = rate;
      spec.transient(k_states + k, kk) = rate;
    }
    spec.transient(k, k_states + k) = gamma;
    spec.transient(k, k) = -(g.holding_rate(i) + gamma);
    spec.transient(k_states + k, k_states + k) = -(g.holding_rate(i) + ch.mu);
    spec.absorbing(k, j) = g.rate(i, j);
    spec.absorbing(k_states + k, j) = g.rate(i, j);
    spec.absorbing(k_states + k, i) = ch.mu;
    spec.initial[k] = g.rate(j, i) / g.holding_rate(j);
  }
  const Moments moments = ph_moments(spec);
  CycleParams out;
  out.duration = moments.mean + 1.0 / g.holding_rate(j);
  out.area = 0.5 * moments.second;
  out.transmissions = gamma * moments.mean;
  out.next = absorption_probs(spec);
  return out;
}

}  // namespace aoii
