#include "aoii/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace aoii {

namespace {

constexpr double kStrictImprovement = 1e-12;
constexpr double kPolishRadius = 1e-4;
// EAT thresholds closer than this count as unchanged between sweeps.
constexpr double kSameThreshold = 1e-10;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool reaches_all(const Matrix& p, bool transposed) {
  const Eigen::Index n = p.rows();
  std::vector<bool> seen(n, false);
  std::vector<Eigen::Index> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const Eigen::Index i = stack.back();
    stack.pop_back();
    for (Eigen::Index k = 0; k < n; ++k) {
      const double w = transposed ? p(k, i) : p(i, k);
      if (w > 0 && !seen[k]) {
        seen[k] = true;
        stack.push_back(k);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

void require_irreducible(const Matrix& p) {
  if (!reaches_all(p, false) || !reaches_all(p, true)) {
    throw Error(ErrorKind::Reducible, "synchronization chain is reducible");
  }
}

Matrix transition_matrix(const std::vector<CycleParams>& cycles) {
  const Eigen::Index n = static_cast<Eigen::Index>(cycles.size());
  Matrix p(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (cycles[j].next.size() != n) throw Error(ErrorKind::Dimension, "cycle next-state vector has wrong size");
    p.row(j) = cycles[j].next;
  }
  return p;
}

void check_budget(double budget) {
  if (!(budget > 0) || !std::isfinite(budget)) {
    throw Error(ErrorKind::Domain, "budget must be positive and finite");
  }
}

// Relative-value improvement objective for an arbitrary cycle.
double improvement_objective(const CycleParams& c, Eigen::Index j, double lambda, const Vector& values) {
  double num = c.area + lambda * c.transmissions;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (i != j) num += (values[i] - values[j]) * c.next[i];
  return num / c.duration;
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Esat: return "esat";
    case Family::Eat: return "eat";
    case Family::St: return "st";
    case Family::Ps: return "ps";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::Esat, Family::Eat, Family::St, Family::Ps})
    if (to_string(f) == name) return f;
  throw Error(ErrorKind::InvalidArgument, "unknown policy family '" + std::string(name) + "'");
}

Family family_of(const Policy& p) {
  return std::visit(Overloaded{[](const Esat&) { return Family::Esat; },
                               [](const Eat&) { return Family::Eat; },
                               [](const St&) { return Family::St; },
                               [](const Ps&) { return Family::Ps; }},
                    p);
}

ThresholdVector cycle_thresholds(const Matrix& thresholds, Eigen::Index j) {
  return {j, remove_index(RowVector(thresholds.row(j)), j).transpose()};
}

RowVector steady_state(const Matrix& p) {
  const Eigen::Index n = p.rows();
  if (n < 1 || p.cols() != n) throw Error(ErrorKind::Dimension, "transition matrix must be square");
  if (!all_finite(p)) throw Error(ErrorKind::Domain, "transition matrix has non-finite entries");
  if ((p.array() < -1e-12).any()) throw Error(ErrorKind::NegativeRate, "negative transition probability");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(p.row(i).sum() - 1.0) > 1e-9) {
      throw Error(ErrorKind::RowSum, "row " + std::to_string(i) + " of P does not sum to 1");
    }
  }
  require_irreducible(p);
  // Grassmann-Taksar-Heyman elimination: only off-diagonal entries and
  // nonnegative sums are used, so small transition probabilities keep full
  // relative accuracy even when P is close to the identity.
  Matrix a = p.cwiseMax(0.0);
  for (Eigen::Index k = n - 1; k > 0; --k) {
    const double s = a.row(k).head(k).sum();
    a.col(k).head(k) /= s;
    a.topLeftCorner(k, k) += a.col(k).head(k) * a.row(k).head(k);
  }
  RowVector pi(n);
  pi[0] = 1.0;
  for (Eigen::Index k = 1; k < n; ++k) pi[k] = pi.head(k).dot(a.col(k).head(k).transpose());
  return pi / pi.sum();
}

EvalResult combine_cycles(std::vector<CycleParams> cycles) {
  EvalResult out;
  out.pi = steady_state(transition_matrix(cycles));
  double area = 0, attempts = 0, time = 0;
  for (std::size_t j = 0; j < cycles.size(); ++j) {
    const double w = out.pi[static_cast<Eigen::Index>(j)];
    area += w * cycles[j].area;
    attempts += w * cycles[j].transmissions;
    time += w * cycles[j].duration;
  }
  out.maoii = area / time;
  out.rate = attempts / time;
  out.cycles = std::move(cycles);
  return out;
}

EvalResult evaluate_policy(const Generator& g, const Channel& ch, const Policy& pol) {
  const Eigen::Index n = g.size();
  std::vector<CycleParams> cycles;
  cycles.reserve(n);
  std::visit(Overloaded{
                 [&](const Esat& p) {
                   if (p.thresholds.rows() != n || p.thresholds.cols() != n) {
                     throw Error(ErrorKind::Dimension, "ESAT threshold matrix must be N x N");
                   }
                   for (Eigen::Index j = 0; j < n; ++j)
                     cycles.push_back(esat_cycle(g, ch, cycle_thresholds(p.thresholds, j)));
                 },
                 [&](const Eat& p) {
                   if (p.thresholds.size() != n) throw Error(ErrorKind::Dimension, "EAT needs N thresholds");
                   for (Eigen::Index j = 0; j < n; ++j) cycles.push_back(eat_cycle(g, ch, j, p.thresholds[j]));
                 },
                 [&](const St& p) {
                   for (Eigen::Index j = 0; j < n; ++j) cycles.push_back(eat_cycle(g, ch, j, p.threshold));
                 },
                 [&](const Ps& p) {
                   for (Eigen::Index j = 0; j < n; ++j) cycles.push_back(ps_cycle(g, ch, p.intensity, j));
                 }},
             pol);
  return combine_cycles(std::move(cycles));
}

ValueSolution value_determination(const std::vector<CycleParams>& cycles, double lambda) {
  const Matrix p = transition_matrix(cycles);
  const Eigen::Index n = p.rows();
  require_irreducible(p);
  // Unknowns: V_0 .. V_{N-2}, eta (V_{N-1} = 0).
  Matrix m = Matrix::Zero(n, n);
  Vector rhs(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i + 1 < n; ++i) m(j, i) = (i == j ? 1.0 : 0.0) - p(j, i);
    m(j, n - 1) = cycles[j].duration;
    rhs[j] = cycles[j].area + lambda * cycles[j].transmissions;
  }
  const Vector x = solve_checked(m, rhs).x;
  ValueSolution out;
  out.eta = x[n - 1];
  out.values = Vector::Zero(n);
  out.values.head(n - 1) = x.head(n - 1);
  return out;
}

void validate(const SolverConfig& cfg) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be positive and finite");
    }
  };
  positive(cfg.eps_lambda, "eps_lambda");
  positive(cfg.eps_tau, "eps_tau");
  positive(cfg.eps_eta, "eps_eta");
  positive(cfg.grid_step, "grid_step");
  positive(cfg.tau_max, "tau_max");
  positive(cfg.lambda_max, "lambda_max");
  positive(cfg.lambda_cap, "lambda_cap");
  positive(cfg.grid_cap, "grid_cap");
  positive(cfg.gamma_max, "gamma_max");
  positive(cfg.audit_step, "audit_step");
  if (cfg.lambda_cap < cfg.lambda_max) throw Error(ErrorKind::InvalidArgument, "lambda_cap < lambda_max");
  if (cfg.max_iterations < 1 || cfg.max_bisections < 1) {
    throw Error(ErrorKind::InvalidArgument, "iteration limits must be at least 1");
  }
}

// ---------------------------------------------------------------------------
// EAT improvement

namespace {

struct Probe {
  double tau;
  double value;
};

// Projected gradient descent with Armijo backtracking on [0, tau_max].
Probe descend(const EatCycleModel& model, double tau, double tau_max, bool& converged) {
  RowVector w = model.occupancy(tau);
  double f = model.objective_at(tau, w);
  double grad = model.derivative_at(tau, w);
  double step = 1.0;
  for (int it = 0; it < 500; ++it) {
    const double cand = std::clamp(tau - step * grad, 0.0, tau_max);
    const double move = tau - cand;
    if (std::abs(move) <= 1e-12 * (1.0 + tau)) return {tau, f};
    const RowVector wc = model.occupancy(cand);
    const double fc = model.objective_at(cand, wc);
    if (fc <= f - 1e-4 * grad * move) {
      tau = cand;
      w = wc;
      f = fc;
      grad = model.derivative_at(tau, w);
      step *= 2.0;
    } else {
      step *= 0.5;
      if (step < 1e-16) return {tau, f};
    }
  }
  converged = false;
  return {tau, f};
}

}  // namespace

EatImprovement improve_eat(EatCycleModel& model, double lambda, const Vector& values, double current,
                           const SolverConfig& cfg) {
  model.set_objective(lambda, values);
  const double tau_max = cfg.tau_max;
  bool converged = true;
  Probe best{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()};
  auto consider = [&](Probe p) {
    if (p.value < best.value) best = p;
  };
  const double seed_current = std::isfinite(current) ? std::clamp(current, 0.0, tau_max) : tau_max;
  for (double seed : {0.0, seed_current, 0.5 * tau_max}) consider(descend(model, seed, tau_max, converged));

  // Grid audit: occupancy advanced by one fixed transition per step.
  const int steps = static_cast<int>(std::floor(tau_max / cfg.audit_step + 1e-9));
  const Matrix hop = expm(cfg.audit_step * model.first_regime());
  RowVector w = model.occupancy(0.0);
  Probe grid_best{0.0, std::numeric_limits<double>::infinity()};
  for (int k = 0; k <= steps; ++k) {
    const double tau = k * cfg.audit_step;
    const double f = model.objective_at(tau, w);
    if (f < grid_best.value) grid_best = {tau, f};
    w = w * hop;
  }
  if (grid_best.value < best.value - kStrictImprovement) {
    consider(grid_best);
    consider(descend(model, grid_best.tau, tau_max, converged));
  }
  {
    const RowVector wm = model.occupancy(tau_max);
    consider({tau_max, model.objective_at(tau_max, wm)});
  }

  EatImprovement out{best.tau, best.value, converged};
  if (std::isfinite(current) && current >= 0) {
    // Jumps to another basin need a clear gain, otherwise two near-equal
    // minima could alternate forever; moves that only polish the current
    // minimum are taken whenever they do not make things worse.
    const double kept = model.objective(current);
    const bool polish = std::abs(best.tau - current) <= kPolishRadius * (1.0 + current) && best.value <= kept;
    if (!(best.value < kept - kStrictImprovement) && !polish) out = {current, kept, converged};
  }
  return out;
}

EatImprovement improve_eat(const Generator& g, const Channel& ch, Eigen::Index j, double lambda,
                           const Vector& values, double current, const SolverConfig& cfg) {
  EatCycleModel model(g, ch, j);
  return improve_eat(model, lambda, values, current, cfg);
}

// ---------------------------------------------------------------------------
// ESAT improvement

namespace {

// k-th grid point; exact decimal spacing when 1/step is an integer.
double grid_point(int k, double step) {
  const double inverse = std::round(1.0 / step);
  if (std::abs(1.0 / step - inverse) < 1e-9 * inverse) return k / inverse;
  return k * step;
}

}  // namespace

double esat_grid_size(Eigen::Index n, const SolverConfig& cfg) {
  const double points = std::floor(cfg.tau_max / cfg.grid_step + 1e-9) + 1.0;
  return std::pow(points, static_cast<double>(n - 1));
}

Vector improve_esat(EsatCycleModel& model, double lambda, const Vector& values, const Vector& current,
                    const SolverConfig& cfg) {
  const Eigen::Index k_states = values.size() - 1;
  const Eigen::Index j = model.cycle();
  const double size = esat_grid_size(values.size(), cfg);
  if (size > cfg.grid_cap) {
    throw Error(ErrorKind::GridCap, "ESAT grid has " + std::to_string(size) + " points per cycle, above the cap of " +
                                        std::to_string(cfg.grid_cap) +
                                        "; use a coarser grid_step, a smaller tau_max or the EAT family");
  }
  const int last = static_cast<int>(std::floor(cfg.tau_max / cfg.grid_step + 1e-9));
  std::vector<int> idx(k_states, 0);
  Vector taus = Vector::Zero(k_states);
  Vector best = taus;
  double best_value = std::numeric_limits<double>::infinity();
  while (true) {
    for (Eigen::Index k = 0; k < k_states; ++k) taus[k] = grid_point(idx[k], cfg.grid_step);
    const double f = improvement_objective(model.evaluate(taus), j, lambda, values);
    if (f < best_value) {
      best_value = f;
      best = taus;
    }
    // Odometer over the grid, last index fastest: lexicographic order.
    Eigen::Index pos = k_states - 1;
    while (pos >= 0 && idx[pos] == last) idx[pos--] = 0;
    if (pos < 0) break;
    ++idx[pos];
  }
  if (current.size() == k_states) {
    const double kept = improvement_objective(model.evaluate(current), j, lambda, values);
    if (!(best_value < kept - kStrictImprovement)) return current;
  }
  return best;
}

Vector improve_esat(const Generator& g, const Channel& ch, Eigen::Index j, double lambda,
                    const Vector& values, const Vector& current, const SolverConfig& cfg) {
  EsatCycleModel model(g, ch, j);
  return improve_esat(model, lambda, values, current, cfg);
}

// ---------------------------------------------------------------------------
// Policy iteration

PolicyIterationResult policy_iteration(const Generator& g, const Channel& ch, double lambda, Family family,
                                       const SolverConfig& cfg, const Policy* start) {
  validate(cfg);
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw Error(ErrorKind::Domain, "lambda must be nonnegative");
  if (family != Family::Esat && family != Family::Eat) {
    throw Error(ErrorKind::InvalidArgument, "policy iteration applies to the ESAT and EAT families");
  }
  const Eigen::Index n = g.size();
  if (start && family_of(*start) != family) {
    throw Error(ErrorKind::InvalidArgument, "starting policy belongs to a different family");
  }
  if (family == Family::Esat && esat_grid_size(n, cfg) > cfg.grid_cap) {
    throw Error(ErrorKind::GridCap, "ESAT grid has " + std::to_string(esat_grid_size(n, cfg)) +
                                        " points per cycle, above the cap of " + std::to_string(cfg.grid_cap) +
                                        "; use a coarser grid_step, a smaller tau_max or the EAT family");
  }

  SolveReport report;
  report.lambda_star = lambda;

  std::vector<CycleParams> cycles(n);
  if (family == Family::Eat) {
    std::vector<EatCycleModel> models;
    models.reserve(n);
    for (Eigen::Index j = 0; j < n; ++j) models.emplace_back(g, ch, j);
    Vector taus = start ? std::get<Eat>(*start).thresholds : Vector::Zero(n);
    if (taus.size() != n) throw Error(ErrorKind::Dimension, "EAT needs N thresholds");
    for (int it = 1; it <= cfg.max_iterations; ++it) {
      for (Eigen::Index j = 0; j < n; ++j) cycles[j] = models[j].evaluate(taus[j]);
      const ValueSolution vd = value_determination(cycles, lambda);
      report.iterations = it;
      report.values = vd.values;
      if (!report.eta_trace.empty()) {
        const double prev = report.eta_trace.back();
        if (vd.eta > prev + 1e-9 * std::max(1.0, std::abs(prev))) report.monotone = false;
        report.eta_trace.push_back(vd.eta);
        if (std::abs(vd.eta - prev) <= cfg.eps_eta) {
          report.converged = true;
          break;
        }
      } else {
        report.eta_trace.push_back(vd.eta);
      }
      bool changed = false;
      Vector next = taus;
      for (Eigen::Index j = 0; j < n; ++j) {
        const EatImprovement imp = improve_eat(models[j], lambda, vd.values, taus[j], cfg);
        if (std::abs(imp.tau - taus[j]) > kSameThreshold * (1.0 + taus[j])) changed = true;
        next[j] = imp.tau;
      }
      if (!changed) {
        report.converged = true;
        break;
      }
      taus = next;
    }
    return {Eat{taus}, report};
  }

  std::vector<EsatCycleModel> models;
  models.reserve(n);
  for (Eigen::Index j = 0; j < n; ++j) models.emplace_back(g, ch, j);
  Matrix t = start ? std::get<Esat>(*start).thresholds : Matrix::Zero(n, n);
  if (t.rows() != n || t.cols() != n) throw Error(ErrorKind::Dimension, "ESAT threshold matrix must be N x N");
  t.diagonal().setZero();
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    for (Eigen::Index j = 0; j < n; ++j) cycles[j] = models[j].evaluate(cycle_thresholds(t, j).taus);
    const ValueSolution vd = value_determination(cycles, lambda);
    report.iterations = it;
    report.values = vd.values;
    if (!report.eta_trace.empty()) {
      const double prev = report.eta_trace.back();
      if (vd.eta > prev + 1e-9 * std::max(1.0, std::abs(prev))) report.monotone = false;
      report.eta_trace.push_back(vd.eta);
      if (std::abs(vd.eta - prev) <= cfg.eps_eta) {
        report.converged = true;
        break;
      }
    } else {
      report.eta_trace.push_back(vd.eta);
    }
    bool changed = false;
    Matrix next = t;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Vector current = cycle_thresholds(t, j).taus;
      const Vector improved = improve_esat(models[j], lambda, vd.values, current, cfg);
      if (improved != current) changed = true;
      for (Eigen::Index k = 0; k < n - 1; ++k) next(j, source_state(j, k)) = improved[k];
    }
    if (!changed) {
      report.converged = true;
      break;
    }
    t = next;
  }
  return {Esat{t}, report};
}

// ---------------------------------------------------------------------------
// Constrained solvers

namespace {

struct Trial {
  PolicyIterationResult pi;
  EvalResult eval;
};

Trial run_at(const Generator& g, const Channel& ch, double lambda, Family family, const SolverConfig& cfg,
             const Policy* start) {
  PolicyIterationResult r = policy_iteration(g, ch, lambda, family, cfg, start);
  EvalResult e = evaluate_policy(g, ch, r.policy);
  return {std::move(r), std::move(e)};
}

OptimizeResult finish(const Trial& t, double lambda, bool binding, bool tight, int steps) {
  OptimizeResult out{t.pi.policy, t.eval, t.pi.report};
  out.lambda_star = lambda;
  out.report.lambda_star = lambda;
  out.binding = binding;
  out.tight = tight;
  out.bisection_steps = steps;
  return out;
}

}  // namespace

OptimizeResult lagrangian_bisection(const Generator& g, const Channel& ch, double budget, Family family,
                                    const SolverConfig& cfg) {
  check_budget(budget);
  validate(cfg);
  Trial low = run_at(g, ch, 0.0, family, cfg, nullptr);
  if (low.eval.rate <= budget) return finish(low, 0.0, false, true, 0);

  double hi = cfg.lambda_max;
  Trial high = run_at(g, ch, hi, family, cfg, &low.pi.policy);
  while (high.eval.rate > budget + cfg.eps_lambda) {
    if (hi * 2.0 > cfg.lambda_cap) {
      throw Error(ErrorKind::Infeasible,
                  "budget " + std::to_string(budget) + " unreachable: R = " + std::to_string(high.eval.rate) +
                      " at lambda = " + std::to_string(hi) + "; raise lambda_max/lambda_cap or tau_max");
    }
    hi *= 2.0;
    high = run_at(g, ch, hi, family, cfg, &high.pi.policy);
  }
  if (std::abs(high.eval.rate - budget) <= cfg.eps_lambda) return finish(high, hi, true, true, 0);

  double lo = 0.0;
  for (int step = 1; step <= cfg.max_bisections; ++step) {
    const double mid = 0.5 * (lo + hi);
    Trial t = run_at(g, ch, mid, family, cfg, &high.pi.policy);
    if (std::abs(t.eval.rate - budget) <= cfg.eps_lambda) return finish(t, mid, true, true, step);
    if (t.eval.rate > budget) {
      lo = mid;
      low = std::move(t);
    } else {
      hi = mid;
      high = std::move(t);
    }
    if (hi - lo <= 1e-12 * std::max(1.0, hi)) return finish(high, hi, true, false, step);
  }
  return finish(high, hi, true, false, cfg.max_bisections);
}

OptimizeResult st_bisection(const Generator& g, const Channel& ch, double budget, const SolverConfig& cfg) {
  check_budget(budget);
  validate(cfg);
  const Eigen::Index n = g.size();
  std::vector<EatCycleModel> models;
  models.reserve(n);
  for (Eigen::Index j = 0; j < n; ++j) models.emplace_back(g, ch, j);
  auto eval = [&](double tau) {
    std::vector<CycleParams> cycles;
    cycles.reserve(n);
    for (const auto& m : models) cycles.push_back(m.evaluate(tau));
    return combine_cycles(std::move(cycles));
  };
  auto result = [&](double tau, EvalResult e, bool binding, bool tight, int steps) {
    OptimizeResult out{St{tau}, std::move(e), SolveReport{}};
    out.binding = binding;
    out.tight = tight;
    out.bisection_steps = steps;
    out.report.converged = tight;
    return out;
  };
  EvalResult at_zero = eval(0.0);
  if (at_zero.rate <= budget) return result(0.0, std::move(at_zero), false, true, 0);
  EvalResult at_max = eval(cfg.tau_max);
  if (at_max.rate > budget + cfg.eps_tau) {
    throw Error(ErrorKind::Infeasible, "budget " + std::to_string(budget) + " unreachable: R = " +
                                           std::to_string(at_max.rate) + " at tau_max = " +
                                           std::to_string(cfg.tau_max) + "; raise tau_max");
  }
  if (std::abs(at_max.rate - budget) <= cfg.eps_tau) return result(cfg.tau_max, std::move(at_max), true, true, 0);
  double lo = 0.0, hi = cfg.tau_max;
  EvalResult high = std::move(at_max);
  for (int step = 1; step <= cfg.max_bisections; ++step) {
    const double mid = 0.5 * (lo + hi);
    EvalResult e = eval(mid);
    if (std::abs(e.rate - budget) <= cfg.eps_tau) return result(mid, std::move(e), true, true, step);
    if (e.rate > budget) {
      lo = mid;
    } else {
      hi = mid;
      high = std::move(e);
    }
    if (hi - lo <= 1e-14 * std::max(1.0, hi)) return result(hi, std::move(high), true, false, step);
  }
  return result(hi, std::move(high), true, false, cfg.max_bisections);
}

OptimizeResult ps_rate_match(const Generator& g, const Channel& ch, double budget, const SolverConfig& cfg) {
  if (!(budget >= 0) || !std::isfinite(budget)) throw Error(ErrorKind::Domain, "budget must be nonnegative");
  validate(cfg);
  auto result = [&](double gamma, bool binding, bool tight, int steps) {
    OptimizeResult out{Ps{gamma}, evaluate_policy(g, ch, Ps{gamma}), SolveReport{}};
    out.binding = binding;
    out.tight = tight;
    out.bisection_steps = steps;
    out.report.converged = tight;
    return out;
  };
  const Policy at_max = Ps{cfg.gamma_max};
  const double rate_max = evaluate_policy(g, ch, at_max).rate;
  if (rate_max <= budget) {
    OptimizeResult out = result(cfg.gamma_max, false, true, 0);
    out.saturated = true;
    return out;
  }
  if (budget == 0) {
    // Without sampling every cycle ends at its own value: the synchronization
    // chain never leaves its initial state, so the long-run MAoII depends on
    // where it starts and is reported as undefined.
    OptimizeResult out{Ps{0.0}, EvalResult{}, SolveReport{}};
    for (Eigen::Index j = 0; j < g.size(); ++j) out.eval.cycles.push_back(ps_cycle(g, ch, 0.0, j));
    out.eval.maoii = std::numeric_limits<double>::quiet_NaN();
    out.binding = true;
    out.report.converged = true;
    return out;
  }
  double lo = 0.0, hi = cfg.gamma_max;
  for (int step = 1; step <= cfg.max_bisections; ++step) {
    const double mid = 0.5 * (lo + hi);
    const double rate = evaluate_policy(g, ch, Ps{mid}).rate;
    if (std::abs(rate - budget) <= cfg.eps_lambda) return result(mid, true, true, step);
    (rate > budget ? hi : lo) = mid;
    if (hi - lo <= 1e-14 * std::max(1.0, hi)) return result(lo, true, false, step);
  }
  return result(lo, true, false, cfg.max_bisections);
}

OptimizeResult optimize(const Generator& g, const Channel& ch, double budget, Family family,
                        const SolverConfig& cfg) {
  switch (family) {
    case Family::St: return st_bisection(g, ch, budget, cfg);
    case Family::Ps: return ps_rate_match(g, ch, budget, cfg);
    default: return lagrangian_bisection(g, ch, budget, family, cfg);
  }
}

}  // namespace aoii
