#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "aoii/cycle.hpp"

namespace aoii {

/// Estimation- and state-aware thresholds: T(j, i) = tau_ji, diagonal ignored.
struct Esat {
  Matrix thresholds;
};
/// One threshold per estimate j.
struct Eat {
  Vector thresholds;
};
/// One system-wide threshold.
struct St {
  double threshold = 0;
};
/// Poisson sampling at a fixed intensity while out of sync.
struct Ps {
  double intensity = 0;
};

using Policy = std::variant<Esat, Eat, St, Ps>;

enum class Family { Esat, Eat, St, Ps };

std::string_view to_string(Family f);
/// Parses "esat", "eat", "st" or "ps"; throws InvalidArgument otherwise.
Family parse_family(std::string_view name);
Family family_of(const Policy& p);

/// Row j of an ESAT threshold matrix as the N-1 thresholds of cycle j.
ThresholdVector cycle_thresholds(const Matrix& thresholds, Eigen::Index j);

struct EvalResult {
  RowVector pi;
  double maoii = 0;
  double rate = 0;
  std::vector<CycleParams> cycles;
};

/// Stationary distribution of an irreducible row-stochastic matrix.
RowVector steady_state(const Matrix& p);

/// Combines per-cycle parameters into the stationary ratios.
EvalResult combine_cycles(std::vector<CycleParams> cycles);

EvalResult evaluate_policy(const Generator& g, const Channel& ch, const Policy& pol);

struct ValueSolution {
  double eta = 0;
  Vector values;  ///< relative values, last entry pinned to 0
};

/// Solves V_j = a_j + lambda c_j - eta d_j + sum_i p_ji V_i with V_{N-1} = 0.
ValueSolution value_determination(const std::vector<CycleParams>& cycles, double lambda);

struct SolverConfig {
  double eps_lambda = 1e-3;
  double eps_tau = 1e-3;
  double eps_eta = 1e-6;
  double grid_step = 0.05;
  double tau_max = 10.0;
  double lambda_max = 100.0;
  double lambda_cap = 1e4;
  double grid_cap = 1e7;
  double gamma_max = 1e3;
  double audit_step = 0.01;
  int max_iterations = 100;
  int max_bisections = 200;
};

void validate(const SolverConfig& cfg);

struct SolveReport {
  double lambda_star = 0;
  std::vector<double> eta_trace;
  Vector values;
  int iterations = 0;
  bool converged = false;
  bool monotone = true;  ///< eta never increased across sweeps
};

struct EatImprovement {
  double tau = 0;
  double objective = 0;
  bool converged = true;
};

/**
 * Minimizes (a + lambda c + sum_{i != j} (V_i - V_j) p_ji) / d over
 * tau in [0, tau_max] by projected gradient descent from several seeds,
 * audited on a fixed grid. The current threshold is kept unless the new one
 * is strictly better.
 */
EatImprovement improve_eat(EatCycleModel& model, double lambda, const Vector& values, double current,
                           const SolverConfig& cfg);
EatImprovement improve_eat(const Generator& g, const Channel& ch, Eigen::Index j, double lambda,
                           const Vector& values, double current, const SolverConfig& cfg);

/// Number of points in the ESAT search grid of an N-state source.
double esat_grid_size(Eigen::Index n, const SolverConfig& cfg);

/// Exhaustive lexicographic grid search for the thresholds of one cycle.
Vector improve_esat(EsatCycleModel& model, double lambda, const Vector& values, const Vector& current,
                    const SolverConfig& cfg);
Vector improve_esat(const Generator& g, const Channel& ch, Eigen::Index j, double lambda,
                    const Vector& values, const Vector& current, const SolverConfig& cfg);

struct PolicyIterationResult {
  Policy policy;
  SolveReport report;
};

/// Unconstrained policy iteration at a fixed multiplier. `start`, when given,
/// must belong to `family` (ESAT or EAT).
PolicyIterationResult policy_iteration(const Generator& g, const Channel& ch, double lambda, Family family,
                                       const SolverConfig& cfg, const Policy* start = nullptr);

struct OptimizeResult {
  Policy policy;
  EvalResult eval;
  SolveReport report;
  double lambda_star = 0;
  bool binding = false;    ///< the budget constraint is active
  bool tight = true;       ///< |R - b| within tolerance when binding
  bool saturated = false;  ///< PS only: budget exceeds R(gamma_max)
  int bisection_steps = 0;
};

OptimizeResult lagrangian_bisection(const Generator& g, const Channel& ch, double budget, Family family,
                                    const SolverConfig& cfg);
OptimizeResult st_bisection(const Generator& g, const Channel& ch, double budget, const SolverConfig& cfg);
OptimizeResult ps_rate_match(const Generator& g, const Channel& ch, double budget, const SolverConfig& cfg);

/// Dispatches to the solver of the given family.
OptimizeResult optimize(const Generator& g, const Channel& ch, double budget, Family family,
                        const SolverConfig& cfg);

}  // namespace aoii
