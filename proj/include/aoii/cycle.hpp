#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "aoii/ctmc.hpp"
#include "aoii/mrph.hpp"

namespace aoii {

/// Transient index k of a cycle-j absorbing chain maps to source state
/// k (k < j) or k + 1 (k >= j): the source states other than j, in order.
inline Eigen::Index source_state(Eigen::Index cycle, Eigen::Index k) {
  return k < cycle ? k : k + 1;
}
inline Eigen::Index transient_index(Eigen::Index cycle, Eigen::Index state) {
  return state < cycle ? state : state - 1;
}

/// Thresholds tau_ji of cycle j, one per source state i != j (in increasing
/// state order). Entries may be +infinity ("never transmit in state i").
struct ThresholdVector {
  Eigen::Index cycle;
  Vector taus;
};

/// Expected per-cycle quantities of the embedded semi-Markov chain.
struct CycleParams {
  double duration = 0;       ///< d_j: in-sync holding time plus out-of-sync time
  double area = 0;           ///< a_j: expected area under AoII
  double transmissions = 0;  ///< c_j: expected transmission attempts
  RowVector next;            ///< p_j.: distribution of the next synchronization value
};

/// Regime boundaries and, per regime, the source states whose threshold has
/// been reached (states with +infinity thresholds never appear).
struct RegimeLayout {
  std::vector<double> boundaries;
  std::vector<std::vector<Eigen::Index>> active;
};

RegimeLayout esat_regimes(const Generator& g, const ThresholdVector& tau);

/// The absorbing chain of cycle j under ESAT thresholds as an MrphSpec with
/// K = N - 1 transient states and L = N absorbing states (one per
/// synchronization value, indexed by state).
MrphSpec esat_mrph(const Generator& g, const Channel& ch, const ThresholdVector& tau);

CycleParams esat_cycle(const Generator& g, const Channel& ch, const ThresholdVector& tau);

/// Compact two-regime evaluation for a single threshold per cycle.
CycleParams eat_cycle(const Generator& g, const Channel& ch, Eigen::Index j, double tau);

/// Poisson sampling at intensity gamma while out of sync.
CycleParams ps_cycle(const Generator& g, const Channel& ch, double gamma, Eigen::Index j);

/**
 * Reusable evaluator for one ESAT cycle. Sub-generator factorizations are
 * cached per set of active states and matrix exponentials per (set, width),
 * so repeated evaluation over a threshold grid costs only vector products.
 * Not thread-safe: use one instance per thread.
 */
class EsatCycleModel {
 public:
  EsatCycleModel(const Generator& g, const Channel& ch, Eigen::Index cycle);

  Eigen::Index cycle() const { return cycle_; }
  CycleParams evaluate(const Vector& taus);

 private:
  struct MaskData {
    std::unique_ptr<RegimeKernel> kernel;
    Matrix solved_absorbing;  // A^{-1} B
    Matrix solved_inflow;     // A^{-1} W, column k = inflow rates into state k
  };
  struct WidthKey {
    std::uint64_t mask;
    double width;
    bool operator==(const WidthKey&) const = default;
  };
  struct WidthHash {
    std::size_t operator()(const WidthKey& k) const noexcept;
  };

  const MaskData& mask_data(std::uint64_t mask);
  const Matrix& transition(std::uint64_t mask, double width);
  Matrix sub_generator(std::uint64_t mask) const;

  Eigen::Index cycle_;
  Eigen::Index n_;
  double mu_;
  double sigma_;
  Matrix base_;       // Q^{(-j)}
  Matrix inflow_;     // Q^{(-j)} with zero diagonal
  Vector to_cycle_;   // q_ij for i != j
  RowVector initial_;
  std::unordered_map<std::uint64_t, MaskData> masks_;
  std::unordered_map<WidthKey, Matrix, WidthHash> exps_;
};

/**
 * Two-regime (single threshold) cycle with everything that does not depend on
 * the threshold precomputed. Also exposes the policy-improvement objective
 * f(tau) = (a + lambda c + sum_i (V_i - V_j) p_ji) / d and its derivative.
 */
class EatCycleModel {
 public:
  EatCycleModel(const Generator& g, const Channel& ch, Eigen::Index cycle);

  Eigen::Index cycle() const { return cycle_; }
  const Matrix& first_regime() const { return a1_; }

  CycleParams evaluate(double tau) const;

  /// Fixes lambda and the relative values for objective evaluations.
  void set_objective(double lambda, const Vector& values);

  /// beta_1 e^{A_1 tau}: occupancy at the threshold.
  RowVector occupancy(double tau) const;
  double objective(double tau) const { return objective_at(tau, occupancy(tau)); }
  double objective_at(double tau, const RowVector& w) const;
  double derivative_at(double tau, const RowVector& w) const;

 private:
  Eigen::Index cycle_;
  Eigen::Index n_;
  double mu_;
  Matrix a1_;
  Matrix a2_inv_;
  RowVector initial_;
  Vector m1_;       // (A1^{-1} - A2^{-1}) 1
  Vector m2_;       // (A1^{-2} - A2^{-2}) 1
  Vector visits_;   // F 1, F the fundamental matrix of the second regime
  double k_area_;   // beta A1^{-2} 1
  double k_duration_;  // -beta A1^{-1} 1 + 1/sigma_j
  // objective state
  double lambda_ = 0;
  Vector value_term_;  // -mu A2^{-1} v
};

}  // namespace aoii
