#include "aoii/simulator.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace aoii {

namespace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  Eigen::Index categorical(const RowVector& cumulative) {
    const double u = uniform() * cumulative[cumulative.size() - 1];
    for (Eigen::Index k = 0; k < cumulative.size(); ++k)
      if (u < cumulative[k]) return k;
    return cumulative.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

// Threshold of (estimate j, source state i); +inf when the policy never
// transmits there and NaN for Poisson sampling.
double threshold(const Policy& pol, Eigen::Index j, Eigen::Index i) {
  if (const auto* p = std::get_if<Esat>(&pol)) return p->thresholds(j, i);
  if (const auto* p = std::get_if<Eat>(&pol)) return p->thresholds[j];
  if (const auto* p = std::get_if<St>(&pol)) return p->threshold;
  return std::numeric_limits<double>::quiet_NaN();
}

void check(const SimConfig& cfg) {
  const Eigen::Index n = cfg.source.size();
  if (cfg.cycles < 1) throw Error(ErrorKind::InvalidArgument, "simulation needs at least one cycle");
  if (cfg.initial_state < 0 || cfg.initial_state >= n) {
    throw Error(ErrorKind::InvalidArgument, "initial state out of range");
  }
  if (!(cfg.channel.mu > 0)) throw Error(ErrorKind::Domain, "service rate must be positive");
  if (const auto* p = std::get_if<Esat>(&cfg.policy)) {
    if (p->thresholds.rows() != n || p->thresholds.cols() != n) {
      throw Error(ErrorKind::Dimension, "ESAT threshold matrix must be N x N");
    }
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j && !(p->thresholds(j, i) >= 0)) throw Error(ErrorKind::Domain, "negative threshold");
  } else if (const auto* p = std::get_if<Eat>(&cfg.policy)) {
    if (p->thresholds.size() != n) throw Error(ErrorKind::Dimension, "EAT needs N thresholds");
    for (double t : p->thresholds)
      if (!(t >= 0)) throw Error(ErrorKind::Domain, "negative threshold");
  } else if (const auto* p = std::get_if<St>(&cfg.policy)) {
    if (!(p->threshold >= 0)) throw Error(ErrorKind::Domain, "negative threshold");
  } else if (const auto* p = std::get_if<Ps>(&cfg.policy)) {
    if (!(p->intensity >= 0) || !std::isfinite(p->intensity)) {
      throw Error(ErrorKind::Domain, "Poisson intensity must be finite and nonnegative");
    }
  }
}

struct Block {
  double area = 0, duration = 0, attempts = 0;
};

// Delta-method standard error of sum(y) / sum(x) over i.i.d. blocks.
double ratio_stderr(const std::vector<Block>& blocks, double Block::*num) {
  const double n = static_cast<double>(blocks.size());
  if (blocks.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sy = 0, sx = 0;
  for (const Block& b : blocks) {
    sy += b.*num;
    sx += b.duration;
  }
  const double r = sy / sx;
  const double mean_x = sx / n;
  double ss = 0;
  for (const Block& b : blocks) {
    const double z = b.*num - r * b.duration;
    ss += z * z;
  }
  const double var = ss / (n - 1.0);
  return std::sqrt(var / n) / mean_x;
}

}  // namespace

SimResult simulate(const SimConfig& cfg, SimTrace* trace) {
  check(cfg);
  const Generator& g = cfg.source;
  const Eigen::Index n = g.size();
  const double mu = cfg.channel.mu;
  const bool poisson = std::holds_alternative<Ps>(cfg.policy);
  const double gamma = poisson ? std::get<Ps>(cfg.policy).intensity : 0.0;

  // Cumulative jump distributions, one row per state.
  Matrix cumulative = jump_probs(g);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 1; k < n; ++k) cumulative(i, k) += cumulative(i, k - 1);

  Sampler rng(cfg.seed);
  SimResult out;
  const bool log = trace && trace->events_enabled;
  double clock = 0;
  auto emit = [&](EventKind kind, Eigen::Index x, Eigen::Index xhat, double age) {
    if (log) trace->events.push_back({clock, kind, x, xhat, age});
  };

  double total_area = 0, total_time = 0, total_attempts = 0;
  std::vector<Block> blocks;
  Block open;
  bool block_started = false;

  Eigen::Index value = cfg.initial_state;
  for (std::uint64_t c = 0; c < cfg.cycles; ++c) {
    if (value == cfg.initial_state) {
      if (block_started) blocks.push_back(open);
      open = Block{};
      block_started = true;
    }
    const Eigen::Index j = value;
    // In sync: AoII stays 0 until the source leaves j.
    const double hold = rng.exponential(g.holding_rate(j));
    clock += hold;
    Eigen::Index x = rng.categorical(cumulative.row(j));
    emit(EventKind::Desync, x, j, 0.0);

    double age = 0, area = 0;
    int attempts = 0;
    bool busy = false;
    Eigen::Index next = -1;
    auto start = [&](EventKind kind) {
      ++attempts;
      busy = true;
      emit(kind, x, j, age);
    };
    auto advance = [&](double dt) {
      area += age * dt + 0.5 * dt * dt;
      age += dt;
      clock += dt;
    };
    if (!poisson && age >= threshold(cfg.policy, j, x)) start(EventKind::Start);
    while (next < 0) {
      const double jump = rng.exponential(g.holding_rate(x));
      double other = std::numeric_limits<double>::infinity();
      enum { None, Crossing, Service, Sampling } kind = None;
      if (busy) {
        other = rng.exponential(mu);
        kind = Service;
      }
      if (poisson && gamma > 0) {
        const double s = rng.exponential(gamma);
        if (s < other) {
          other = s;
          kind = Sampling;
        }
      } else if (!poisson && !busy) {
        const double tau = threshold(cfg.policy, j, x);
        if (std::isfinite(tau)) {
          other = std::max(0.0, tau - age);
          kind = Crossing;
        }
      }
      if (jump <= other) {
        advance(jump);
        busy = false;  // a state change makes any in-flight sample stale
        x = rng.categorical(cumulative.row(x));
        emit(EventKind::Jump, x, j, age);
        if (x == j) {
          next = j;
        } else if (!poisson && age >= threshold(cfg.policy, j, x)) {
          start(EventKind::Start);
        }
        continue;
      }
      advance(other);
      switch (kind) {
        case Crossing: start(EventKind::Start); break;
        case Sampling: start(EventKind::Sample); break;
        case Service:
          emit(EventKind::Completion, x, j, age);
          next = x;
          break;
        case None: break;
      }
    }
    emit(EventKind::Resync, next, next, age);

    const double closed = 0.5 * age * age;
    out.max_area_discrepancy =
        std::max(out.max_area_discrepancy, std::abs(area - closed) / std::max(1.0, closed));
    const double duration = hold + age;
    total_area += closed;
    total_time += duration;
    total_attempts += attempts;
    open.area += closed;
    open.duration += duration;
    open.attempts += attempts;
    if (trace) trace->cycles.push_back({c, j, next, duration, age, closed, attempts});
    value = next;
  }
  if (block_started && value == cfg.initial_state) blocks.push_back(open);

  out.cycle_count = cfg.cycles;
  out.blocks = blocks.size();
  out.maoii_hat = total_area / total_time;
  out.rate_hat = total_attempts / total_time;
  out.stderr_maoii = ratio_stderr(blocks, &Block::area);
  out.stderr_rate = ratio_stderr(blocks, &Block::attempts);
  return out;
}

}  // namespace aoii
