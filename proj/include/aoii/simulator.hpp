#pragma once

#include <cstdint>
#include <vector>

#include "aoii/optimizer.hpp"

namespace aoii {

struct SimConfig {
  std::uint64_t cycles = 100000;
  std::uint64_t seed = 1;
  Policy policy;
  Generator source;
  Channel channel;
  Eigen::Index initial_state = 0;  ///< synchronization value of the first cycle
};

struct SimResult {
  double maoii_hat = 0;
  double rate_hat = 0;
  double stderr_maoii = 0;  ///< NaN when fewer than two regeneration blocks completed
  double stderr_rate = 0;
  std::uint64_t cycle_count = 0;
  std::uint64_t blocks = 0;           ///< completed regeneration blocks
  double max_area_discrepancy = 0;    ///< piecewise vs closed-form area audit
};

/// One completed cycle: synchronized at `value`, next synchronized at `next`.
struct CycleRecord {
  std::uint64_t index;
  Eigen::Index value;
  Eigen::Index next;
  double duration;
  double out_of_sync;
  double area;
  int transmissions;
};

enum class EventKind { Desync, Jump, Start, Sample, Completion, Resync };

struct SimEvent {
  double time;
  EventKind kind;
  Eigen::Index source;
  Eigen::Index estimate;
  double age;
};

/// Optional per-cycle records and (when `events` is set) the full event log.
struct SimTrace {
  bool events_enabled = false;
  std::vector<CycleRecord> cycles;
  std::vector<SimEvent> events;
};

/**
 * Event-driven simulation of the source, the monitor estimate and AoII under
 * a policy. Deterministic given the seed. Estimators are regenerative ratio
 * estimators; standard errors use the delta method over blocks delimited by
 * returns to the initial synchronization value.
 */
SimResult simulate(const SimConfig& cfg, SimTrace* trace = nullptr);

}  // namespace aoii
