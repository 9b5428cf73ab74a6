#pragma once

// Append-only record of a simulation run.

#include <cstdint>
#include <vector>

#include "jade/experiment.hpp"
#include "jade/jam.hpp"
#include "jade/protocol.hpp"
#include "jade/topology.hpp"

namespace jade {

struct RoundOutcomeRecord {
  Round round = 0;
  std::vector<NodeId> transmitters;  // ascending
  JamMask jam;
  std::vector<Observation> observations;  // indexed by node id
};

/// Node states at the start of `round` (before that round's updates).
struct Snapshot {
  Round round = 0;
  std::vector<NodeState> states;
};

/// Per-node event counts, cumulative over rounds [0, round).
struct NodeCounters {
  std::uint32_t nonjammed = 0;  // f_v
  std::uint32_t received = 0;   // s_v
  std::uint32_t open = 0;       // o_v
  std::uint32_t jammed = 0;

  friend bool operator==(const NodeCounters&, const NodeCounters&) = default;
};

struct Checkpoint {
  Round round = 0;
  std::vector<NodeCounters> counters;
};

/// Network-wide aggregates for one round, taken from the states the round
/// started with.
struct RoundAggregate {
  double mean_p = 0.0;
  double mean_threshold = 0.0;
  double mean_disk_p = 0.0;     // mean over u of sum_{v in D(u)} p_v
  std::uint32_t successes = 0;  // receptions during the round
};

/// `records` is filled only at TraceDetail::full. Jam masks, checkpoints,
/// snapshots and per-round aggregates are kept at every detail level.
/// Checkpoints and snapshots exist at every multiple of the snapshot stride
/// and at the final round.
struct Trace {
  ExperimentConfig config;
  Topology topology;
  Round rounds = 0;
  std::vector<RoundOutcomeRecord> records;
  JamHistory jams;
  std::vector<Snapshot> snapshots;
  std::vector<Checkpoint> checkpoints;
  std::vector<RoundAggregate> per_round;

  std::size_t nodes() const noexcept { return topology.size(); }
  bool has_records() const noexcept { return static_cast<Round>(records.size()) == rounds; }
  const ProtocolParams& params() const noexcept { return config.protocol; }
};

}  // namespace jade
