#pragma once

// The synchronous round loop.
//
// Each round: the adversary picks a jam mask from history (optionally passed
// through the budget enforcer), every node flips its transmit coin, the
// channel is resolved per node, and every node applies its observation.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jade/adversary.hpp"
#include "jade/experiment.hpp"
#include "jade/jam.hpp"
#include "jade/protocol.hpp"
#include "jade/rng.hpp"
#include "jade/topology.hpp"
#include "jade/trace.hpp"

namespace jade {

namespace detail {

struct ResolveScratch {
  std::vector<std::uint32_t> heard;  // transmitting neighbors per node
  std::vector<NodeId> from;          // the last one seen
  std::vector<char> sending;
};

inline void resolve_into(const Topology& t, std::span<const NodeId> transmitters, const JamMask& jam,
                         ResolveScratch& s, std::vector<Observation>& out) {
  const std::size_t n = t.size();
  s.heard.assign(n, 0);
  s.from.resize(n);
  s.sending.assign(n, 0);
  out.resize(n);
  for (NodeId x : transmitters) {
    if (x >= n) throw std::out_of_range("transmitter " + std::to_string(x) + " is not a node");
    s.sending[x] = 1;
    for (NodeId w : t.neighbors(x)) {
      ++s.heard[w];
      s.from[w] = x;
    }
  }
  for (NodeId u = 0; u < n; ++u) {
    if (s.sending[u]) {
      out[u] = Observation::transmitted();
    } else if (jam[u] || s.heard[u] >= 2) {
      out[u] = Observation::busy();
    } else if (s.heard[u] == 1) {
      out[u] = Observation::received(s.from[u]);
    } else {
      out[u] = Observation::idle();
    }
  }
}

}  // namespace detail

/// Channel outcome at every node for one round.
inline std::vector<Observation> resolve_round(const Topology& t, std::span<const NodeId> transmitters,
                                              const JamMask& jam) {
  if (jam.size() != t.size()) throw std::invalid_argument("jam mask size does not match topology");
  detail::ResolveScratch scratch;
  std::vector<Observation> out;
  detail::resolve_into(t, transmitters, jam, scratch, out);
  return out;
}

/// Runs a full experiment. Deterministic in the config (including its seed).
class Simulation {
 public:
  explicit Simulation(ExperimentConfig config) : config_(std::move(config)) {
    config_.validate();
    total_ = round_count(config_);
    trace_.config = config_;
    trace_.rounds = total_;
    trace_.topology = build_udg(make_positions(config_.topology, config_.seed));
    const std::size_t n = trace_.topology.size();
    strategy_ = make_strategy(config_.adversary);
    if (config_.adversary.enforce) enforcer_.emplace(n, config_.adversary.budget);
    states_.assign(n, init_state(config_.protocol));
    trace_.jams = JamHistory(n);
    cumulative_.assign(n, {});
    disk_weight_.resize(n);
    p_now_.resize(n);
    coin_prefix_.resize(n);
    for (NodeId v = 0; v < n; ++v) {
      coin_prefix_[v] = node_key_prefix(config_.seed, StreamPurpose::transmit, v);
    }
    for (NodeId v = 0; v < n; ++v) disk_weight_[v] = static_cast<double>(trace_.topology.degree(v) + 1);
    if (config_.detail == TraceDetail::full) trace_.records.reserve(static_cast<std::size_t>(total_));
    trace_.per_round.reserve(static_cast<std::size_t>(total_));
  }

  /// Executes all remaining rounds and hands back the trace.
  Trace run() && {
    while (round_ < total_) step();
    checkpoint();
    return std::move(trace_);
  }

 private:
  void checkpoint() {
    trace_.snapshots.push_back(Snapshot{round_, states_});
    trace_.checkpoints.push_back(Checkpoint{round_, cumulative_});
  }

  void step() {
    const Topology& topo = trace_.topology;
    const ProtocolParams& params = config_.protocol;
    const std::size_t n = topo.size();
    const Round t = round_;

    if (t % config_.snapshot_stride == 0) checkpoint();

    RoundAggregate agg;
    for (NodeId v = 0; v < n; ++v) {
      const double p = table_(states_[v].k);
      p_now_[v] = p;
      agg.mean_p += p;
      agg.mean_threshold += states_[v].threshold;
      agg.mean_disk_p += p * disk_weight_[v];
    }
    agg.mean_p /= static_cast<double>(n);
    agg.mean_threshold /= static_cast<double>(n);
    agg.mean_disk_p /= static_cast<double>(n);

    const HistoryView view{t, topo, params, states_, t > 0 ? &last_ : nullptr, trace_.jams};
    Stream adv = derive_stream(config_.seed, StreamPurpose::adversary, std::nullopt, t);
    JamMask jam = strategy_->decide(view, adv);
    if (enforcer_) jam = enforcer_->apply(jam);

    last_.round = t;
    last_.transmitters.clear();
    for (NodeId v = 0; v < n; ++v) {
      // Same value as transmit_coin(seed, v, t), with the node prefix cached.
      const double coin = Stream{key_with_round(coin_prefix_[v], t)}.uniform();
      if (coin < p_now_[v]) last_.transmitters.push_back(v);
    }
    detail::resolve_into(topo, last_.transmitters, jam, scratch_, last_.observations);

    for (NodeId v = 0; v < n; ++v) {
      NodeCounters& c = cumulative_[v];
      const Observation obs = last_.observations[v];
      if (jam[v]) {
        ++c.jammed;
      } else {
        ++c.nonjammed;
        for (NodeId w : topo.neighbors(v)) {
          if (!jam[w]) {
            ++c.open;
            break;
          }
        }
      }
      if (obs.kind == ObservationKind::received) {
        ++c.received;
        ++agg.successes;
      }
      if (config_.adapt) states_[v] = apply_observation(states_[v], obs, t, params);
    }

    trace_.per_round.push_back(agg);
    trace_.jams.push(jam);
    last_.jam = std::move(jam);
    if (config_.detail == TraceDetail::full) trace_.records.push_back(last_);
    ++round_;
  }

  ExperimentConfig config_;
  Round total_ = 0;
  Round round_ = 0;
  Trace trace_;
  std::unique_ptr<Strategy> strategy_;
  std::optional<BudgetEnforcer> enforcer_;
  std::vector<NodeState> states_;
  std::vector<NodeCounters> cumulative_;
  std::vector<double> disk_weight_;
  std::vector<double> p_now_;
  std::vector<std::uint64_t> coin_prefix_;
  ProbabilityTable table_{config_.protocol};
  RoundOutcomeRecord last_;
  detail::ResolveScratch scratch_;
};

inline Trace run(const ExperimentConfig& config) { return Simulation(config).run(); }

}  // namespace jade
