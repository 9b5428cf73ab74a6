#pragma once

// Measurements over completed traces: per-node interval counts, competitive
// throughput, disk and sector contention, subframe classification, and
// convergence series. Everything here is read-only over a Trace.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "jade/errors.hpp"
#include "jade/protocol.hpp"
#include "jade/topology.hpp"
#include "jade/trace.hpp"

namespace jade {

struct IntervalStats {
  Round begin = 0;
  Round end = 0;  // exclusive
  std::vector<NodeCounters> nodes;

  Round length() const noexcept { return end - begin; }

  std::uint64_t total_nonjammed() const {
    std::uint64_t t = 0;
    for (const auto& c : nodes) t += c.nonjammed;
    return t;
  }
  std::uint64_t total_received() const {
    std::uint64_t t = 0;
    for (const auto& c : nodes) t += c.received;
    return t;
  }
};

namespace detail {

inline const Checkpoint* find_checkpoint(const Trace& trace, Round r) {
  auto it = std::lower_bound(trace.checkpoints.begin(), trace.checkpoints.end(), r,
                             [](const Checkpoint& c, Round x) { return c.round < x; });
  return it != trace.checkpoints.end() && it->round == r ? &*it : nullptr;
}

inline const Snapshot* snapshot_at_or_before(const Trace& trace, Round r) {
  auto it = std::upper_bound(trace.snapshots.begin(), trace.snapshots.end(), r,
                             [](Round x, const Snapshot& s) { return x < s.round; });
  if (it == trace.snapshots.begin()) return nullptr;
  return &*std::prev(it);
}

}  // namespace detail

/// Exact per-node counts over rounds [begin, end). Answered from checkpoints
/// when both ends fall on one, otherwise from full per-round records.
inline IntervalStats interval_stats(const Trace& trace, Round begin, Round end) {
  if (begin < 0 || end > trace.rounds || begin > end) {
    throw std::out_of_range("interval [" + std::to_string(begin) + ", " + std::to_string(end) +
                            ") is outside the trace");
  }
  IntervalStats st;
  st.begin = begin;
  st.end = end;
  const std::size_t n = trace.nodes();
  st.nodes.assign(n, {});

  const Checkpoint* a = detail::find_checkpoint(trace, begin);
  const Checkpoint* b = detail::find_checkpoint(trace, end);
  if (a && b) {
    for (std::size_t v = 0; v < n; ++v) {
      st.nodes[v].nonjammed = b->counters[v].nonjammed - a->counters[v].nonjammed;
      st.nodes[v].received = b->counters[v].received - a->counters[v].received;
      st.nodes[v].open = b->counters[v].open - a->counters[v].open;
      st.nodes[v].jammed = b->counters[v].jammed - a->counters[v].jammed;
    }
    return st;
  }
  if (!trace.has_records()) {
    throw TraceError("interval [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") is not checkpoint-aligned and the trace has no per-round records");
  }
  for (Round r = begin; r < end; ++r) {
    const RoundOutcomeRecord& rec = trace.records[static_cast<std::size_t>(r)];
    for (NodeId v = 0; v < n; ++v) {
      NodeCounters& c = st.nodes[v];
      if (rec.jam[v]) {
        ++c.jammed;
        continue;
      }
      ++c.nonjammed;
      if (rec.observations[v].kind == ObservationKind::received) ++c.received;
      for (NodeId w : trace.topology.neighbors(v)) {
        if (!rec.jam[w]) {
          ++c.open;
          break;
        }
      }
    }
  }
  return st;
}

inline IntervalStats interval_stats(const Trace& trace) { return interval_stats(trace, 0, trace.rounds); }

/// sum s_v / sum f_v; absent when no node had a non-jammed round.
inline std::optional<double> competitiveness(const IntervalStats& stats) {
  const auto f = stats.total_nonjammed();
  if (f == 0) return std::nullopt;
  return static_cast<double>(stats.total_received()) / static_cast<double>(f);
}

/// Same ratio restricted to a subset of nodes.
inline std::optional<double> competitiveness(const IntervalStats& stats, std::span<const NodeId> subset) {
  std::uint64_t f = 0;
  std::uint64_t s = 0;
  for (NodeId v : subset) {
    f += stats.nodes.at(v).nonjammed;
    s += stats.nodes.at(v).received;
  }
  if (f == 0) return std::nullopt;
  return static_cast<double>(s) / static_cast<double>(f);
}

/// sum of p_v over D(u), from the latest snapshot at or before `round`.
inline double disk_contention(const Trace& trace, NodeId u, Round round) {
  trace.topology.check(u);
  const Snapshot* snap = detail::snapshot_at_or_before(trace, round);
  if (!snap) throw TraceError("no snapshot at or before round " + std::to_string(round));
  double sum = current_p(snap->states[u], trace.params());
  for (NodeId v : trace.topology.neighbors(u)) sum += current_p(snap->states[v], trace.params());
  return sum;
}

struct ThresholdSet {
  double green = 5.0;
  double yellow = 5.0 * std::numbers::e;
  double red = 5.0 * std::numbers::e * std::numbers::e;
};

struct SectorPoint {
  Round round = 0;
  double p_sum = 0.0;
};

/// p_S for sector `sector_id` of u at every snapshot.
inline std::vector<SectorPoint> sector_series(const Trace& trace, NodeId u, int sector_id) {
  auto members = trace.topology.sector(u, sector_id);
  std::vector<SectorPoint> out;
  out.reserve(trace.snapshots.size());
  for (const Snapshot& s : trace.snapshots) {
    double sum = 0.0;
    for (NodeId v : members) sum += current_p(s.states[v], trace.params());
    out.push_back({s.round, sum});
  }
  return out;
}

/// Analysis intervals: subframes of `subframe` rounds grouped into frames of
/// `subframes_per_frame` subframes.
struct FramePlan {
  Round subframe = 1;
  Round subframes_per_frame = 1;

  Round frame() const noexcept { return subframe * subframes_per_frame; }

  /// f = alpha [T + log^3 n / (gamma^2 eps)] rounded up to a multiple of T;
  /// alpha log n / eps subframes per frame (rounded up). log base 2.
  static FramePlan from_model(std::size_t n, std::uint32_t window, double epsilon, double gamma,
                              double alpha = 1.0) {
    const double lg = std::log2(static_cast<double>(std::max<std::size_t>(n, 2)));
    const double raw = alpha * (window + lg * lg * lg / (gamma * gamma * epsilon));
    const Round T = std::max<Round>(1, window);
    const Round f = std::max<Round>(T, static_cast<Round>(std::ceil(raw / T)) * T);
    const Round count = std::max<Round>(1, static_cast<Round>(std::ceil(alpha * lg / epsilon)));
    return FramePlan{f, count};
  }
};

/// One flag per complete subframe: true (good) when p_S <= rho_red at every
/// snapshot inside it. Exact at snapshot stride 1, otherwise evaluated only
/// at the snapshot rounds.
inline std::vector<bool> classify_subframes(const Trace& trace, const FramePlan& plan, NodeId u,
                                            int sector_id, const ThresholdSet& thresholds = {}) {
  if (plan.subframe < 1) throw std::invalid_argument("subframe length must be >= 1");
  if (trace.rounds < plan.subframe) {
    throw TraceError("trace of " + std::to_string(trace.rounds) + " rounds is shorter than a subframe of " +
                     std::to_string(plan.subframe));
  }
  const auto series = sector_series(trace, u, sector_id);
  const auto count = static_cast<std::size_t>(trace.rounds / plan.subframe);
  std::vector<bool> good(count, true);
  for (const auto& pt : series) {
    const auto idx = static_cast<std::size_t>(pt.round / plan.subframe);
    if (idx < count && pt.p_sum > thresholds.red) good[idx] = false;
  }
  return good;
}

struct ConvergenceRow {
  Round round = 0;
  double mean_p = 0.0;
  double mean_threshold = 0.0;
  std::uint32_t successes = 0;
  double mean_disk_p = 0.0;
};

/// One row per snapshot round inside the run.
inline std::vector<ConvergenceRow> convergence_summary(const Trace& trace) {
  std::vector<ConvergenceRow> rows;
  for (const Snapshot& s : trace.snapshots) {
    if (s.round >= trace.rounds) continue;
    const RoundAggregate& a = trace.per_round[static_cast<std::size_t>(s.round)];
    rows.push_back({s.round, a.mean_p, a.mean_threshold, a.successes, a.mean_disk_p});
  }
  return rows;
}

/// Mean of the per-round mean T_v over the final `fraction` of rounds.
inline double tail_mean_threshold(const Trace& trace, double fraction = 0.1) {
  const auto R = trace.per_round.size();
  if (R == 0) return 0.0;
  const auto tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(R * fraction)));
  double sum = 0.0;
  for (std::size_t r = R - tail; r < R; ++r) sum += trace.per_round[r].mean_threshold;
  return sum / static_cast<double>(tail);
}

/// First round whose mean p_v is below `level`, if any.
inline std::optional<Round> first_round_mean_p_below(const Trace& trace, double level) {
  for (std::size_t r = 0; r < trace.per_round.size(); ++r) {
    if (trace.per_round[r].mean_p < level) return static_cast<Round>(r);
  }
  return std::nullopt;
}

}  // namespace jade
