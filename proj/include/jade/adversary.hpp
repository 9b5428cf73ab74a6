#pragma once

// Jamming strategies, the budget enforcer, and the post-hoc budget audit.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jade/experiment.hpp"
#include "jade/jam.hpp"
#include "jade/protocol.hpp"
#include "jade/rng.hpp"
#include "jade/topology.hpp"
#include "jade/trace.hpp"

namespace jade {

/// Everything that happened before `round`. Round `round`'s transmit
/// decisions are not part of the view.
struct HistoryView {
  Round round = 0;
  const Topology& topology;
  const ProtocolParams& params;
  std::span<const NodeState> states;         // states at the start of `round`
  const RoundOutcomeRecord* previous = nullptr;  // round - 1, if any
  const JamHistory& jams;                    // rounds [0, round)
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string_view name() const = 0;
  virtual JamMask decide(const HistoryView& view, Stream& rng) = 0;
};

class NoJam final : public Strategy {
 public:
  std::string_view name() const override { return "nojam"; }
  JamMask decide(const HistoryView& view, Stream&) override { return JamMask(view.topology.size()); }
};

/// Each node independently jammed with probability 1 - epsilon.
class BernoulliJam final : public Strategy {
 public:
  explicit BernoulliJam(double jam_probability) : q_(jam_probability) {}
  std::string_view name() const override { return "bernoulli"; }

  JamMask decide(const HistoryView& view, Stream& rng) override {
    const std::size_t n = view.topology.size();
    JamMask m(n);
    for (NodeId v = 0; v < n; ++v) {
      if (rng.uniform() < q_) m.set(v);
    }
    return m;
  }

 private:
  double q_;
};

/// 1-uniform periodic burst: within every T-interval the first
/// T - floor((1-eps)T) rounds are clear and the rest jam every node.
class Burst1Uniform final : public Strategy {
 public:
  explicit Burst1Uniform(AdversaryBudget b) : budget_(b) {}
  std::string_view name() const override { return "burst1u"; }

  JamMask decide(const HistoryView& view, Stream&) override {
    const auto pos = static_cast<std::uint32_t>(view.round % budget_.window);
    if (pos < budget_.clear_rounds()) return JamMask(view.topology.size());
    return JamMask::all(view.topology.size());
  }

 private:
  AdversaryBudget budget_;
};

/// Two-group periodic attack on a cluster U and a node v.
///
/// split: U is clear only in the first clear_rounds() of each T-interval and
/// v only in the last clear_rounds(), so U's probabilities have collapsed by
/// the time v can listen.
/// low density: U as above, v never jammed.
class GroupAttack final : public Strategy {
 public:
  enum class Mode { split, low_density };

  GroupAttack(Mode mode, AdversaryBudget b, std::vector<NodeId> group, NodeId victim)
      : mode_(mode), budget_(b), group_(std::move(group)), victim_(victim) {
    if (group_.empty()) throw ConfigError("group attack: U must be non-empty");
    if (std::find(group_.begin(), group_.end(), victim_) != group_.end()) {
      throw ConfigError("group attack: v must not be in U");
    }
  }

  std::string_view name() const override { return mode_ == Mode::split ? "split2u" : "lowdensity"; }

  JamMask decide(const HistoryView& view, Stream&) override {
    const std::uint32_t T = budget_.window;
    const std::uint32_t clear = budget_.clear_rounds();
    const auto pos = static_cast<std::uint32_t>(view.round % T);
    JamMask m(view.topology.size());
    if (pos >= clear) {
      for (NodeId u : group_) m.set(u);
    }
    if (mode_ == Mode::split && pos < T - clear) m.set(victim_);
    return m;
  }

  std::span<const NodeId> group() const noexcept { return group_; }
  NodeId victim() const noexcept { return victim_; }

 private:
  Mode mode_;
  AdversaryBudget budget_;
  std::vector<NodeId> group_;
  NodeId victim_;
};

/// Adaptive: jams every node whose chance of receiving a message this round,
/// computed exactly from the nodes' current send probabilities, is at least
/// the configured level.
class GreedyJam final : public Strategy {
 public:
  explicit GreedyJam(double min_receive_prob) : threshold_(min_receive_prob) {}
  std::string_view name() const override { return "greedy"; }

  JamMask decide(const HistoryView& view, Stream&) override {
    const std::size_t n = view.topology.size();
    p_.resize(n);
    for (NodeId v = 0; v < n; ++v) p_[v] = current_p(view.states[v], view.params);
    JamMask m(n);
    for (NodeId u = 0; u < n; ++u) {
      // q1 = q0 * sum p/(1-p); valid since p <= 1/24 < 1.
      double q0 = 1.0;
      double odds = 0.0;
      for (NodeId w : view.topology.neighbors(u)) {
        q0 *= 1.0 - p_[w];
        odds += p_[w] / (1.0 - p_[w]);
      }
      if ((1.0 - p_[u]) * q0 * odds >= threshold_) m.set(u);
    }
    return m;
  }

 private:
  double threshold_;
  std::vector<double> p_;
};

inline std::unique_ptr<Strategy> make_strategy(const AdversarySpec& spec) {
  switch (spec.kind) {
    case AdversaryKind::nojam: return std::make_unique<NoJam>();
    case AdversaryKind::bernoulli: return std::make_unique<BernoulliJam>(1.0 - spec.budget.epsilon);
    case AdversaryKind::burst1u: return std::make_unique<Burst1Uniform>(spec.budget);
    case AdversaryKind::split2u:
    case AdversaryKind::lowdensity: {
      if (!spec.victim) throw ConfigError("adversary.params.v is required");
      const auto mode = spec.kind == AdversaryKind::split2u ? GroupAttack::Mode::split
                                                            : GroupAttack::Mode::low_density;
      return std::make_unique<GroupAttack>(mode, spec.budget, spec.group, *spec.victim);
    }
    case AdversaryKind::greedy: return std::make_unique<GreedyJam>(spec.min_receive_prob);
  }
  throw ConfigError("adversary.kind: unknown strategy");
}

/// Reference enforcement computed directly from the jam history: clears v's
/// bit if jamming it would put more than floor((1-eps)T) jammed rounds in
/// the window of T rounds ending at `round`. O(T n) per call.
inline JamMask enforce(const AdversaryBudget& budget, const JamMask& proposed,
                       const HistoryView& view, Round round) {
  JamMask out = proposed;
  const Round first = std::max<Round>(0, round - static_cast<Round>(budget.window) + 1);
  const std::uint32_t allowance = budget.allowance();
  for (NodeId v = 0; v < proposed.size(); ++v) {
    if (!proposed[v]) continue;
    std::uint32_t jammed = 0;
    for (Round r = first; r < round; ++r) jammed += view.jams.jammed(r, v) ? 1 : 0;
    if (jammed + 1 > allowance) out.set(v, false);
  }
  return out;
}

/// Streaming form of enforce(): keeps each node's last T decisions in a ring,
/// so each call is O(n). Must see every round exactly once, in order.
class BudgetEnforcer {
 public:
  BudgetEnforcer(std::size_t n, AdversaryBudget budget)
      : n_(n), budget_(budget), allowance_(budget.allowance()), ring_(n * budget.window, 0),
        count_(n, 0) {
    budget_.validate();
  }

  JamMask apply(const JamMask& proposed) {
    const std::size_t T = budget_.window;
    const std::size_t pos = static_cast<std::size_t>(round_ % static_cast<Round>(T));
    JamMask out(n_);
    for (NodeId v = 0; v < n_; ++v) {
      std::uint8_t& slot = ring_[v * T + pos];
      // The slot holds round - T, which has just left the window.
      const std::uint32_t prev = count_[v] - slot;
      const bool jam = proposed[v] && prev + 1 <= allowance_;
      slot = jam ? 1 : 0;
      count_[v] = prev + slot;
      if (jam) out.set(v);
    }
    ++round_;
    return out;
  }

 private:
  std::size_t n_;
  AdversaryBudget budget_;
  std::uint32_t allowance_;
  std::vector<std::uint8_t> ring_;
  std::vector<std::uint32_t> count_;
  Round round_ = 0;
};

struct NodeAudit {
  std::uint32_t worst_window_jams = 0;
  double worst_window_fraction = 0.0;
  std::uint32_t nonjammed = 0;
  std::uint32_t open = 0;
  double open_fraction = 0.0;  // open / nonjammed; 0 when never non-jammed
};

struct AuditReport {
  AdversaryBudget budget;
  std::uint32_t allowance = 0;
  Round rounds = 0;
  std::vector<NodeAudit> nodes;
  std::vector<NodeId> violators;
  double max_jam_fraction = 0.0;
  double min_open_fraction = 1.0;  // over nodes with at least one non-jammed round

  bool ok() const noexcept { return violators.empty(); }
};

/// Sliding-window audit over windows of T rounds. Windows that start before
/// round 0 are counted over the rounds that exist, matching the enforcer.
inline AuditReport audit(const JamHistory& jams, const Topology& topology,
                         const AdversaryBudget& budget) {
  budget.validate();
  if (jams.nodes() != topology.size()) throw TraceError("audit: jam history and topology disagree on n");
  AuditReport rep;
  rep.budget = budget;
  rep.allowance = budget.allowance();
  rep.rounds = static_cast<Round>(jams.rounds());
  const std::size_t n = topology.size();
  const Round R = rep.rounds;
  const Round T = budget.window;
  rep.nodes.assign(n, {});

  for (NodeId v = 0; v < n; ++v) {
    NodeAudit& a = rep.nodes[v];
    std::uint32_t window = 0;
    for (Round r = 0; r < R; ++r) {
      const bool jammed = jams.jammed(r, v);
      window += jammed ? 1 : 0;
      if (r >= T) window -= jams.jammed(r - T, v) ? 1 : 0;
      a.worst_window_jams = std::max(a.worst_window_jams, window);
      if (!jammed) {
        ++a.nonjammed;
        for (NodeId w : topology.neighbors(v)) {
          if (!jams.jammed(r, w)) {
            ++a.open;
            break;
          }
        }
      }
    }
    a.worst_window_fraction = static_cast<double>(a.worst_window_jams) / static_cast<double>(T);
    a.open_fraction = a.nonjammed ? static_cast<double>(a.open) / a.nonjammed : 0.0;
    if (a.worst_window_jams > rep.allowance) rep.violators.push_back(v);
    rep.max_jam_fraction = std::max(rep.max_jam_fraction, a.worst_window_fraction);
    if (a.nonjammed) rep.min_open_fraction = std::min(rep.min_open_fraction, a.open_fraction);
  }
  return rep;
}

inline AuditReport audit(const Trace& trace, const AdversaryBudget& budget) {
  return audit(trace.jams, trace.topology, budget);
}

}  // namespace jade
