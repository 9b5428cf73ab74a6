#pragma once

// Experiment configuration value types.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jade/errors.hpp"
#include "jade/jam.hpp"
#include "jade/protocol.hpp"
#include "jade/topology.hpp"

namespace jade {

enum class PlacementKind { uniform, gaussian, explicit_coords };

struct TopologySpec {
  PlacementKind kind = PlacementKind::uniform;
  std::size_t n = 500;
  double side = 4.0;                 // uniform: plane side length
  double sigma = 1.0;                // gaussian: per-axis standard deviation
  std::optional<Point> center;       // gaussian: defaults to the plane midpoint
  std::vector<Point> coords;         // explicit

  std::size_t node_count() const {
    return kind == PlacementKind::explicit_coords ? coords.size() : n;
  }

  Point gaussian_center() const { return center.value_or(Point{side / 2.0, side / 2.0}); }
};

inline Positions make_positions(const TopologySpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case PlacementKind::uniform: return place_uniform(spec.n, spec.side, seed);
    case PlacementKind::gaussian: return place_gaussian(spec.n, spec.sigma, spec.gaussian_center(), seed);
    case PlacementKind::explicit_coords: return place_explicit(spec.coords);
  }
  throw ConfigError("topology.kind: unknown placement");
}

enum class AdversaryKind { nojam, bernoulli, burst1u, split2u, lowdensity, greedy };

struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::bernoulli;
  AdversaryBudget budget;
  bool enforce = true;
  std::vector<NodeId> group;      // split2u / lowdensity: the clustered set U
  std::optional<NodeId> victim;   // split2u / lowdensity: the node v
  double min_receive_prob = 0.2;  // greedy: jam when P[receive] reaches this
};

enum class TraceDetail { metrics, full };

struct ExperimentConfig {
  std::string name = "experiment";
  TopologySpec topology;
  ProtocolParams protocol = ProtocolParams::make();
  AdversarySpec adversary;
  std::optional<std::int64_t> rounds;  // none: use default_round_count
  std::uint64_t seed = 1;
  std::uint32_t snapshot_stride = 100;
  TraceDetail detail = TraceDetail::metrics;
  bool adapt = true;      // false freezes every node at its initial state
  double frame_alpha = 1.0;

  void validate() const;
};

/// ceil([T + log^3 n / (gamma^2 eps)] * log n / eps) with log base 2.
inline std::int64_t default_round_count(std::size_t n, const AdversaryBudget& budget,
                                        double gamma) {
  const double lg = std::log2(static_cast<double>(std::max<std::size_t>(n, 2)));
  const double eps = budget.epsilon;
  const double inner = budget.window + lg * lg * lg / (gamma * gamma * eps);
  return static_cast<std::int64_t>(std::ceil(inner * lg / eps));
}

inline std::int64_t round_count(const ExperimentConfig& c) {
  return c.rounds.value_or(
      default_round_count(c.topology.node_count(), c.adversary.budget, c.protocol.gamma));
}

inline void ExperimentConfig::validate() const {
  protocol.validate();
  adversary.budget.validate();
  if (rounds && *rounds < 1) throw ConfigError("rounds must be >= 1");
  if (snapshot_stride < 1) throw ConfigError("snapshot_stride must be >= 1");
  if (!(frame_alpha > 0.0)) throw ConfigError("frame.alpha must be > 0");
  const std::size_t n = topology.node_count();
  if (n == 0) throw ConfigError("topology.n must be >= 1");
  if (topology.kind == PlacementKind::uniform && !(topology.side > 0.0)) {
    throw ConfigError("topology.side must be > 0");
  }
  if (topology.kind == PlacementKind::gaussian && !(topology.sigma > 0.0)) {
    throw ConfigError("topology.sigma must be > 0");
  }
  if (adversary.kind == AdversaryKind::split2u || adversary.kind == AdversaryKind::lowdensity) {
    if (adversary.group.empty()) throw ConfigError("adversary.params.U must be non-empty");
    if (!adversary.victim) throw ConfigError("adversary.params.v is required");
    for (NodeId u : adversary.group) {
      if (u >= n) throw ConfigError("adversary.params.U contains unknown node " + std::to_string(u));
      if (u == *adversary.victim) throw ConfigError("adversary.params: v must not be in U");
    }
    if (*adversary.victim >= n) throw ConfigError("adversary.params.v is not a node id");
  }
  if (adversary.kind == AdversaryKind::greedy &&
      !(adversary.min_receive_prob > 0.0 && adversary.min_receive_prob <= 1.0)) {
    throw ConfigError("adversary.params.min_receive_prob must be in (0, 1]");
  }
}

}  // namespace jade
