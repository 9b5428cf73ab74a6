#pragma once

// Node placement, unit disk graphs, and the six-sector partition of a disk.
// Distances are normalized so the transmission radius is 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jade/errors.hpp"
#include "jade/rng.hpp"

namespace jade {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Finite, non-empty list of node coordinates. Node ids are indices.
class Positions {
 public:
  Positions() = default;

  explicit Positions(std::vector<Point> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw ConfigError("positions: at least one node is required");
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (!std::isfinite(coords_[i].x) || !std::isfinite(coords_[i].y)) {
        throw ConfigError("positions: node " + std::to_string(i) + " has a non-finite coordinate");
      }
    }
  }

  std::size_t size() const noexcept { return coords_.size(); }
  const Point& operator[](NodeId id) const { return coords_[id]; }
  std::span<const Point> coords() const noexcept { return coords_; }
  auto begin() const noexcept { return coords_.begin(); }
  auto end() const noexcept { return coords_.end(); }

  friend bool operator==(const Positions&, const Positions&) = default;

 private:
  std::vector<Point> coords_;
};

inline Positions place_uniform(std::size_t n, double side, std::uint64_t seed) {
  if (n == 0) throw ConfigError("topology.n must be >= 1");
  if (!(side > 0.0) || !std::isfinite(side)) throw ConfigError("topology.side must be > 0");
  Stream rng = derive_stream(seed, StreamPurpose::placement);
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.x = rng.uniform() * side;
    p.y = rng.uniform() * side;
  }
  return Positions{std::move(pts)};
}

/// Isotropic Gaussian placement. Points are not clipped to any plane.
inline Positions place_gaussian(std::size_t n, double sigma, Point center, std::uint64_t seed) {
  if (n == 0) throw ConfigError("topology.n must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("topology.sigma must be > 0");
  Stream rng = derive_stream(seed, StreamPurpose::placement);
  std::normal_distribution<double> nx(center.x, sigma);
  std::normal_distribution<double> ny(center.y, sigma);
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.x = nx(rng);
    p.y = ny(rng);
  }
  return Positions{std::move(pts)};
}

inline Positions place_explicit(std::vector<Point> coords) { return Positions{std::move(coords)}; }

inline double squared_distance(Point a, Point b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline constexpr int kSectors = 6;

/// Unit disk graph over a set of positions, with each node's neighbors
/// additionally bucketed into six 60-degree sectors.
class Topology {
 public:
  Topology() = default;

  const Positions& positions() const noexcept { return positions_; }
  std::size_t size() const noexcept { return positions_.size(); }

  /// N(u): sorted ascending.
  std::span<const NodeId> neighbors(NodeId u) const {
    check(u);
    return adjacency_[u];
  }

  std::size_t degree(NodeId u) const { return neighbors(u).size(); }

  bool adjacent(NodeId u, NodeId w) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), w);
  }

  /// Neighbors of u lying in the given sector, sorted ascending.
  std::span<const NodeId> sector(NodeId u, int sector_id) const {
    check(u);
    if (sector_id < 0 || sector_id >= kSectors) {
      throw std::out_of_range("sector id " + std::to_string(sector_id) + " outside [0,6)");
    }
    return sectors_[u][static_cast<std::size_t>(sector_id)];
  }

  void check(NodeId u) const {
    if (u >= adjacency_.size()) throw std::out_of_range("unknown node id " + std::to_string(u));
  }

 private:
  friend Topology build_udg(Positions positions);

  Positions positions_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<std::array<std::vector<NodeId>, kSectors>> sectors_;
};

/// Sector of the direction u->w: floor of the angle in [0, 360) over 60 degrees.
inline int sector_of_direction(Point from, Point to) noexcept {
  double angle = std::atan2(to.y - from.y, to.x - from.x);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  const int s = static_cast<int>(std::floor(angle / (std::numbers::pi / 3.0)));
  return std::clamp(s, 0, kSectors - 1);
}

inline Topology build_udg(Positions positions) {
  Topology t;
  const std::size_t n = positions.size();
  t.adjacency_.assign(n, {});
  t.sectors_.assign(n, {});
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t w = u + 1; w < n; ++w) {
      if (squared_distance(positions[NodeId(u)], positions[NodeId(w)]) <= 1.0) {
        t.adjacency_[u].push_back(NodeId(w));
        t.adjacency_[w].push_back(NodeId(u));
      }
    }
  }
  // Pushes happen in increasing id order from both sides, so lists are sorted.
  for (std::size_t u = 0; u < n; ++u) {
    for (NodeId w : t.adjacency_[u]) {
      const int s = sector_of_direction(positions[NodeId(u)], positions[w]);
      t.sectors_[u][static_cast<std::size_t>(s)].push_back(w);
    }
  }
  t.positions_ = std::move(positions);
  return t;
}

/// D(u) = N(u) plus u, sorted ascending.
inline std::vector<NodeId> disk(const Topology& t, NodeId u) {
  auto nb = t.neighbors(u);
  std::vector<NodeId> d(nb.begin(), nb.end());
  d.insert(std::upper_bound(d.begin(), d.end(), u), u);
  return d;
}

inline int sector_of(const Topology& t, NodeId u, NodeId w) {
  if (!t.adjacent(u, w)) {
    throw std::invalid_argument("node " + std::to_string(w) + " is not a neighbor of " +
                                std::to_string(u));
  }
  return sector_of_direction(t.positions()[u], t.positions()[w]);
}

struct RegimeReport {
  bool connected = false;
  std::size_t min_disk = 0;    // min over v of |D(v)|
  double required_disk = 0.0;  // 2 / epsilon
  bool density_ok = false;
};

/// Checks the two sufficient conditions under which constant competitiveness
/// is expected: a connected graph, and |D(v)| >= 2/epsilon everywhere.
inline RegimeReport validate_regime(const Topology& t, double epsilon) {
  RegimeReport r;
  const std::size_t n = t.size();
  r.required_disk = 2.0 / epsilon;
  if (n == 0) return r;

  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId w : t.neighbors(u)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  r.connected = reached == n;

  r.min_disk = n + 1;
  for (NodeId u = 0; u < n; ++u) r.min_disk = std::min(r.min_disk, t.degree(u) + 1);
  r.density_ok = static_cast<double>(r.min_disk) >= r.required_disk;
  return r;
}

}  // namespace jade
