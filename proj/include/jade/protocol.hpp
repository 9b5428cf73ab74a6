#pragma once

// The per-node JADE state machine.
//
// A node's send probability is stored as an integer exponent k with
//   p_v = p_hat * (1 + gamma)^(-k),  k >= 0,
// so every multiplicative update is an exact integer step and p_v is only
// materialized as a double when a coin is flipped.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jade/errors.hpp"
#include "jade/rng.hpp"

namespace jade {

struct ProtocolParams {
  double p_hat = 1.0 / 24.0;
  double gamma = 0.1;
  std::uint32_t threshold_cap = 5;  // floor(2^(1/(4 gamma)))

  static constexpr double kMaxPHat = 1.0 / 24.0;
  static constexpr std::uint32_t kCapLimit = 1u << 30;

  static std::uint32_t cap_for(double gamma) {
    const double raw = std::floor(std::exp2(1.0 / (4.0 * gamma)));
    if (!(raw < static_cast<double>(kCapLimit))) return kCapLimit;
    return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(raw));
  }

  /// Builds validated params with the threshold cap derived from gamma.
  static ProtocolParams make(double p_hat = 1.0 / 24.0, double gamma = 0.1) {
    ProtocolParams p{p_hat, gamma, 1};
    p.validate_inputs();
    p.threshold_cap = cap_for(gamma);
    return p;
  }

  void validate() const {
    validate_inputs();
    if (threshold_cap < 1) throw ConfigError("protocol.threshold_cap must be >= 1");
  }

 private:
  void validate_inputs() const {
    if (!(p_hat > 0.0) || p_hat > kMaxPHat) {
      throw ConfigError("protocol.p_hat must satisfy 0 < p_hat <= 1/24");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("protocol.gamma must be > 0");
  }
};

struct NodeState {
  std::uint64_t k = 0;             // probability exponent
  std::uint32_t threshold = 1;     // T_v
  std::uint32_t counter = 1;       // c_v
  std::optional<Round> last_useful;  // last round with an idle sense or a reception
  std::optional<Round> last_applied;

  friend bool operator==(const NodeState&, const NodeState&) = default;
};

enum class ObservationKind : std::uint8_t {
  transmitted,
  sensed_idle,
  sensed_busy,
  received,
};

/// What a node experienced in one round. `sender` is meaningful only for
/// `received`.
struct Observation {
  ObservationKind kind = ObservationKind::sensed_busy;
  NodeId sender = 0;

  static constexpr Observation transmitted() { return {ObservationKind::transmitted, 0}; }
  static constexpr Observation idle() { return {ObservationKind::sensed_idle, 0}; }
  static constexpr Observation busy() { return {ObservationKind::sensed_busy, 0}; }
  static constexpr Observation received(NodeId from) { return {ObservationKind::received, from}; }

  friend bool operator==(const Observation& a, const Observation& b) {
    return a.kind == b.kind && (a.kind != ObservationKind::received || a.sender == b.sender);
  }
};

inline const char* to_string(ObservationKind k) {
  switch (k) {
    case ObservationKind::transmitted: return "transmit";
    case ObservationKind::sensed_idle: return "idle";
    case ObservationKind::sensed_busy: return "busy";
    case ObservationKind::received: return "receive";
  }
  return "?";
}

inline NodeState init_state(const ProtocolParams&) { return NodeState{}; }

/// p_hat * (1+gamma)^(-k). Clamped to the smallest positive double so the
/// probability stays strictly positive once the power underflows.
inline double probability_for(std::uint64_t k, const ProtocolParams& params) {
  const double p = params.p_hat * std::pow(1.0 + params.gamma, -static_cast<double>(k));
  return std::max(p, std::numeric_limits<double>::denorm_min());
}

inline double current_p(const NodeState& s, const ProtocolParams& params) {
  return probability_for(s.k, params);
}

/// Natural log of p_v; exact in k and free of underflow.
inline double log_p(const NodeState& s, const ProtocolParams& params) {
  return std::log(params.p_hat) - static_cast<double>(s.k) * std::log1p(params.gamma);
}

inline bool decide_transmit(const NodeState& s, const ProtocolParams& params, double coin) {
  return coin < current_p(s, params);
}

/// One round's update. Rounds must be applied in strictly increasing order.
inline NodeState apply_observation(NodeState s, Observation obs, Round round,
                                   const ProtocolParams& params) {
  if (s.last_applied && round <= *s.last_applied) {
    throw std::invalid_argument("apply_observation: round " + std::to_string(round) +
                                " is not after round " + std::to_string(*s.last_applied));
  }
  s.last_applied = round;

  switch (obs.kind) {
    case ObservationKind::sensed_idle:
      if (s.k > 0) --s.k;
      s.last_useful = round;
      break;
    case ObservationKind::received:
      ++s.k;
      s.threshold = std::max<std::uint32_t>(s.threshold, 2) - 1;
      s.last_useful = round;
      break;
    case ObservationKind::transmitted:
    case ObservationKind::sensed_busy:
      break;
  }

  ++s.counter;
  if (s.counter > s.threshold) {
    s.counter = 1;
    // Window: the T_v most recent rounds, this one included.
    const Round window_start = round - static_cast<Round>(s.threshold) + 1;
    if (!s.last_useful || *s.last_useful < window_start) {
      ++s.k;
      s.threshold = std::min(s.threshold + 1, params.threshold_cap);
    }
  }
  return s;
}

/// Memoized probability_for(k) for hot loops. Values are bit-identical to
/// probability_for because each entry is computed by it directly.
class ProbabilityTable {
 public:
  explicit ProbabilityTable(const ProtocolParams& params) : params_(params) { grow(64); }

  double operator()(std::uint64_t k) {
    if (k >= table_.size()) {
      // The power is monotone, so once it has bottomed out it stays there.
      if (table_.back() == std::numeric_limits<double>::denorm_min()) return table_.back();
      grow(static_cast<std::size_t>(k) + 1);
    }
    return table_[static_cast<std::size_t>(k)];
  }

 private:
  void grow(std::size_t min_size) {
    std::size_t target = std::max(min_size, table_.size() * 2);
    for (std::size_t k = table_.size(); k < target; ++k) table_.push_back(probability_for(k, params_));
  }

  ProtocolParams params_;
  std::vector<double> table_;
};

}  // namespace jade
