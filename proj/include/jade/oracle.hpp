#pragma once

// Exact channel probabilities at a listening node u with neighbors sending
// independently with probabilities p_1..p_m:
//   q0 = P[no neighbor sends]       = prod (1 - p_i)
//   q1 = P[exactly one neighbor sends] = sum_i p_i prod_{j != i} (1 - p_j)
// and the bracket q0 * p <= q1 <= q0 * p / (1 - p_hat), p = sum p_i.

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jade/engine.hpp"
#include "jade/jam.hpp"
#include "jade/rng.hpp"
#include "jade/topology.hpp"

namespace jade {

struct ChannelProbabilities {
  double q0 = 1.0;
  double q1 = 0.0;
};

inline void validate_probabilities(std::span<const double> pv) {
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (!(pv[i] > 0.0 && pv[i] < 1.0)) {
      throw std::invalid_argument("probability " + std::to_string(i) + " is outside (0, 1)");
    }
  }
}

/// Closed form via prefix/suffix products; O(m), no division.
inline ChannelProbabilities exact_q0_q1(std::span<const double> pv) {
  validate_probabilities(pv);
  const std::size_t m = pv.size();
  std::vector<double> suffix(m + 1, 1.0);
  for (std::size_t i = m; i-- > 0;) suffix[i] = suffix[i + 1] * (1.0 - pv[i]);
  ChannelProbabilities out;
  out.q0 = suffix[0];
  double prefix = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    out.q1 += pv[i] * prefix * suffix[i + 1];
    prefix *= 1.0 - pv[i];
  }
  return out;
}

inline constexpr std::size_t kMaxEnumeration = 20;

/// Sums the probability of every one of the 2^m send patterns.
inline ChannelProbabilities enumerate_q0_q1(std::span<const double> pv) {
  validate_probabilities(pv);
  const std::size_t m = pv.size();
  if (m > kMaxEnumeration) throw std::invalid_argument("enumeration is capped at 20 entries");
  ChannelProbabilities out{0.0, 0.0};
  for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << m); ++pattern) {
    double prob = 1.0;
    for (std::size_t i = 0; i < m; ++i) prob *= (pattern >> i) & 1 ? pv[i] : 1.0 - pv[i];
    const int senders = std::popcount(pattern);
    if (senders == 0) out.q0 += prob;
    if (senders == 1) out.q1 += prob;
  }
  return out;
}

inline constexpr double kBracketSlack = 1e-12;

/// q0 p <= q1 <= q0 p / (1 - p_hat), within kBracketSlack. Requires every
/// p_i <= p_hat.
inline bool check_bracket(std::span<const double> pv, double p_hat) {
  if (!(p_hat > 0.0 && p_hat < 1.0)) throw std::invalid_argument("p_hat must be in (0, 1)");
  double p = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (pv[i] > p_hat) {
      throw std::invalid_argument("probability " + std::to_string(i) + " exceeds p_hat");
    }
    p += pv[i];
  }
  const auto [q0, q1] = exact_q0_q1(pv);
  return q0 * p <= q1 + kBracketSlack && q1 <= q0 * p / (1.0 - p_hat) + kBracketSlack;
}

struct DeviationReport {
  std::uint64_t trials = 0;
  ChannelProbabilities exact;
  ChannelProbabilities simulated;
  double q0_stderr = 0.0;  // binomial standard error at the exact value
  double q1_stderr = 0.0;

  double q0_z() const { return q0_stderr > 0 ? std::abs(simulated.q0 - exact.q0) / q0_stderr : 0.0; }
  double q1_z() const { return q1_stderr > 0 ? std::abs(simulated.q1 - exact.q1) / q1_stderr : 0.0; }

  bool within(double sigmas) const {
    return std::abs(simulated.q0 - exact.q0) <= sigmas * q0_stderr &&
           std::abs(simulated.q1 - exact.q1) <= sigmas * q1_stderr;
  }
};

/// Monte Carlo through the engine's own machinery: a star whose leaves send
/// with the given probabilities using the engine's transmit coins (trial i
/// plays the role of round i) and whose silent center is resolved with
/// resolve_round.
inline DeviationReport empirical_vs_exact(std::span<const double> pv, std::uint64_t trials,
                                          std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  DeviationReport rep;
  rep.trials = trials;
  rep.exact = exact_q0_q1(pv);

  const std::size_t m = pv.size();
  std::vector<Point> pts{{0.0, 0.0}};
  for (std::size_t i = 0; i < m; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(m, 1));
    pts.push_back({0.5 * std::cos(angle), 0.5 * std::sin(angle)});
  }
  const Topology star = build_udg(place_explicit(std::move(pts)));
  const JamMask clear(star.size());

  std::uint64_t idle = 0;
  std::uint64_t single = 0;
  std::vector<NodeId> senders;
  std::vector<Observation> obs;
  detail::ResolveScratch scratch;
  for (std::uint64_t t = 0; t < trials; ++t) {
    senders.clear();
    for (std::size_t i = 0; i < m; ++i) {
      const auto leaf = static_cast<NodeId>(i + 1);
      if (transmit_coin(seed, leaf, static_cast<Round>(t)) < pv[i]) senders.push_back(leaf);
    }
    detail::resolve_into(star, senders, clear, scratch, obs);
    if (obs[0].kind == ObservationKind::sensed_idle) ++idle;
    if (obs[0].kind == ObservationKind::received) ++single;
  }
  const double N = static_cast<double>(trials);
  rep.simulated = {static_cast<double>(idle) / N, static_cast<double>(single) / N};
  rep.q0_stderr = std::sqrt(rep.exact.q0 * (1.0 - rep.exact.q0) / N);
  rep.q1_stderr = std::sqrt(rep.exact.q1 * (1.0 - rep.exact.q1) / N);
  return rep;
}

}  // namespace jade
