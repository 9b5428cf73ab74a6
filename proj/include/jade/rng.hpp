#pragma once

// Counter-based random streams.
//
// Every random quantity in a simulation is keyed by (master seed, purpose,
// node, round), so the value a node draws in a given round never depends on
// the order in which other nodes or rounds were processed.

#include <cstdint>
#include <limits>
#include <optional>

namespace jade {

using NodeId = std::uint32_t;
using Round = std::int64_t;

enum class StreamPurpose : std::uint64_t {
  transmit = 1,
  placement = 2,
  adversary = 3,
  sweep = 4,
};

namespace detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// A reproducible 64-bit stream (SplitMix64). Satisfies
/// UniformRandomBitGenerator so it can drive <random> distributions.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Stream(std::uint64_t key) noexcept : state_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  constexpr double uniform() noexcept { return detail::to_unit((*this)()); }

 private:
  std::uint64_t state_;
};

/// Key material for (seed, purpose, node), shared by all of that node's rounds.
constexpr std::uint64_t node_key_prefix(std::uint64_t master_seed, StreamPurpose purpose,
                                        std::optional<NodeId> node = std::nullopt) noexcept {
  std::uint64_t h = detail::mix64(master_seed);
  h = detail::mix64(h ^ static_cast<std::uint64_t>(purpose));
  // 0 encodes "none"; real ids are shifted by one.
  return detail::mix64(h ^ (node ? static_cast<std::uint64_t>(*node) + 1 : 0));
}

constexpr std::uint64_t key_with_round(std::uint64_t prefix, std::optional<Round> round) noexcept {
  return detail::mix64(prefix ^ (round ? static_cast<std::uint64_t>(*round) + 1 : 0));
}

constexpr std::uint64_t stream_key(std::uint64_t master_seed, StreamPurpose purpose,
                                   std::optional<NodeId> node = std::nullopt,
                                   std::optional<Round> round = std::nullopt) noexcept {
  return key_with_round(node_key_prefix(master_seed, purpose, node), round);
}

constexpr Stream derive_stream(std::uint64_t master_seed, StreamPurpose purpose,
                               std::optional<NodeId> node = std::nullopt,
                               std::optional<Round> round = std::nullopt) noexcept {
  return Stream{stream_key(master_seed, purpose, node, round)};
}

/// The transmit coin of `node` at `round`: the first draw of its stream.
constexpr double transmit_coin(std::uint64_t master_seed, NodeId node, Round round) noexcept {
  return derive_stream(master_seed, StreamPurpose::transmit, node, round).uniform();
}

}  // namespace jade
