#pragma once

// Jamming budget and per-round jam masks.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jade/errors.hpp"
#include "jade/rng.hpp"

namespace jade {

/// A (T, 1-epsilon)-bounded adversary: in every window of T rounds each node
/// may be jammed in at most floor((1-epsilon) T) of them.
struct AdversaryBudget {
  std::uint32_t window = 200;  // T
  double epsilon = 0.3;

  void validate() const {
    if (window < 1) throw ConfigError("adversary.budget.T must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
      throw ConfigError("adversary.budget.epsilon must satisfy 0 < epsilon < 1");
    }
  }

  /// floor((1-epsilon) T). The tiny bias absorbs representation error such
  /// as 0.7 * 200 evaluating just below 140.
  std::uint32_t allowance() const {
    return static_cast<std::uint32_t>(std::floor((1.0 - epsilon) * window + 1e-9));
  }

  /// Rounds per T-interval that a full-allowance periodic pattern leaves clear.
  std::uint32_t clear_rounds() const { return window - allowance(); }
};

class JamMask {
 public:
  JamMask() = default;
  explicit JamMask(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static JamMask all(std::size_t n) {
    JamMask m(n);
    for (std::size_t i = 0; i < n; ++i) m.set(NodeId(i));
    return m;
  }

  std::size_t size() const noexcept { return n_; }

  bool test(NodeId v) const { return (words_[v >> 6] >> (v & 63)) & 1u; }
  bool operator[](NodeId v) const { return test(v); }

  void set(NodeId v, bool jammed = true) {
    const std::uint64_t bit = std::uint64_t{1} << (v & 63);
    if (jammed) {
      words_[v >> 6] |= bit;
    } else {
      words_[v >> 6] &= ~bit;
    }
  }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const JamMask&, const JamMask&) = default;

 private:
  friend class JamHistory;
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Packed, contiguous record of every round's jam mask.
class JamHistory {
 public:
  JamHistory() = default;
  explicit JamHistory(std::size_t n) : n_(n), stride_((n + 63) / 64) {}

  std::size_t nodes() const noexcept { return n_; }
  std::size_t rounds() const noexcept { return rounds_; }

  void push(const JamMask& m) {
    if (m.size() != n_) throw std::invalid_argument("jam mask size does not match node count");
    bits_.insert(bits_.end(), m.words_.begin(), m.words_.end());
    ++rounds_;
  }

  bool jammed(Round r, NodeId v) const {
    return (bits_[static_cast<std::size_t>(r) * stride_ + (v >> 6)] >> (v & 63)) & 1u;
  }

  JamMask mask(Round r) const {
    JamMask m(n_);
    auto first = bits_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(r) * stride_);
    std::copy(first, first + static_cast<std::ptrdiff_t>(stride_), m.words_.begin());
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::size_t stride_ = 0;
  std::size_t rounds_ = 0;
  std::vector<std::uint64_t> bits_;
};

}  // namespace jade
