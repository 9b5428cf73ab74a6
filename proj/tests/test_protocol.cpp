#include <gtest/gtest.h>

#include <cmath>

#include "jade/protocol.hpp"
#include "jade/rng.hpp"

using namespace jade;

namespace {

const ProtocolParams kDefault = ProtocolParams::make();

}  // namespace

TEST(Params, Defaults) {
  EXPECT_DOUBLE_EQ(kDefault.p_hat, 1.0 / 24.0);
  EXPECT_DOUBLE_EQ(kDefault.gamma, 0.1);
  EXPECT_EQ(kDefault.threshold_cap, 5u);
  EXPECT_EQ(ProtocolParams::cap_for(1.0), 1u);
  EXPECT_EQ(ProtocolParams::cap_for(0.25), 2u);
}

TEST(Params, Rejected) {
  EXPECT_THROW(ProtocolParams::make(0.0, 0.1), ConfigError);
  EXPECT_THROW(ProtocolParams::make(0.05, 0.1), ConfigError);
  EXPECT_THROW(ProtocolParams::make(1.0 / 24.0, 0.0), ConfigError);
}

TEST(Init, StartsAtCap) {
  NodeState s = init_state(kDefault);
  EXPECT_EQ(s.k, 0u);
  EXPECT_EQ(s.threshold, 1u);
  EXPECT_EQ(s.counter, 1u);
  EXPECT_FALSE(s.last_useful.has_value());
  EXPECT_DOUBLE_EQ(current_p(s, kDefault), 1.0 / 24.0);
  auto small = ProtocolParams::make(0.01, 0.1);
  EXPECT_DOUBLE_EQ(current_p(init_state(small), small), 0.01);
}

TEST(CurrentP, Powers) {
  NodeState s;
  s.k = 1;
  EXPECT_NEAR(current_p(s, kDefault), 0.0378787878787879, 1e-15);
  s.k = 2;
  EXPECT_NEAR(current_p(s, kDefault), 0.0344352617079890, 1e-15);
}

TEST(Decide, Coins) {
  NodeState s;
  EXPECT_FALSE(decide_transmit(s, kDefault, 0.5));
  EXPECT_TRUE(decide_transmit(s, kDefault, 0.0));
  s.k = 100000;
  EXPECT_TRUE(decide_transmit(s, kDefault, 0.0));
}

TEST(Decide, FrequencyMatchesP) {
  NodeState s;
  Stream rng = derive_stream(42, StreamPurpose::transmit, 0);
  int hits = 0;
  const int draws = 1'000'000;
  for (int i = 0; i < draws; ++i) hits += decide_transmit(s, kDefault, rng.uniform()) ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(hits) / draws, 1.0 / 24.0, 0.002);
}

TEST(Apply, IdleClampsAtCap) {
  NodeState s = apply_observation(init_state(kDefault), Observation::idle(), 0, kDefault);
  EXPECT_EQ(s.k, 0u);
  EXPECT_EQ(s.threshold, 1u);
  EXPECT_EQ(s.counter, 1u);
  EXPECT_EQ(s.last_useful, Round{0});
}

TEST(Apply, ReceiveStepsDown) {
  NodeState s = apply_observation(init_state(kDefault), Observation::received(3), 0, kDefault);
  EXPECT_EQ(s.k, 1u);
  EXPECT_EQ(s.threshold, 1u);
  EXPECT_EQ(s.counter, 1u);
  EXPECT_EQ(s.last_useful, Round{0});
}

TEST(Apply, BusyTimeout) {
  NodeState s = apply_observation(init_state(kDefault), Observation::busy(), 0, kDefault);
  EXPECT_EQ(s.k, 1u);
  EXPECT_EQ(s.threshold, 2u);
  EXPECT_EQ(s.counter, 1u);
  s = apply_observation(s, Observation::busy(), 1, kDefault);
  EXPECT_EQ(s.k, 1u);
  EXPECT_EQ(s.threshold, 2u);
  EXPECT_EQ(s.counter, 2u);
}

TEST(Apply, TimeoutThenReceive) {
  NodeState s;
  s.threshold = 3;
  s.counter = 3;
  s = apply_observation(s, Observation::busy(), 10, kDefault);  // c = 4 > 3, no useful round
  EXPECT_EQ(s.k, 1u);
  EXPECT_EQ(s.threshold, 4u);
  EXPECT_EQ(s.counter, 1u);
  s = apply_observation(s, Observation::received(0), 11, kDefault);
  EXPECT_EQ(s.k, 2u);
  EXPECT_EQ(s.threshold, 3u);
  EXPECT_EQ(s.counter, 2u);
}

TEST(Apply, UsefulRoundInsideWindowAvoidsPenalty) {
  NodeState s;
  s.threshold = 3;
  s.counter = 2;
  s = apply_observation(s, Observation::idle(), 20, kDefault);
  s = apply_observation(s, Observation::busy(), 21, kDefault);  // c = 4 > 3, idle at 20 is in [19, 21]
  EXPECT_EQ(s.k, 0u);
  EXPECT_EQ(s.threshold, 3u);
  EXPECT_EQ(s.counter, 1u);
}

TEST(Apply, TransmitIsNotUseful) {
  NodeState s = apply_observation(init_state(kDefault), Observation::transmitted(), 0, kDefault);
  EXPECT_EQ(s.k, 1u);
  EXPECT_EQ(s.threshold, 2u);
}

TEST(Apply, OutOfOrderRoundRejected) {
  NodeState s = apply_observation(init_state(kDefault), Observation::busy(), 5, kDefault);
  EXPECT_THROW(apply_observation(s, Observation::busy(), 5, kDefault), std::invalid_argument);
  EXPECT_THROW(apply_observation(s, Observation::busy(), 4, kDefault), std::invalid_argument);
  EXPECT_NO_THROW(apply_observation(s, Observation::busy(), 6, kDefault));
}

TEST(Apply, RandomSequencesKeepInvariants) {
  for (double gamma : {0.05, 0.1, 0.3, 1.0}) {
    const auto params = ProtocolParams::make(1.0 / 24.0, gamma);
    Stream rng = derive_stream(gamma * 1000, StreamPurpose::sweep);
    NodeState s = init_state(params);
    for (Round r = 0; r < 20000; ++r) {
      const auto kind = static_cast<ObservationKind>(rng() % 4);
      const NodeState before = s;
      s = apply_observation(s, {kind, 0}, r, params);
      ASSERT_GE(s.threshold, 1u);
      ASSERT_LE(s.threshold, params.threshold_cap);
      ASSERT_GE(s.counter, 1u);
      ASSERT_LE(s.counter, s.threshold);
      const auto dk = static_cast<std::int64_t>(s.k) - static_cast<std::int64_t>(before.k);
      ASSERT_GE(dk, -1);
      ASSERT_LE(dk, 2);
      if (kind != ObservationKind::sensed_idle) {
        ASSERT_GE(dk, 0) << "only idle raises p";
      }
      if (kind != ObservationKind::received) {
        ASSERT_GE(s.threshold, before.threshold) << "only receive lowers T";
      }
    }
  }
}

TEST(Exponent, NoDrift) {
  const double log_base = std::log1p(kDefault.gamma);
  NodeState s;
  for (std::uint64_t k = 0; k <= 10000; ++k) {
    s.k = k;
    const double expected_log = std::log(kDefault.p_hat) - static_cast<double>(k) * log_base;
    ASSERT_NEAR(log_p(s, kDefault), expected_log, 1e-12 * std::max(1.0, std::abs(expected_log)));
    const double p = current_p(s, kDefault);
    ASSERT_GT(p, 0.0);
    ASSERT_LE(p, kDefault.p_hat);
    if (p > 1e-300) {
      ASSERT_NEAR(std::log(p), expected_log, 1e-9 * std::abs(expected_log)) << "k=" << k;
    }
  }
}

TEST(Exponent, RoundTripThroughUpdates) {
  NodeState s = init_state(kDefault);
  Round r = 0;
  for (int i = 0; i < 5000; ++i) s = apply_observation(s, Observation::received(1), r++, kDefault);
  ASSERT_EQ(s.k, 5000u);
  const long double expected = static_cast<long double>(kDefault.p_hat) * std::pow(1.1L, -5000.0L);
  EXPECT_NEAR(current_p(s, kDefault) / static_cast<double>(expected), 1.0, 1e-10);
  for (int i = 0; i < 5000; ++i) s = apply_observation(s, Observation::received(1), r++, kDefault);
  EXPECT_EQ(s.k, 10000u);
  for (int i = 0; i < 10000; ++i) s = apply_observation(s, Observation::idle(), r++, kDefault);
  EXPECT_EQ(s.k, 0u);
  EXPECT_EQ(current_p(s, kDefault), kDefault.p_hat);
}

TEST(Exponent, TableMatchesDirect) {
  ProbabilityTable table(kDefault);
  for (std::uint64_t k : {0ull, 1ull, 63ull, 64ull, 500ull, 7000ull, 10000ull, 1000000ull}) {
    EXPECT_EQ(table(k), probability_for(k, kDefault)) << "k=" << k;
  }
}
