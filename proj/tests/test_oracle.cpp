#include <gtest/gtest.h>

#include "jade/oracle.hpp"

using namespace jade;

namespace {

std::vector<double> random_vector(Stream& rng, std::size_t max_len, double cap) {
  const std::size_t m = 1 + rng() % max_len;
  std::vector<double> pv(m);
  // (0, cap]: 1 - uniform() is in (0, 1].
  for (auto& p : pv) p = cap * (1.0 - rng.uniform());
  return pv;
}

}  // namespace

TEST(Exact, SingleNode) {
  const std::vector<double> pv{0.5};
  const auto q = exact_q0_q1(pv);
  EXPECT_DOUBLE_EQ(q.q0, 0.5);
  EXPECT_DOUBLE_EQ(q.q1, 0.5);
}

TEST(Exact, TwoAtCap) {
  const std::vector<double> pv{1.0 / 24.0, 1.0 / 24.0};
  const auto q = exact_q0_q1(pv);
  EXPECT_NEAR(q.q0, 0.918403, 1e-6);
  EXPECT_NEAR(q.q1, 0.079861, 1e-6);
  EXPECT_NEAR(q.q0, (23.0 / 24.0) * (23.0 / 24.0), 1e-15);
  EXPECT_NEAR(q.q1, 2.0 * (1.0 / 24.0) * (23.0 / 24.0), 1e-15);
}

TEST(Exact, Empty) {
  const auto q = exact_q0_q1({});
  EXPECT_EQ(q.q0, 1.0);
  EXPECT_EQ(q.q1, 0.0);
}

TEST(Exact, RejectsOutOfRange) {
  const std::vector<double> zero{0.0};
  const std::vector<double> one{0.2, 1.0};
  EXPECT_THROW(exact_q0_q1(zero), std::invalid_argument);
  EXPECT_THROW(exact_q0_q1(one), std::invalid_argument);
}

TEST(Exact, MatchesEnumeration) {
  Stream rng(101);
  for (int i = 0; i < 300; ++i) {
    const auto pv = random_vector(rng, 16, 0.9);
    const auto a = exact_q0_q1(pv);
    const auto b = enumerate_q0_q1(pv);
    ASSERT_NEAR(a.q0, b.q0, 1e-12);
    ASSERT_NEAR(a.q1, b.q1, 1e-12);
    ASSERT_LE(a.q0 + a.q1, 1.0 + 1e-12);
    if (pv.size() == 1) {
      ASSERT_NEAR(a.q0 + a.q1, 1.0, 1e-12);
    }
  }
  const std::vector<double> big(21, 0.1);
  EXPECT_THROW(enumerate_q0_q1(big), std::invalid_argument);
}

TEST(Bracket, EqualityCases) {
  const double p_hat = 1.0 / 24.0;
  const std::vector<double> two{p_hat, p_hat};
  EXPECT_TRUE(check_bracket(two, p_hat));
  const auto q = exact_q0_q1(two);
  EXPECT_NEAR(q.q1, q.q0 * (2 * p_hat) / (1 - p_hat), 1e-15);

  const std::vector<double> one{p_hat};
  EXPECT_TRUE(check_bracket(one, p_hat));
  const auto q1 = exact_q0_q1(one);
  EXPECT_NEAR(q1.q1, q1.q0 * p_hat / (1 - p_hat), 1e-15);
}

TEST(Bracket, RandomVectors) {
  Stream rng(202);
  for (int i = 0; i < 10000; ++i) {
    const auto pv = random_vector(rng, 20, 1.0 / 24.0);
    ASSERT_TRUE(check_bracket(pv, 1.0 / 24.0)) << "vector " << i;
  }
}

TEST(Bracket, Precondition) {
  const std::vector<double> pv{0.01, 0.2};
  EXPECT_THROW(check_bracket(pv, 1.0 / 24.0), std::invalid_argument);
}

TEST(MonteCarlo, TwoAtCap) {
  const std::vector<double> pv{1.0 / 24.0, 1.0 / 24.0};
  const auto rep = empirical_vs_exact(pv, 1'000'000, 7);
  EXPECT_TRUE(rep.within(3.0)) << "z0=" << rep.q0_z() << " z1=" << rep.q1_z();
}

TEST(MonteCarlo, MixedVector) {
  const std::vector<double> pv{0.01, 0.03, 0.2, 0.05, 0.4};
  const auto rep = empirical_vs_exact(pv, 200'000, 8);
  EXPECT_TRUE(rep.within(3.0)) << "z0=" << rep.q0_z() << " z1=" << rep.q1_z();
}

TEST(MonteCarlo, SingleTrial) {
  const std::vector<double> pv{0.3};
  const auto rep = empirical_vs_exact(pv, 1, 1);
  EXPECT_EQ(rep.trials, 1u);
  EXPECT_TRUE(rep.simulated.q0 == 0.0 || rep.simulated.q0 == 1.0);
  EXPECT_GT(rep.q0_stderr, 0.4);
  EXPECT_THROW(empirical_vs_exact(pv, 0, 1), std::invalid_argument);
}

TEST(MonteCarlo, EmptyVector) {
  const auto rep = empirical_vs_exact({}, 100, 1);
  EXPECT_EQ(rep.simulated.q0, 1.0);
  EXPECT_EQ(rep.simulated.q1, 0.0);
  EXPECT_TRUE(rep.within(3.0));
}
