#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "jade/engine.hpp"
#include "jade/metrics.hpp"

using namespace jade;

namespace {

ExperimentConfig cfg(AdversaryKind kind, std::vector<Point> pts, Round rounds) {
  ExperimentConfig c;
  c.topology.kind = PlacementKind::explicit_coords;
  c.topology.coords = std::move(pts);
  c.adversary.kind = kind;
  c.rounds = rounds;
  return c;
}

std::vector<Point> cluster(std::size_t n, double radius = 0.3) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    pts.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return pts;
}

/// Jammed everywhere except round 0 of each 1000-round interval.
Trace all_jam_trace(Round rounds) {
  auto c = cfg(AdversaryKind::burst1u, cluster(4), rounds);
  c.adversary.budget = {1000, 0.001};  // clear_rounds = 1
  c.adversary.enforce = false;
  c.detail = TraceDetail::full;
  return run(c);
}

}  // namespace

TEST(Interval, NoJamCountsEveryRound) {
  auto c = cfg(AdversaryKind::nojam, cluster(5), 500);
  const Trace t = run(c);
  const auto st = interval_stats(t);
  for (const auto& n : st.nodes) {
    EXPECT_EQ(n.nonjammed, 500u);
    EXPECT_EQ(n.jammed, 0u);
    EXPECT_EQ(n.open, 500u);
  }
}

TEST(Interval, AllJammed) {
  const Trace t = all_jam_trace(1000);
  const auto st = interval_stats(t, 1, 1000);
  for (const auto& n : st.nodes) {
    EXPECT_EQ(n.nonjammed, 0u);
    EXPECT_EQ(n.received, 0u);
  }
  EXPECT_FALSE(competitiveness(st).has_value());
}

TEST(Interval, IsolatedNodeHasNoOpenRounds) {
  auto c = cfg(AdversaryKind::nojam, {{0, 0}, {0.5, 0}, {9, 9}}, 300);
  const auto st = interval_stats(run(c));
  EXPECT_EQ(st.nodes[2].nonjammed, 300u);
  EXPECT_EQ(st.nodes[2].open, 0u);
  EXPECT_EQ(st.nodes[2].received, 0u);
}

TEST(Interval, CheckpointsAgreeWithRecords) {
  ExperimentConfig c;
  c.topology.n = 50;
  c.topology.side = 2.0;
  c.rounds = 1000;
  c.snapshot_stride = 100;
  c.detail = TraceDetail::full;
  const Trace t = run(c);
  // Aligned intervals are answered from checkpoints, unaligned ones from
  // records; splitting an aligned interval at an unaligned point must agree.
  const auto whole = interval_stats(t, 200, 700);
  const auto left = interval_stats(t, 200, 437);
  const auto right = interval_stats(t, 437, 700);
  for (NodeId v = 0; v < t.nodes(); ++v) {
    EXPECT_EQ(whole.nodes[v].nonjammed, left.nodes[v].nonjammed + right.nodes[v].nonjammed);
    EXPECT_EQ(whole.nodes[v].received, left.nodes[v].received + right.nodes[v].received);
    EXPECT_EQ(whole.nodes[v].open, left.nodes[v].open + right.nodes[v].open);
    EXPECT_EQ(whole.nodes[v].jammed, left.nodes[v].jammed + right.nodes[v].jammed);
  }
}

TEST(Interval, ReceivedMatchesObservations) {
  ExperimentConfig c;
  c.topology.n = 30;
  c.topology.side = 2.0;
  c.rounds = 777;
  c.detail = TraceDetail::full;
  const Trace t = run(c);
  const auto st = interval_stats(t);
  for (NodeId v = 0; v < t.nodes(); ++v) {
    std::uint32_t s = 0;
    for (const auto& rec : t.records) s += rec.observations[v].kind == ObservationKind::received ? 1 : 0;
    EXPECT_EQ(st.nodes[v].received, s);
    EXPECT_EQ(st.nodes[v].nonjammed + st.nodes[v].jammed, 777u);
    EXPECT_LE(st.nodes[v].received, st.nodes[v].nonjammed);
    EXPECT_LE(st.nodes[v].open, st.nodes[v].nonjammed);
  }
}

TEST(Interval, Errors) {
  auto c = cfg(AdversaryKind::nojam, cluster(3), 250);
  const Trace t = run(c);
  EXPECT_THROW(interval_stats(t, 0, 251), std::out_of_range);
  EXPECT_THROW(interval_stats(t, 10, 5), std::out_of_range);
  EXPECT_THROW(interval_stats(t, 3, 50), TraceError);
  EXPECT_NO_THROW(interval_stats(t, 100, 250));
}

TEST(Competitiveness, Extremes) {
  IntervalStats st;
  st.nodes = {{10, 10, 10, 0}, {4, 4, 4, 0}};
  EXPECT_DOUBLE_EQ(*competitiveness(st), 1.0);
  st.nodes = {{10, 0, 10, 0}, {4, 0, 4, 0}};
  EXPECT_DOUBLE_EQ(*competitiveness(st), 0.0);
  st.nodes = {{0, 0, 0, 5}};
  EXPECT_FALSE(competitiveness(st).has_value());
}

TEST(Competitiveness, SubsetAndRelabeling) {
  IntervalStats st;
  st.nodes = {{10, 2, 10, 0}, {20, 8, 20, 0}, {5, 0, 5, 0}};
  const std::vector<NodeId> subset{1, 2};
  EXPECT_DOUBLE_EQ(*competitiveness(st, subset), 8.0 / 25.0);
  IntervalStats perm = st;
  std::reverse(perm.nodes.begin(), perm.nodes.end());
  EXPECT_DOUBLE_EQ(*competitiveness(st), *competitiveness(perm));
}

TEST(Contention, InitialSums) {
  auto lone = run(cfg(AdversaryKind::nojam, {{0, 0}}, 5));
  EXPECT_DOUBLE_EQ(disk_contention(lone, 0, 0), 1.0 / 24.0);
  auto clique = run(cfg(AdversaryKind::nojam, cluster(9), 5));
  EXPECT_NEAR(disk_contention(clique, 3, 0), 9.0 / 24.0, 1e-15);
  EXPECT_THROW(disk_contention(clique, 42, 0), std::out_of_range);
}

TEST(Contention, NoSnapshotBeforeStart) {
  auto t = run(cfg(AdversaryKind::nojam, {{0, 0}}, 5));
  EXPECT_THROW(disk_contention(t, 0, -1), TraceError);
}

TEST(Sectors, EmptyAndSingle) {
  auto c = cfg(AdversaryKind::nojam, {{0, 0}, {0.5, 0}}, 20);
  const Trace t = run(c);
  for (const auto& pt : sector_series(t, 0, 3)) EXPECT_EQ(pt.p_sum, 0.0);
  EXPECT_DOUBLE_EQ(sector_series(t, 0, 0).front().p_sum, 1.0 / 24.0);
}

TEST(Sectors, CrowdedSector) {
  std::vector<Point> pts{{0, 0}};
  for (int i = 0; i < 240; ++i) pts.push_back({0.5 + 0.001 * i, 0.1});
  auto c = cfg(AdversaryKind::nojam, pts, 1);
  const Trace t = run(c);
  const double p0 = sector_series(t, 0, 0).front().p_sum;
  EXPECT_NEAR(p0, 10.0, 1e-12);
  const ThresholdSet th;
  EXPECT_GT(p0, th.green);
  EXPECT_LT(p0, th.yellow);
  // Good means p_S <= rho_red, and 10 is well under 5e^2.
  const auto flags = classify_subframes(t, FramePlan{1, 1}, 0, 0);
  ASSERT_EQ(flags.size(), 1u);
  EXPECT_TRUE(flags[0]);
}

TEST(Sectors, SectorAboveRedIsBad) {
  std::vector<Point> pts{{0, 0}};
  for (int i = 0; i < 1000; ++i) pts.push_back({0.5 + 0.0002 * i, 0.1});
  const Trace t = run(cfg(AdversaryKind::nojam, pts, 1));
  EXPECT_GT(sector_series(t, 0, 0).front().p_sum, ThresholdSet{}.red);
  EXPECT_FALSE(classify_subframes(t, FramePlan{1, 1}, 0, 0)[0]);
}

TEST(Sectors, Thresholds) {
  ThresholdSet th;
  EXPECT_DOUBLE_EQ(th.green, 5.0);
  EXPECT_NEAR(th.yellow, 13.591409142295225, 1e-12);
  EXPECT_NEAR(th.red, 36.945280494653254, 1e-12);
  EXPECT_LT(th.green, th.yellow);
  EXPECT_LT(th.yellow, th.red);
}

TEST(Subframes, SparseSectorAlwaysGood) {
  ExperimentConfig c;
  c.topology.n = 120;
  c.topology.side = 1.5;
  c.rounds = 2000;
  c.snapshot_stride = 1;
  const Trace t = run(c);
  for (int s = 0; s < kSectors; ++s) {
    ASSERT_LE(t.topology.sector(0, s).size(), 120u);
    const auto flags = classify_subframes(t, FramePlan{100, 4}, 0, s);
    EXPECT_EQ(flags.size(), 20u);
    EXPECT_TRUE(std::all_of(flags.begin(), flags.end(), [](bool g) { return g; }));
  }
}

TEST(Subframes, TooShortTrace) {
  auto t = run(cfg(AdversaryKind::nojam, cluster(3), 50));
  EXPECT_THROW(classify_subframes(t, FramePlan{100, 1}, 0, 0), TraceError);
}

TEST(Subframes, PlanFromModel) {
  const auto plan = FramePlan::from_model(500, 200, 0.3, 0.1, 1.0);
  const double lg = std::log2(500.0);
  const double raw = 200 + lg * lg * lg / (0.01 * 0.3);
  EXPECT_EQ(plan.subframe % 200, 0);
  EXPECT_GE(plan.subframe, raw);
  EXPECT_LT(plan.subframe, raw + 200);
  EXPECT_EQ(plan.subframes_per_frame, static_cast<Round>(std::ceil(lg / 0.3)));
  EXPECT_EQ(plan.frame() % plan.subframe, 0);
}

TEST(Convergence, RoundZero) {
  ExperimentConfig c;
  c.topology.n = 40;
  c.topology.side = 2.0;
  c.rounds = 300;
  c.snapshot_stride = 50;
  const Trace t = run(c);
  const auto rows = convergence_summary(t);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].round, 0);
  EXPECT_DOUBLE_EQ(rows[0].mean_p, 1.0 / 24.0);
  EXPECT_DOUBLE_EQ(rows[0].mean_threshold, 1.0);
  for (const auto& r : rows) EXPECT_EQ(r.successes, t.per_round[static_cast<std::size_t>(r.round)].successes);
}

TEST(Convergence, TailAndStartup) {
  Trace t;
  t.per_round.resize(20);
  for (std::size_t r = 0; r < 20; ++r) {
    t.per_round[r].mean_threshold = static_cast<double>(r);
    t.per_round[r].mean_p = 1.0 / static_cast<double>(r + 1);
  }
  EXPECT_DOUBLE_EQ(tail_mean_threshold(t, 0.1), 18.5);
  EXPECT_EQ(first_round_mean_p_below(t, 0.3), Round{3});
  EXPECT_FALSE(first_round_mean_p_below(t, 0.01).has_value());
}
