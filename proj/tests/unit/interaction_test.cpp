#include <gtest/gtest.h>

#include <algorithm>

#include "gazepriv/error.hpp"
#include "gazepriv/interaction.hpp"
#include "gazepriv/signal.hpp"
#include "gazepriv/synthetic.hpp"
#include "support/oracles.hpp"

using namespace gazepriv;

namespace {

Recording with_targets(std::size_t n, std::vector<double> onsets) {
  auto rec = gen::recording(gen::plateaus({{{0, 0, static_cast<double>(n)}}}));
  for (std::size_t k = 0; k < onsets.size(); ++k) {
    rec.targets.push_back({onsets[k], 0.0, 0.0, static_cast<int>(k)});
  }
  return rec;
}

FixationSegment fixation(double cx, double cy, double onset, double duration, std::size_t start = 0) {
  FixationSegment f;
  f.centroid_x = cx;
  f.centroid_y = cy;
  f.onset_ms = onset;
  f.duration_ms = duration;
  f.start_index = start;
  f.end_index = start + static_cast<std::size_t>(duration) - 1;
  return f;
}

TargetWindow window_at(double x, double y, double start = 0, double end = 1000) {
  TargetWindow w;
  w.target = {start, x, y, 0};
  w.start_ms = start;
  w.end_ms = end;
  return w;
}

}  // namespace

TEST(Segment, TwoTargets) {
  const auto w = segment_by_target(with_targets(2500, {0, 1500}));
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[0].sample_count, 1000u);
  EXPECT_EQ(w[1].first_sample, 1500u);
  EXPECT_EQ(w[1].sample_count, 1000u);
  const auto cut = segment_by_target(with_targets(2200, {0, 1500}));
  EXPECT_EQ(cut[1].sample_count, 700u);
}

TEST(Segment, SingleTarget) {
  const auto w = segment_by_target(with_targets(800, {0}));
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].sample_count, 800u);
}

TEST(Segment, TruncatedByNextOnset) {
  const auto w = segment_by_target(with_targets(3000, {0, 600}));
  EXPECT_EQ(w[0].sample_count, 600u);
  EXPECT_EQ(w[0].end_ms, 600.0);
}

TEST(Segment, NoTargetsThrows) {
  try {
    segment_by_target(with_targets(10, {}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoTargets);
  }
}

TEST(Rank1Fixation, OnTarget) {
  std::vector<FixationSegment> f{fixation(3, 4, 200, 150)};
  const auto o = rank1_fixation(f, window_at(3, 4));
  EXPECT_TRUE(o.valid);
  EXPECT_EQ(*o.offset_dva, 0.0);
}

TEST(Rank1Fixation, ClosestWins) {
  std::vector<FixationSegment> f{fixation(2.0, 0, 100, 200, 100), fixation(0.4, 0, 400, 200, 400)};
  const auto o = rank1_fixation(f, window_at(0, 0));
  EXPECT_EQ(*o.trigger_x, 0.4);
  EXPECT_EQ(o.fixation_count, 2u);
}

TEST(Rank1Fixation, ShortDwellIsInvalid) {
  std::vector<FixationSegment> f{fixation(0, 0, 100, 80)};
  const auto o = rank1_fixation(f, window_at(0, 0));
  EXPECT_FALSE(o.valid);
  EXPECT_FALSE(o.offset_dva.has_value());
}

TEST(Rank1Fixation, OnsetOutsideWindowIgnored) {
  std::vector<FixationSegment> f{fixation(0, 0, 1000, 300), fixation(0, 0, -50, 300)};
  EXPECT_FALSE(rank1_fixation(f, window_at(0, 0)).valid);
}

TEST(Rank1Fixation, OrderInvariant) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    gen::Source src(seed);
    std::vector<FixationSegment> f;
    const int n = src.integer(1, 12);
    for (int i = 0; i < n; ++i) {
      // Coarse grid so that ties happen.
      f.push_back(fixation(src.integer(-2, 2) * 0.5, src.integer(-2, 2) * 0.5,
                           src.integer(0, 9) * 100.0, src.integer(0, 3) * 60.0, i * 1000));
    }
    const auto w = window_at(0, 0);
    const auto a = rank1_fixation(f, w);
    std::shuffle(f.begin(), f.end(), src.engine());
    const auto b = rank1_fixation(f, w);
    EXPECT_EQ(a.valid, b.valid);
    EXPECT_EQ(a.trigger_x, b.trigger_x);
    EXPECT_EQ(a.trigger_y, b.trigger_y);
  }
}

TEST(AngularOffset, Examples) {
  EXPECT_EQ(angular_offset(3, -2, 3, -2), 0.0);
  EXPECT_NEAR(angular_offset(1, 0, 0, 0), 1.0, 1e-6);
  EXPECT_DOUBLE_EQ(angular_offset(1, 2, -3, 4), angular_offset(-3, 4, 1, 2));
}

TEST(AngularOffset, MatchesArccosForm) {
  gen::Source src(17);
  for (int i = 0; i < 1000; ++i) {
    const double gx = src.uniform(-23, 23), gy = src.uniform(-18, 11);
    const double tx = src.uniform(-23, 23), ty = src.uniform(-18, 11);
    EXPECT_NEAR(angular_offset(gx, gy, tx, ty), oracle::angle_deg(gx, gy, tx, ty), 1e-6);
  }
}

TEST(SuccessRate, Counting) {
  std::vector<InteractionOutcome> o(100);
  EXPECT_EQ(success_rate(o, 100), 0.0);
  for (int i = 0; i < 97; ++i) o[i].valid = true;
  EXPECT_DOUBLE_EQ(success_rate(o, 100), 97.0);
  for (auto& x : o) x.valid = true;
  EXPECT_DOUBLE_EQ(success_rate(o, 100), 100.0);
}

TEST(SuccessRate, Monotone) {
  gen::Source src(5);
  std::vector<InteractionOutcome> o(100);
  double last = success_rate(o, 100);
  for (int step = 0; step < 300; ++step) {
    o[static_cast<std::size_t>(src.integer(0, 99))].valid = true;
    const double now = success_rate(o, 100);
    EXPECT_GE(now, last);
    last = now;
  }
}

TEST(Summary, Examples) {
  auto one = summarize_accuracy({{"a", {1, 2, 3}}});
  EXPECT_EQ(one.per_user_e50["a"], 2.0);
  EXPECT_EQ(one.u95_e95, one.per_user_e95["a"]);
  auto three = summarize_accuracy({{"a", {0.5}}, {"b", {0.6}}, {"c", {0.7}}});
  EXPECT_DOUBLE_EQ(three.u50_e50, 0.6);
  auto skip = summarize_accuracy({{"a", {1.0}}, {"b", {}}});
  EXPECT_EQ(skip.excluded_users, std::vector<std::string>{"b"});
  EXPECT_THROW(summarize_accuracy({{"a", {}}}), Error);
}

TEST(Summary, PercentileMatchesOracle) {
  gen::Source src(23);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(static_cast<std::size_t>(src.integer(1, 40)));
    for (auto& x : v) x = src.uniform(0, 10);
    const double p = src.uniform(0, 100);
    EXPECT_NEAR(percentile(v, p), oracle::percentile(v, p), 1e-12);
  }
}

TEST(Simulation, IdentityOnTeleportData) {
  const auto rec = preprocess(synth::ran_teleport({}));
  const auto cls = idt_classify(rec);
  const auto out = simulate_interactions(rec, cls);
  ASSERT_EQ(out.size(), 100u);
  EXPECT_EQ(success_rate(out, 100), 100.0);
  std::vector<double> offsets;
  for (const auto& o : out) offsets.push_back(*o.offset_dva);
  EXPECT_LE(summarize_accuracy({{"1", offsets}}).u50_e50, 1e-9);
}
