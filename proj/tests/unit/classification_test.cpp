#include <gtest/gtest.h>

#include <algorithm>

#include "gazepriv/classification.hpp"
#include "gazepriv/synthetic.hpp"
#include "support/oracles.hpp"

using namespace gazepriv;

namespace {

// Moves `step` dva per sample along x for n samples starting at x0.
void ramp(std::vector<GazeSample>& out, double x0, double step, int n) {
  for (int i = 0; i < n; ++i) {
    out.push_back(GazeSample::at(double(out.size()), x0 + step * (i + 1), 0.0));
  }
}

void hold(std::vector<GazeSample>& out, double x, int n) {
  for (int i = 0; i < n; ++i) out.push_back(GazeSample::at(double(out.size()), x, 0.0));
}

}  // namespace

TEST(Velocity, FiniteDifferences) {
  EXPECT_EQ(velocity(std::vector<double>(5, 2.0), 1000.0), std::vector<double>(5, 0.0));
  std::vector<double> r;
  for (int i = 0; i < 10; ++i) r.push_back(0.001 * i);
  const auto v = velocity(r, 1000.0);
  EXPECT_EQ(v[0], 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_NEAR(v[i], 1.0, 1e-9);
  const auto step = velocity(std::vector<double>{0, 0, 1, 1}, 1000.0);
  EXPECT_EQ(step, (std::vector<double>{0, 0, 1000, 0}));
}

TEST(Idt, StationaryStreamIsOneFixation) {
  auto rec = gen::recording(gen::plateaus({{{2.0, -1.0, 500}}}));
  const auto c = idt_classify(rec);
  ASSERT_EQ(c.fixations.size(), 1u);
  EXPECT_EQ(c.fixations[0].start_index, 0u);
  EXPECT_EQ(c.fixations[0].end_index, 499u);
  EXPECT_EQ(c.fixations[0].centroid_x, 2.0);
  EXPECT_EQ(c.fixations[0].centroid_y, -1.0);
  EXPECT_EQ(std::count(c.labels.begin(), c.labels.end(), MovementLabel::kFixation), 500);
}

TEST(Idt, TwoClusters) {
  auto rec = gen::recording(gen::plateaus({{{0.0, 0.0, 200}, {5.0, 0.0, 200}}}));
  const auto c = idt_classify(rec);
  ASSERT_EQ(c.fixations.size(), 2u);
  EXPECT_EQ(c.fixations[0].centroid_x, 0.0);
  EXPECT_EQ(c.fixations[1].centroid_x, 5.0);
  EXPECT_EQ(c.fixations[1].onset_ms, 200.0);
}

TEST(Idt, ShortBurstRejected) {
  std::vector<GazeSample> s;
  ramp(s, -10.0, 0.6, 20);
  hold(s, s.back().x, 20);
  ramp(s, s.back().x, 0.6, 20);
  const auto c = idt_classify(gen::recording(s));
  EXPECT_TRUE(c.fixations.empty());
  EXPECT_EQ(c.labels.size(), s.size());
}

TEST(Idt, MinimumDurationBoundary) {
  for (int n : {31, 32, 33}) {
    std::vector<GazeSample> s;
    ramp(s, -10.0, 0.6, 10);
    // The last ramp sample already sits on the plateau.
    hold(s, s.back().x, n - 1);
    ramp(s, s.back().x, 0.6, 10);
    const auto c = idt_classify(gen::recording(s));
    EXPECT_EQ(c.fixations.size(), n >= 32 ? 1u : 0u) << n;
  }
}

TEST(Ikf, StationaryAfterWarmup) {
  auto rec = gen::recording(gen::plateaus({{{1.0, 1.0, 300}}}));
  const auto c = ikf_classify(rec);
  ASSERT_EQ(c.labels.size(), 300u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(c.labels[i], MovementLabel::kUnknown);
  for (std::size_t i = 4; i < 300; ++i) EXPECT_EQ(c.labels[i], MovementLabel::kFixation) << i;
}

TEST(Ikf, FastSegmentIsSaccade) {
  std::vector<GazeSample> s;
  hold(s, -5.0, 200);
  const std::size_t begin = s.size();
  ramp(s, -5.0, 0.3, 40);  // 300 deg/s
  const std::size_t end = s.size();
  hold(s, s.back().x, 200);
  const auto c = ikf_classify(gen::recording(s));
  for (std::size_t i = begin; i < end; ++i) EXPECT_EQ(c.labels[i], MovementLabel::kSaccade) << i;
  EXPECT_EQ(c.labels[begin - 1], MovementLabel::kFixation);
}

TEST(Ikf, Deterministic) {
  auto rec = synth::subject_recording(synth::SubjectProfile{}, {}, "1", "1");
  EXPECT_EQ(ikf_classify(rec).labels, ikf_classify(rec).labels);
}

namespace {

std::vector<GazeSample> mixed_stream(gen::Source& src, std::size_t n) {
  std::vector<GazeSample> s;
  double x = 0, y = 0;
  while (s.size() < n) {
    const int len = src.integer(5, 300);
    const bool moving = src.chance(0.3);
    const double jx = src.uniform(-8, 8), jy = src.uniform(-8, 8);
    for (int i = 0; i < len && s.size() < n; ++i) {
      if (moving) {
        x += jx / len;
        y += jy / len;
      }
      s.push_back(GazeSample::at(double(s.size()), x + src.normal(0.05), y + src.normal(0.05)));
    }
  }
  return s;
}

}  // namespace

TEST(ClassifierProperties, IdtSegmentsRespectBounds) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    gen::Source src(seed);
    IdtParams p;
    p.dispersion_threshold = src.uniform(0.2, 1.5);
    p.min_duration_ms = src.uniform(10, 120);
    const auto s = mixed_stream(src, 3000);
    const auto c = idt_classify(gen::recording(s), p);
    ASSERT_EQ(c.labels.size(), s.size());
    std::size_t prev_end = 0;
    bool first = true;
    for (const auto& f : c.fixations) {
      double x0 = 1e9, x1 = -1e9, y0 = 1e9, y1 = -1e9;
      for (std::size_t i = f.start_index; i <= f.end_index; ++i) {
        x0 = std::min(x0, s[i].x);
        x1 = std::max(x1, s[i].x);
        y0 = std::min(y0, s[i].y);
        y1 = std::max(y1, s[i].y);
        EXPECT_EQ(c.labels[i], MovementLabel::kFixation);
      }
      EXPECT_LE((x1 - x0) + (y1 - y0), p.dispersion_threshold + 1e-12);
      EXPECT_GE(f.duration_ms, p.min_duration_ms - 1e-9);
      if (!first) {
        EXPECT_GT(f.start_index, prev_end);
      }
      prev_end = f.end_index;
      first = false;
    }
  }
}

TEST(ClassifierProperties, PrefixLabelsAreFinal) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    gen::Source src(seed);
    const auto s = mixed_stream(src, 2000);
    IdtClassifier idt({}, 1000.0);
    IkfClassifier ikf({}, 1000.0);
    std::vector<MovementLabel> idt_seen, ikf_seen;
    std::size_t idt_fix = 0;
    for (const auto& g : s) {
      idt.push(g.t_ms, g.x, g.y);
      ikf.push(g.t_ms, g.x, g.y);
      // Whatever was emitted earlier is still there, unchanged.
      ASSERT_GE(idt.labels().size(), idt_seen.size());
      EXPECT_TRUE(std::equal(idt_seen.begin(), idt_seen.end(), idt.labels().begin()));
      ASSERT_GE(idt.fixations().size(), idt_fix);
      idt_seen = idt.labels();
      idt_fix = idt.fixations().size();
      EXPECT_TRUE(std::equal(ikf_seen.begin(), ikf_seen.end(), ikf.labels().begin()));
      ikf_seen = ikf.labels();
      EXPECT_EQ(ikf.labels().size(), idt.pushed());
    }
    idt.finish();
    EXPECT_EQ(idt.labels().size(), s.size());
    EXPECT_TRUE(std::equal(idt_seen.begin(), idt_seen.end(), idt.labels().begin()));
  }
}
