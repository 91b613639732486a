#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>

#include "gazepriv/error.hpp"
#include "gazepriv/fir.hpp"
#include "gazepriv/kalman.hpp"
#include "gazepriv/privatizers.hpp"
#include "support/oracles.hpp"

using namespace gazepriv;

namespace {

std::vector<GazeSample> from_x(const std::vector<double>& xs) {
  std::vector<GazeSample> s;
  for (std::size_t i = 0; i < xs.size(); ++i) s.push_back(GazeSample::at(double(i), xs[i], -xs[i]));
  return s;
}

std::vector<double> out_x(Privatizer& op, const std::vector<GazeSample>& in) {
  std::vector<double> xs;
  for (const auto& s : in) {
    if (auto o = op.push(s)) xs.push_back(o->x);
  }
  return xs;
}

// A fresh instance of each deterministic operator under test.
std::vector<std::pair<std::string, std::function<std::unique_ptr<Privatizer>()>>> smoothers() {
  return {
      {"median3", [] { return std::make_unique<Median3Filter>(); }},
      {"lwma7", [] { return std::make_unique<LwmaSmoother>(7); }},
      {"lwma50", [] { return std::make_unique<LwmaSmoother>(50); }},
      {"fir25/49", [] { return std::make_unique<FirFilter>(25.0, 49, 1000.0); }},
      {"kalman", [] { return std::make_unique<KalmanSmoother>(1000.0); }},
  };
}

}  // namespace

// Median

TEST(Median3, ConstantStream) {
  Median3Filter op;
  for (double v : out_x(op, from_x(std::vector<double>(20, 4.25)))) EXPECT_EQ(v, 4.25);
}

TEST(Median3, PadsWithFirstSample) {
  Median3Filter op;
  EXPECT_EQ(out_x(op, from_x({1, 5, 2})), (std::vector<double>{1, 1, 2}));
}

TEST(Median3, RemovesSpike) {
  Median3Filter op;
  EXPECT_EQ(out_x(op, from_x({0, 0, 9, 0, 0})), (std::vector<double>(5, 0.0)));
}

TEST(Median3, MatchesBruteForce) {
  gen::Source src(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs;
    const int n = src.integer(1, 60);
    for (int i = 0; i < n; ++i) xs.push_back(static_cast<double>(src.integer(-5, 5)));
    Median3Filter op;
    EXPECT_EQ(out_x(op, from_x(xs)), oracle::median3(xs));
  }
}

// Downsampling

TEST(Downsample, FactorOneIsIdentity) {
  Downsampler op(1);
  gen::Source src(2);
  const auto in = gen::stream(src, 50);
  std::vector<GazeSample> out;
  op.process(in, {}, out);
  EXPECT_EQ(out, in);
}

TEST(Downsample, IndexArithmetic) {
  Downsampler op(4);
  gen::Source src(5);
  const auto in = gen::stream(src, 1000);
  std::vector<GazeSample> out;
  op.process(in, {}, out);
  ASSERT_EQ(out.size(), 250u);
  for (std::size_t k = 0; k < out.size(); ++k) EXPECT_EQ(out[k], in[4 * k + 3]);
}

TEST(Downsample, Meta) {
  Downsampler op(20);
  EXPECT_EQ(op.meta().initialization_samples, 19);
  EXPECT_EQ(op.meta().latency_ms(1000.0), 0);
  gen::Source src(1);
  auto rec = gen::recording(gen::stream(src, 1000));
  EXPECT_EQ(apply_privatizer(rec, op).recording.fs, 50.0);
}

TEST(Downsample, RejectsZero) {
  EXPECT_THROW(Downsampler(0), Error);
}

// Gaussian

TEST(Gaussian, EmpiricalVariance) {
  GaussianNoise op(1.0, Rng(42));
  const std::size_t n = 100000;
  double sx = 0, sxx = 0, sy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto o = op.push(GazeSample::at(double(i), 1.0, -2.0), MovementLabel::kUnknown);
    const double dx = o->x - 1.0;
    const double dy = o->y + 2.0;
    sx += dx;
    sxx += dx * dx;
    sy += dy;
    syy += dy * dy;
  }
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = syy / n - (sy / n) * (sy / n);
  EXPECT_GE(vx, 0.95); EXPECT_LE(vx, 1.05);
  EXPECT_GE(vy, 0.95); EXPECT_LE(vy, 1.05);
}

TEST(Gaussian, TinyVarianceApproachesInput) {
  GaussianNoise op(1e-24, Rng(1));
  auto o = op.push(GazeSample::at(0, 3.0, 4.0), MovementLabel::kUnknown);
  EXPECT_NEAR(o->x, 3.0, 1e-9);
  EXPECT_NEAR(o->y, 4.0, 1e-9);
}

TEST(Gaussian, SameSeedSameStream) {
  gen::Source src(9);
  const auto in = gen::stream(src, 500);
  GaussianNoise a(0.5, Rng(77)), b(0.5, Rng(77)), c(0.5, Rng(78));
  std::vector<GazeSample> oa, ob, oc;
  a.process(in, {}, oa);
  b.process(in, {}, ob);
  c.process(in, {}, oc);
  EXPECT_EQ(oa, ob);
  EXPECT_NE(oa, oc);
}

TEST(Gaussian, RejectsNonPositive) {
  try {
    GaussianNoise(0.0, Rng(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidVariance);
  }
}

// LWMA

TEST(Lwma, ThreeTapFormula) {
  LwmaSmoother op(3);
  const auto xs = out_x(op, from_x({3, 3, 3}));
  EXPECT_DOUBLE_EQ(xs[2], (1 * 3.0 + 2 * 3.0 + 3 * 3.0) / 6.0);
}

TEST(Lwma, ConstantAfterWarmup) {
  LwmaSmoother op(50);
  const auto xs = out_x(op, from_x(std::vector<double>(200, 2.5)));
  for (std::size_t i = 49; i < xs.size(); ++i) EXPECT_NEAR(xs[i], 2.5, 1e-12);
}

TEST(Lwma, MatchesDirectFormula) {
  gen::Source src(4);
  std::vector<double> xs;
  for (int i = 0; i < 300; ++i) xs.push_back(src.uniform(-3, 3));
  for (int b : {1, 2, 3, 10, 50}) {
    LwmaSmoother op(b);
    const auto got = out_x(op, from_x(xs));
    const auto want = oracle::lwma(xs, b);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12) << b << " " << i;
  }
}

TEST(Lwma, LatencyMeta) {
  EXPECT_EQ(LwmaSmoother(50).meta().latency_ms(1000.0), 32);
  EXPECT_EQ(LwmaSmoother(100).meta().latency_ms(1000.0), 66);
  EXPECT_EQ(LwmaSmoother(100).meta().initialization_samples, 99);
  EXPECT_DOUBLE_EQ(LwmaSmoother(100, true).meta().latency.samples(), 33.0);
}

// Targeted noise

TEST(TargetedNoise, FixationsUntouched) {
  TargetedLaplaceNoise op({}, Rng(3));
  gen::Source src(8);
  const auto in = gen::stream(src, 1000);
  std::vector<MovementLabel> labels(in.size(), MovementLabel::kFixation);
  std::vector<GazeSample> out;
  op.process(in, labels, out);
  EXPECT_EQ(out, in);
}

TEST(TargetedNoise, DisplacementMean) {
  for (auto mode : {ExponentialParam::kScale, ExponentialParam::kRate}) {
    TargetedNoiseParams p;
    p.parameterization = mode;
    TargetedLaplaceNoise op(p, Rng(5));
    const std::size_t n = 100000;
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto o = op.push(GazeSample::at(double(i), 0.0, 0.0), MovementLabel::kSaccade);
      sum += std::hypot(o->x, o->y);
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, p.mean_displacement(), 0.05 * p.mean_displacement());
  }
  EXPECT_DOUBLE_EQ(TargetedNoiseParams{}.lambda(), 3.0);
}

TEST(TargetedNoise, SameSeedSamePerturbation) {
  gen::Source src(1);
  const auto in = gen::stream(src, 400);
  std::vector<MovementLabel> labels(in.size(), MovementLabel::kSaccade);
  TargetedLaplaceNoise a({}, Rng(10)), b({}, Rng(10));
  std::vector<GazeSample> oa, ob;
  a.process(in, labels, oa);
  b.process(in, labels, ob);
  EXPECT_EQ(oa, ob);
}

TEST(TargetedNoise, RejectsBadBudget) {
  TargetedNoiseParams p;
  p.epsilon = 0.0;
  EXPECT_THROW(TargetedLaplaceNoise(p, Rng(1)), Error);
}

// FIR

TEST(Fir, DesignProperties) {
  for (auto [fc, taps] : std::vector<std::pair<double, int>>{{25, 49}, {75, 79}, {10, 29}, {100, 5}, {3, 101}}) {
    const auto h = fir_design(fc, taps, 1000.0);
    ASSERT_EQ(h.size(), static_cast<std::size_t>(taps));
    double sum = 0;
    for (double v : h) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    for (int k = 0; k < taps; ++k) EXPECT_EQ(h[k], h[taps - 1 - k]);
  }
}

TEST(Fir, ResponseByDirectEvaluation) {
  const auto h = fir_design(25, 49, 1000.0);
  EXPECT_NEAR(oracle::response_magnitude(h, 0.0, 1000.0), 1.0, 1e-12);
  EXPECT_GE(oracle::response_magnitude(h, 1.0, 1000.0), 0.99);
  EXPECT_LT(oracle::response_magnitude(h, 100.0, 1000.0), 0.05);
  EXPECT_NEAR(std::abs(frequency_response(h, 100.0, 1000.0)),
              oracle::response_magnitude(h, 100.0, 1000.0), 1e-12);
}

TEST(Fir, ImpulseResponseIsCoefficients) {
  FirFilter op(25, 49, 1000.0);
  std::vector<double> xs(80, 0.0);
  xs[0] = 1.0;
  const auto got = out_x(op, from_x(xs));
  for (std::size_t k = 0; k < 49; ++k) EXPECT_EQ(got[k], op.coefficients()[k]);
  for (std::size_t k = 49; k < got.size(); ++k) EXPECT_EQ(got[k], 0.0);
}

TEST(Fir, MatchesConvolution) {
  gen::Source src(6);
  std::vector<double> xs;
  for (int i = 0; i < 200; ++i) xs.push_back(src.uniform(-1, 1));
  FirFilter op(10, 29, 1000.0);
  const auto got = out_x(op, from_x(xs));
  const auto want = oracle::convolve(op.coefficients(), xs);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(Fir, ConstantSteadyState) {
  FirFilter op(25, 49, 1000.0);
  const auto xs = out_x(op, from_x(std::vector<double>(200, -7.0)));
  for (std::size_t i = 48; i < xs.size(); ++i) EXPECT_NEAR(xs[i], -7.0, 1e-12);
}

TEST(Fir, LatencyMeta) {
  EXPECT_EQ(FirFilter(75, 79, 1000.0).meta().latency_ms(1000.0), 39);
  EXPECT_EQ(FirFilter(25, 49, 1000.0).meta().latency_ms(1000.0), 24);
  EXPECT_EQ(FirFilter(10, 29, 1000.0).meta().latency_ms(1000.0), 14);
}

TEST(Fir, RejectsCutoffAboveNyquist) {
  try {
    fir_design(600, 49, 1000.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidCutoff);
  }
}

// Kalman

TEST(Kalman, HandStep) {
  KalmanChannel k(1.0, Mat2{{{0, 0}, {0, 0}}}, 1.0, Vec2{0, 0}, Mat2{{{1, 0}, {0, 1}}});
  k.predict();
  EXPECT_NEAR(k.covariance()[0][0], 2.0, 1e-12);
  EXPECT_NEAR(k.covariance()[0][1], 1.0, 1e-12);
  EXPECT_NEAR(k.covariance()[1][0], 1.0, 1e-12);
  EXPECT_NEAR(k.covariance()[1][1], 1.0, 1e-12);
  k.update(1.0);
  EXPECT_NEAR(k.gain()[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(k.gain()[1], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(k.position(), 2.0 / 3.0, 1e-12);
}

TEST(Kalman, MatchesElementwiseStep) {
  gen::Source src(12);
  for (int trial = 0; trial < 100; ++trial) {
    const double dt = src.uniform(0.0005, 0.02);
    const auto q = white_noise_acceleration(src.uniform(0.1, 1000), dt);
    const double r = src.uniform(0.01, 2);
    const Vec2 x{src.uniform(-5, 5), src.uniform(-5, 5)};
    const double a = src.uniform(0.1, 2), c = src.uniform(0.1, 2);
    const double b = src.uniform(-0.9, 0.9) * std::sqrt(a * c);
    KalmanChannel k(dt, q, r, x, Mat2{{{a, b}, {b, c}}});
    const double z = src.uniform(-5, 5);
    const auto want = oracle::kalman_step(dt, q[0][0], q[0][1], q[1][1], r, x[0], x[1], a, b, c, z);
    k.predict();
    EXPECT_NEAR(k.covariance()[0][0], want.p00, 1e-12);
    EXPECT_NEAR(k.covariance()[0][1], want.p01, 1e-12);
    EXPECT_NEAR(k.covariance()[1][1], want.p11, 1e-12);
    k.update(z);
    EXPECT_NEAR(k.gain()[0], want.k0, 1e-12);
    EXPECT_NEAR(k.gain()[1], want.k1, 1e-12);
    EXPECT_NEAR(k.position(), want.x0, 1e-9);
    EXPECT_NEAR(k.velocity(), want.x1, 1e-9);
  }
}

TEST(Kalman, ConstantConverges) {
  // Filter state starts at the origin. The constant-velocity loop may ring
  // around c; the peak error of each successive swing must shrink.
  for (auto [q, r] : std::vector<std::pair<double, double>>{{500, 0.5}, {1, 1}, {0.01, 5}}) {
    KalmanChannel k(0.001, white_noise_acceleration(q, 0.001), r, Vec2{0, 0},
                    Mat2{{{1, 0}, {0, 1}}});
    std::vector<double> swings{0.0};
    bool negative = true;
    double last = 0.0;
    for (int i = 0; i < 100000; ++i) {
      k.predict();
      k.update(4.0);
      last = k.position() - 4.0;
      if (std::abs(last) < 1e-10) continue;
      if (std::signbit(last) != negative) {
        negative = std::signbit(last);
        swings.push_back(0.0);
      }
      swings.back() = std::max(swings.back(), std::abs(last));
    }
    EXPECT_NEAR(last, 0.0, 1e-9) << q;
    for (std::size_t i = 1; i < swings.size(); ++i) EXPECT_LT(swings[i], swings[i - 1]) << q << " " << i;
  }
}

TEST(Kalman, RampVelocity) {
  KalmanSmoother op(1000.0);
  const double slope = 5.0;  // dva/s
  for (int i = 0; i < 20000; ++i) op.push(GazeSample::at(i, slope * i / 1000.0, 0.0), MovementLabel::kUnknown);
  EXPECT_NEAR(op.channel_x()->velocity(), slope, 1e-6);
}

TEST(Kalman, Meta) {
  KalmanSmoother op(1000.0);
  EXPECT_EQ(op.meta().latency_ms(1000.0), 0);
  EXPECT_EQ(op.meta().initialization_samples, 0);
}

// Operator properties

TEST(PrivatizerProperties, CausalAndChunkInvariant) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    gen::Source src(seed);
    const auto in = gen::stream(src, 600, 1000.0, 0.05);
    for (const auto& [name, make] : smoothers()) {
      auto ref = make();
      std::vector<GazeSample> whole;
      for (const auto& s : in) whole.push_back(*ref->push(s));

      auto chunked = make();
      std::vector<GazeSample> parts;
      std::size_t i = 0;
      while (i < in.size()) {
        const std::size_t len = std::min<std::size_t>(src.integer(1, 97), in.size() - i);
        chunked->process(std::span(in).subspan(i, len), {}, parts);
        i += len;
      }
      EXPECT_EQ(parts, whole) << name;

      const std::size_t cut = static_cast<std::size_t>(src.integer(1, 599));
      auto prefix = make();
      std::vector<GazeSample> head;
      prefix->process(std::span(in).first(cut), {}, head);
      EXPECT_EQ(head, std::vector<GazeSample>(whole.begin(), whole.begin() + cut)) << name;
    }
  }
}

TEST(PrivatizerProperties, StochasticDeterminism) {
  gen::Source src(2);
  auto rec = gen::recording(gen::stream(src, 1000));
  for (const char* op : {"gaussian", "targeted_laplace"}) {
    PrivatizerSpec spec{op, {}};
    std::vector<MovementLabel> labels(rec.samples.size(), MovementLabel::kSaccade);
    auto a = make_privatizer(spec, 1000.0, 99);
    auto b = make_privatizer(spec, 1000.0, 99);
    EXPECT_EQ(apply_privatizer(rec, *a, labels).recording.samples,
              apply_privatizer(rec, *b, labels).recording.samples);
  }
}

namespace {

// Peak lag of the cross-correlation between output and input, normalized
// by the energy of the shifted input segment.
int xcorr_peak(const std::vector<double>& in, const std::vector<double>& out, int max_lag) {
  int best = 0;
  double best_v = -1e300;
  const std::size_t skip = 1000;  // past any warm-up
  for (int lag = 0; lag <= max_lag; ++lag) {
    double acc = 0, energy = 0;
    for (std::size_t i = skip; i < in.size(); ++i) {
      acc += out[i] * in[i - lag];
      energy += in[i - lag] * in[i - lag];
    }
    const double v = acc / std::sqrt(energy);
    if (v > best_v) {
      best_v = v;
      best = lag;
    }
  }
  return best;
}

}  // namespace

TEST(PrivatizerProperties, CrossCorrelationPeakAtDeclaredLatency) {
  // Zero-mean multi-tone signal well inside every pass band, where the
  // group delay equals the declared latency.
  gen::Source src(21);
  std::vector<double> xs(40000, 0.0);
  for (int tone = 0; tone < 6; ++tone) {
    const double f = src.uniform(0.1, 1.0);
    const double ph = src.uniform(0, 2 * std::numbers::pi);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs[i] += std::sin(2 * std::numbers::pi * f * i / 1000.0 + ph);
    }
  }
  std::vector<std::pair<std::string, std::unique_ptr<Privatizer>>> ops;
  ops.emplace_back("median3", std::make_unique<Median3Filter>());
  ops.emplace_back("lwma50", std::make_unique<LwmaSmoother>(50));
  ops.emplace_back("lwma100", std::make_unique<LwmaSmoother>(100));
  ops.emplace_back("lwma200", std::make_unique<LwmaSmoother>(200));
  ops.emplace_back("fir75/79", std::make_unique<FirFilter>(75, 79, 1000.0));
  ops.emplace_back("fir25/49", std::make_unique<FirFilter>(25, 49, 1000.0));
  ops.emplace_back("fir10/29", std::make_unique<FirFilter>(10, 29, 1000.0));
  for (auto& [name, op] : ops) {
    const auto ys = out_x(*op, from_x(xs));
    const int peak = xcorr_peak(xs, ys, 300);
    EXPECT_NEAR(peak, op->meta().latency.samples(), 1.0) << name;
  }
}

TEST(PrivatizerProperties, SmoothersReduceNoise) {
  // Slow trajectory plus white noise.
  gen::Source src(31);
  std::vector<double> clean, noisy;
  for (int i = 0; i < 20000; ++i) {
    const double t = i / 1000.0;
    const double c = 3.0 * std::sin(2 * std::numbers::pi * 0.2 * t) + 0.5 * t;
    clean.push_back(c);
    noisy.push_back(c + src.normal(0.5));
  }
  const auto rms = [&](const std::vector<double>& v) {
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s += (v[i] - clean[i]) * (v[i] - clean[i]);
    return std::sqrt(s / v.size());
  };
  const double base = rms(noisy);
  for (const auto& [name, make] : smoothers()) {
    auto op = make();
    EXPECT_LT(rms(out_x(*op, from_x(noisy))), base) << name;
  }
}

TEST(Registry, UnknownOpAndParam) {
  EXPECT_THROW(validate_spec({"wavelet", {}}), Error);
  EXPECT_THROW(validate_spec({"fir", {{"cutoff", 3.0}}}), Error);
  EXPECT_NO_THROW(validate_spec({"fir", {{"fc_hz", 3.0}, {"taps", 9.0}}}));
  EXPECT_TRUE(is_stochastic({"gaussian", {}}));
  EXPECT_FALSE(is_stochastic({"kalman", {}}));
}

TEST(Registry, OneInOneOut) {
  gen::Source src(14);
  auto rec = gen::recording(gen::stream(src, 1000));
  auto id = make_privatizer({"identity", {}}, 1000.0, 0);
  EXPECT_EQ(apply_privatizer(rec, *id).recording.samples, rec.samples);
  auto med = make_privatizer({"median3", {}}, 1000.0, 0);
  EXPECT_EQ(apply_privatizer(rec, *med).recording.samples.size(), 1000u);
  auto ds = make_privatizer({"downsample", {{"factor", 2.0}}}, 1000.0, 0);
  EXPECT_EQ(apply_privatizer(rec, *ds).recording.samples.size(), 500u);
}
