#include "gazepriv/privatizers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "gazepriv/error.hpp"
#include "gazepriv/fir.hpp"
#include "gazepriv/kalman.hpp"

namespace gazepriv {
namespace {

double median3(double a, double b, double c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::int64_t SampleLatency::floor_ms(double fs) const {
  const double rounded = std::round(fs);
  if (rounded == fs && rounded > 0.0) {
    const auto rate = static_cast<std::int64_t>(rounded);
    return (num * 1000) / (den * rate);
  }
  return static_cast<std::int64_t>(std::floor(samples() * 1000.0 / fs));
}

void Privatizer::process(std::span<const GazeSample> in, std::span<const MovementLabel> labels,
                         std::vector<GazeSample>& out) {
  if (!labels.empty() && labels.size() != in.size()) {
    throw Error(ErrorCode::kInvalidArgument, "label count does not match sample count");
  }
  for (std::size_t i = 0; i < in.size(); ++i) {
    auto emitted = push(in[i], labels.empty() ? MovementLabel::kUnknown : labels[i]);
    if (emitted) out.push_back(*emitted);
  }
}

std::optional<GazeSample> HoldLast::apply(const GazeSample& s) {
  if (s.valid) {
    last_ = s;
    return s;
  }
  if (!last_) return std::nullopt;
  return GazeSample::at(s.t_ms, last_->x, last_->y);
}

IdentityPrivatizer::IdentityPrivatizer() : Privatizer({"identity", 0, {0, 1}, 1}) {}

Median3Filter::Median3Filter() : Privatizer({"median3", 0, {1, 1}, 1}) {}

std::optional<GazeSample> Median3Filter::push(const GazeSample& s, MovementLabel) {
  auto held = hold_.apply(s);
  if (!held) return s;
  if (!primed_) {
    hx_[0] = hx_[1] = held->x;
    hy_[0] = hy_[1] = held->y;
    primed_ = true;
  }
  GazeSample out = GazeSample::at(s.t_ms, median3(hx_[0], hx_[1], held->x),
                                  median3(hy_[0], hy_[1], held->y));
  hx_[0] = hx_[1];
  hx_[1] = held->x;
  hy_[0] = hy_[1];
  hy_[1] = held->y;
  return out;
}

Downsampler::Downsampler(int factor)
    : Privatizer({"downsample", factor - 1, {0, 1}, factor}), factor_(factor) {
  if (factor < 1) {
    throw Error(ErrorCode::kInvalidFactor, "decimation factor must be >= 1, got " +
                                               std::to_string(factor));
  }
}

std::optional<GazeSample> Downsampler::push(const GazeSample& s, MovementLabel) {
  ++count_;
  if (count_ % factor_ == 0) return s;
  return std::nullopt;
}

GaussianNoise::GaussianNoise(double variance, Rng rng)
    : Privatizer({"gaussian", 0, {0, 1}, 1}), rng_(std::move(rng)) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw Error(ErrorCode::kInvalidVariance,
                "noise variance must be positive, got " + format_number(variance));
  }
  dist_ = std::normal_distribution<double>(0.0, std::sqrt(variance));
}

std::optional<GazeSample> GaussianNoise::push(const GazeSample& s, MovementLabel) {
  if (!s.valid) return s;
  // x first, then y.
  const double dx = dist_(rng_.engine());
  const double dy = dist_(rng_.engine());
  return GazeSample::at(s.t_ms, s.x + dx, s.y + dy);
}

LwmaSmoother::LwmaSmoother(int window, bool newest_heaviest)
    : Privatizer({"lwma", 0, {0, 1}, 1}), window_(window) {
  if (window < 1) {
    throw Error(ErrorCode::kInvalidWindow,
                "LWMA window must be >= 1, got " + std::to_string(window));
  }
  const auto b = static_cast<std::int64_t>(window);
  meta_.initialization_samples = b - 1;
  meta_.latency = newest_heaviest ? SampleLatency{b - 1, 3} : SampleLatency{2 * (b - 1), 3};
  const double d = static_cast<double>(b * (b + 1) / 2);
  taps_.resize(window);
  for (int k = 0; k < window; ++k) {
    const double w = newest_heaviest ? static_cast<double>(window - k) : static_cast<double>(k + 1);
    taps_[k] = w / d;
  }
  hist_x_.assign(window, 0.0);
  hist_y_.assign(window, 0.0);
}

std::optional<GazeSample> LwmaSmoother::push(const GazeSample& s, MovementLabel) {
  auto held = hold_.apply(s);
  if (!held) return s;
  head_ = (head_ + 1) % hist_x_.size();
  hist_x_[head_] = held->x;
  hist_y_[head_] = held->y;
  const std::size_t n = hist_x_.size();
  double sx = 0.0;
  double sy = 0.0;
  // Newest first: head_ down to 0, then wrap from n-1.
  std::size_t k = 0;
  for (std::size_t idx = head_ + 1; idx-- > 0; ++k) {
    sx += taps_[k] * hist_x_[idx];
    sy += taps_[k] * hist_y_[idx];
  }
  for (std::size_t idx = n; idx-- > head_ + 1; ++k) {
    sx += taps_[k] * hist_x_[idx];
    sy += taps_[k] * hist_y_[idx];
  }
  return GazeSample::at(s.t_ms, sx, sy);
}

TargetedLaplaceNoise::TargetedLaplaceNoise(TargetedNoiseParams params, Rng rng)
    : Privatizer({"targeted_laplace", 0, {0, 1}, 1}),
      params_(params),
      rng_(std::move(rng)),
      angle_(0.0, 2.0 * std::numbers::pi) {
  if (!(params.radius > 0.0) || !(params.epsilon > 0.0) || !std::isfinite(params.radius) ||
      !std::isfinite(params.epsilon)) {
    throw Error(ErrorCode::kInvalidBudget, "targeted noise needs radius > 0 and epsilon > 0");
  }
  radial_ = std::exponential_distribution<double>(1.0 / params_.mean_displacement());
}

std::optional<GazeSample> TargetedLaplaceNoise::push(const GazeSample& s, MovementLabel label) {
  if (!s.valid || label != MovementLabel::kSaccade) return s;
  const double theta = angle_(rng_.engine());
  const double rho = radial_(rng_.engine());
  return GazeSample::at(s.t_ms, s.x + rho * std::cos(theta), s.y + rho * std::sin(theta));
}

PrivatizedRecording apply_privatizer(const Recording& rec, Privatizer& op,
                                     std::span<const MovementLabel> labels) {
  PrivatizedRecording out;
  out.recording = rec;
  out.recording.samples.clear();
  out.recording.samples.reserve(rec.samples.size() / op.meta().rate_divisor + 1);
  op.process(rec.samples, labels, out.recording.samples);
  out.recording.fs = rec.fs / op.meta().rate_divisor;
  out.meta = op.meta();
  return out;
}

double ParamMap::number(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const double* v = std::get_if<double>(&it->second)) return *v;
  throw Error(ErrorCode::kConfigError, "parameter '" + key + "' must be a number");
}

std::string ParamMap::text(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const std::string* v = std::get_if<std::string>(&it->second)) return *v;
  throw Error(ErrorCode::kConfigError, "parameter '" + key + "' must be a string");
}

namespace {

const std::map<std::string, std::set<std::string>>& known_ops() {
  static const std::map<std::string, std::set<std::string>> ops{
      {"identity", {}},
      {"median3", {}},
      {"downsample", {"factor"}},
      {"gaussian", {"variance"}},
      {"lwma", {"window", "newest_heaviest"}},
      {"targeted_laplace", {"radius", "epsilon", "exponential"}},
      {"fir", {"fc_hz", "taps"}},
      {"kalman", {"q", "r"}},
  };
  return ops;
}

int integer_param(const PrivatizerSpec& spec, const std::string& key, int fallback) {
  const double v = spec.params.number(key, fallback);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw Error(ErrorCode::kConfigError,
                spec.op + ": parameter '" + key + "' must be an integer");
  }
  return static_cast<int>(v);
}

TargetedNoiseParams targeted_params(const PrivatizerSpec& spec) {
  TargetedNoiseParams p;
  p.radius = spec.params.number("radius", p.radius);
  p.epsilon = spec.params.number("epsilon", p.epsilon);
  const std::string mode = spec.params.text("exponential", "scale");
  if (mode == "scale") {
    p.parameterization = ExponentialParam::kScale;
  } else if (mode == "rate") {
    p.parameterization = ExponentialParam::kRate;
  } else {
    throw Error(ErrorCode::kConfigError, "targeted_laplace: exponential must be scale or rate");
  }
  return p;
}

}  // namespace

void validate_spec(const PrivatizerSpec& spec) {
  auto it = known_ops().find(spec.op);
  if (it == known_ops().end()) {
    throw Error(ErrorCode::kConfigError, "unknown privatizer '" + spec.op + "'");
  }
  for (const auto& [key, value] : spec.params.values()) {
    if (!it->second.count(key)) {
      throw Error(ErrorCode::kConfigError,
                  "privatizer '" + spec.op + "' has no parameter '" + key + "'");
    }
  }
}

bool is_stochastic(const PrivatizerSpec& spec) {
  return spec.op == "gaussian" || spec.op == "targeted_laplace";
}

std::unique_ptr<Privatizer> make_privatizer(const PrivatizerSpec& spec, double fs,
                                            std::uint64_t seed) {
  validate_spec(spec);
  const std::string& op = spec.op;
  if (op == "identity") return std::make_unique<IdentityPrivatizer>();
  if (op == "median3") return std::make_unique<Median3Filter>();
  if (op == "downsample") return std::make_unique<Downsampler>(integer_param(spec, "factor", 2));
  if (op == "gaussian") {
    return std::make_unique<GaussianNoise>(spec.params.number("variance", 1.0), Rng(seed));
  }
  if (op == "lwma") {
    return std::make_unique<LwmaSmoother>(integer_param(spec, "window", 50),
                                          spec.params.number("newest_heaviest", 0.0) != 0.0);
  }
  if (op == "targeted_laplace") {
    return std::make_unique<TargetedLaplaceNoise>(targeted_params(spec), Rng(seed));
  }
  if (op == "fir") {
    return std::make_unique<FirFilter>(spec.params.number("fc_hz", 25.0),
                                       integer_param(spec, "taps", 49), fs);
  }
  KalmanParams kp;
  kp.q = spec.params.number("q", kp.q);
  kp.r = spec.params.number("r", kp.r);
  return std::make_unique<KalmanSmoother>(fs, kp);
}

VariantLabel describe(const PrivatizerSpec& spec, double fs) {
  validate_spec(spec);
  const std::string& op = spec.op;
  if (op == "identity") return {"Baseline", "Raw data", 0};
  if (op == "median3") return {"Median Filter", "3-sample", 1};
  if (op == "downsample") {
    const int m = integer_param(spec, "factor", 2);
    return {"Temporal Sampling (Hz)", format_number(std::floor(fs / m)), 2};
  }
  if (op == "gaussian") {
    return {"Gaussian Noise (variance)", format_number(spec.params.number("variance", 1.0)), 3};
  }
  if (op == "lwma") {
    std::string v = std::to_string(integer_param(spec, "window", 50));
    if (spec.params.number("newest_heaviest", 0.0) != 0.0) v += " (newest-heaviest)";
    return {"Smoothing (window)", v, 4};
  }
  if (op == "targeted_laplace") {
    const auto p = targeted_params(spec);
    std::string v = "2D Laplace";
    if (p.radius != 1.5 || p.epsilon != 0.5) {
      v += " r=" + format_number(p.radius) + " eps=" + format_number(p.epsilon);
    }
    if (p.parameterization == ExponentialParam::kRate) v += " (rate)";
    return {"Targeted Noise Injection", v, 5};
  }
  if (op == "fir") {
    return {"Causal FIR (cutoff/taps)",
            format_number(spec.params.number("fc_hz", 25.0)) + "/" +
                std::to_string(integer_param(spec, "taps", 49)),
            6};
  }
  const KalmanParams defaults;
  const double q = spec.params.number("q", defaults.q);
  const double r = spec.params.number("r", defaults.r);
  std::string v = "-";
  if (q != defaults.q || r != defaults.r) v = "q=" + format_number(q) + " r=" + format_number(r);
  return {"Kalman Filter", v, 7};
}

}  // namespace gazepriv
