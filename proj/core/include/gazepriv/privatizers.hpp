#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gazepriv/movement.hpp"
#include "gazepriv/rng.hpp"
#include "gazepriv/signal.hpp"

namespace gazepriv {

// Latency as an exact fraction of samples, e.g. 2(B-1)/3 for LWMA.
struct SampleLatency {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double samples() const { return static_cast<double>(num) / static_cast<double>(den); }
  // Floor of the latency in whole milliseconds at sampling rate fs.
  std::int64_t floor_ms(double fs) const;
};

struct PrivatizerMeta {
  std::string name;
  std::int64_t initialization_samples = 0;
  SampleLatency latency;
  // Output rate is fs / rate_divisor (only the downsampler changes it).
  int rate_divisor = 1;

  std::int64_t latency_ms(double fs) const { return latency.floor_ms(fs); }
};

// Causal, push-driven operator. Each push consumes one input sample and
// returns the emitted sample, or nothing while the operator holds input.
class Privatizer {
 public:
  virtual ~Privatizer() = default;

  const PrivatizerMeta& meta() const { return meta_; }

  virtual std::optional<GazeSample> push(const GazeSample& sample,
                                         MovementLabel label = MovementLabel::kUnknown) = 0;

  // Appends the emissions for a whole chunk to `out`. `labels` is either
  // empty or the same length as `in`.
  virtual void process(std::span<const GazeSample> in,
                       std::span<const MovementLabel> labels,
                       std::vector<GazeSample>& out);

  virtual bool uses_labels() const { return false; }

 protected:
  explicit Privatizer(PrivatizerMeta meta) : meta_(std::move(meta)) {}

  PrivatizerMeta meta_;
};

// Substitutes missing samples with the last valid one seen on this stream.
class HoldLast {
 public:
  // Returns nullopt only before the first valid sample.
  std::optional<GazeSample> apply(const GazeSample& s);

 private:
  std::optional<GazeSample> last_;
};

class IdentityPrivatizer final : public Privatizer {
 public:
  IdentityPrivatizer();
  std::optional<GazeSample> push(const GazeSample& s, MovementLabel) override { return s; }
};

// y_n = median(x_{n-2}, x_{n-1}, x_n) per channel, history seeded with the
// first valid sample.
class Median3Filter final : public Privatizer {
 public:
  Median3Filter();
  std::optional<GazeSample> push(const GazeSample& s, MovementLabel) override;

 private:
  HoldLast hold_;
  bool primed_ = false;
  double hx_[2] = {0, 0};  // x_{n-2}, x_{n-1}
  double hy_[2] = {0, 0};
};

// Emits every factor-th input unchanged, first at input index factor-1.
class Downsampler final : public Privatizer {
 public:
  explicit Downsampler(int factor);
  std::optional<GazeSample> push(const GazeSample& s, MovementLabel) override;
  int factor() const { return factor_; }

 private:
  int factor_;
  std::int64_t count_ = 0;
};

class GaussianNoise final : public Privatizer {
 public:
  GaussianNoise(double variance, Rng rng);
  std::optional<GazeSample> push(const GazeSample& s, MovementLabel) override;

 private:
  Rng rng_;
  std::normal_distribution<double> dist_;
};

// Causal linearly weighted moving average over `window` samples with zero
// padding before the stream start. By default the tap on s_{i-k} is (k+1),
// giving a weight centroid of 2(B-1)/3 samples. With newest_heaviest the
// taps are reversed and the centroid is (B-1)/3.
class LwmaSmoother final : public Privatizer {
 public:
  explicit LwmaSmoother(int window, bool newest_heaviest = false);
  std::optional<GazeSample> push(const GazeSample& s, MovementLabel) override;

  int window() const { return window_; }
  // Tap applied to s_{i-k}, already divided by B(B+1)/2.
  const std::vector<double>& taps() const { return taps_; }

 private:
  int window_;
  std::vector<double> taps_;
  std::vector<double> hist_x_;  // ring buffer, zero padded
  std::vector<double> hist_y_;
  std::size_t head_ = 0;
  HoldLast hold_;
};

enum class ExponentialParam { kScale, kRate };

struct TargetedNoiseParams {
  double radius = 1.5;
  double epsilon = 0.5;
  // How lambda = radius / epsilon parameterizes the radial exponential.
  ExponentialParam parameterization = ExponentialParam::kScale;

  double lambda() const { return radius / epsilon; }
  double mean_displacement() const {
    return parameterization == ExponentialParam::kScale ? lambda() : 1.0 / lambda();
  }
};

// Planar Laplace displacement applied to saccade-labeled samples only.
class TargetedLaplaceNoise final : public Privatizer {
 public:
  TargetedLaplaceNoise(TargetedNoiseParams params, Rng rng);
  std::optional<GazeSample> push(const GazeSample& s, MovementLabel label) override;
  bool uses_labels() const override { return true; }

  const TargetedNoiseParams& params() const { return params_; }

 private:
  TargetedNoiseParams params_;
  Rng rng_;
  std::uniform_real_distribution<double> angle_;
  std::exponential_distribution<double> radial_;
};

struct PrivatizedRecording {
  Recording recording;
  PrivatizerMeta meta;
};

// Streams every sample of `rec` through `op` in order. `labels` is either
// empty or one label per sample.
PrivatizedRecording apply_privatizer(const Recording& rec, Privatizer& op,
                                     std::span<const MovementLabel> labels = {});

// Declarative operator configuration: {"op": "fir", "fc_hz": 25, "taps": 49}.
using ParamValue = std::variant<double, std::string>;

class ParamMap {
 public:
  ParamMap() = default;
  ParamMap(std::initializer_list<std::pair<const std::string, ParamValue>> init)
      : values_(init) {}

  void set(const std::string& key, ParamValue v) { values_[key] = std::move(v); }
  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  double number(const std::string& key, double fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  const std::map<std::string, ParamValue>& values() const { return values_; }

 private:
  std::map<std::string, ParamValue> values_;
};

struct PrivatizerSpec {
  std::string op = "identity";
  ParamMap params;
};

// Table-1 style labels for a configured operator.
struct VariantLabel {
  std::string approach;
  std::string variant;
  int approach_rank = 0;
};

// Throws kConfigError for unknown ops or parameter names.
void validate_spec(const PrivatizerSpec& spec);
bool is_stochastic(const PrivatizerSpec& spec);
std::unique_ptr<Privatizer> make_privatizer(const PrivatizerSpec& spec, double fs,
                                            std::uint64_t seed);
VariantLabel describe(const PrivatizerSpec& spec, double fs);

}  // namespace gazepriv
