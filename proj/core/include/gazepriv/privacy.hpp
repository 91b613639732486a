#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gazepriv/signal.hpp"

namespace gazepriv {

inline constexpr std::size_t kWindowSamples = 5000;
inline constexpr double kWindowRateHz = 1000.0;
inline constexpr double kVelocityClampDegS = 1000.0;

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using SimilarityMatrix = Matrix<double>;
using GroundTruthMatrix = Matrix<std::uint8_t>;

// Two velocity channels of one non-overlapping 5 s window. Before
// normalization values are clamped deg/s and may be NaN where gaze was
// missing; after corpus_zscore they are finite z-scores.
struct VelocityWindow {
  std::string subject_id;
  std::string session_id;
  std::size_t index = 0;  // window ordinal within its recording
  std::vector<double> vx;
  std::vector<double> vy;
};

// Clamped instantaneous velocities cut into 5000-sample windows; the
// trailing remainder is dropped. Throws kRateMismatch unless fs == 1000.
std::vector<VelocityWindow> make_velocity_windows(const Recording& rec);

struct ZScoreStats {
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 2> stddev{1.0, 1.0};
};

// Per-channel mean/std over every finite value of every window.
ZScoreStats corpus_stats(std::span<const VelocityWindow> windows);
// Maps values to (v - mean) / std, then NaN to 0.
void apply_zscore(std::span<VelocityWindow> windows, const ZScoreStats& stats);
// corpus_stats + apply_zscore. Throws kZeroVariance / kEmptyMatrix.
ZScoreStats corpus_zscore(std::span<VelocityWindow> windows);

using Embedding = std::vector<double>;

// Deterministic map from a normalized window to a fixed-size vector.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual Embedding operator()(const VelocityWindow& window) const = 0;
  virtual std::string name() const = 0;
};

// Velocity-distribution features. Not a biometric network: per-channel
// moments and quantiles of |v|, speed summary and a log-speed histogram (64
// values). Scalar features pass through slog(x) = sign(x) log(1 + |x|) so
// that no single feature dominates the cosine; histogram entries are the
// square roots of bin fractions. All features are 0 on a zero signal.
class StatisticalEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDimension = 64;
  static constexpr std::array<double, 9> kQuantiles{0.01, 0.05, 0.10, 0.25, 0.50,
                                                    0.75, 0.90, 0.95, 0.99};
  static constexpr std::size_t kHistogramBins = 32;
  // log10 of speed in z-units; speeds below the first edge land in bin 0.
  static constexpr double kHistogramLogMin = -3.0;
  static constexpr double kHistogramLogWidth = 0.125;
  // Quantiles are scaled before slog so that fixation-level spread, a
  // few hundredths of a z-unit, still registers.
  static constexpr double kQuantileGain = 20.0;

  std::size_t dimension() const override { return kDimension; }
  Embedding operator()(const VelocityWindow& window) const override;
  std::string name() const override { return "stats"; }
};

// Concatenates the outputs of several embedders.
class ConcatEmbedder final : public Embedder {
 public:
  explicit ConcatEmbedder(std::vector<std::shared_ptr<const Embedder>> parts);
  std::size_t dimension() const override;
  Embedding operator()(const VelocityWindow& window) const override;
  std::string name() const override;

 private:
  std::vector<std::shared_ptr<const Embedder>> parts_;
};

std::unique_ptr<Embedder> make_embedder(const std::string& name);

// Runs the embedder over every window. Throws kDimensionMismatch when an
// output differs from the declared dimension or contains non-finite values.
std::vector<Embedding> embed(std::span<const VelocityWindow> windows, const Embedder& embedder);
Embedding embed(const VelocityWindow& window, const Embedder& embedder);

// S(i, j) = cos(enroll_i, auth_j). Throws kZeroNorm / kDimensionMismatch.
SimilarityMatrix similarity_matrix(std::span<const Embedding> enroll,
                                   std::span<const Embedding> auth);

// Percentage of columns whose arg-max row (lowest index on ties) is a true
// match. Throws kEmptyMatrix / kDimensionMismatch.
double rank1_ir(const SimilarityMatrix& s, const GroundTruthMatrix& y);

GroundTruthMatrix ground_truth(std::span<const std::string> enroll_subjects,
                               std::span<const std::string> auth_subjects);

// Window export: 5000 rows of "vx,vy".
void write_window_csv(const std::string& path, const VelocityWindow& window);

struct EmbeddingRow {
  std::string subject_id;
  std::string session_id;
  std::size_t window_index = 0;
};

// Embedding matrix as CSV (one row per window) plus a JSON sidecar at
// `<path>.json` holding the dimension and the row index.
void write_embeddings(const std::string& path, std::span<const Embedding> embeddings,
                      std::span<const EmbeddingRow> rows);
void read_embeddings(const std::string& path, std::vector<Embedding>& embeddings,
                     std::vector<EmbeddingRow>& rows);

}  // namespace gazepriv
