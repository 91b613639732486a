#include "gazepriv/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "gazepriv/classification.hpp"
#include "gazepriv/error.hpp"

namespace gazepriv {

std::vector<VelocityWindow> make_velocity_windows(const Recording& rec) {
  if (rec.fs != kWindowRateHz) {
    std::ostringstream msg;
    msg << "velocity windows are defined as 5000 samples at 1000 Hz; stream "
        << rec.subject_id << "/" << rec.session_id << " is " << rec.fs << " Hz";
    throw Error(ErrorCode::kRateMismatch, msg.str());
  }
  const auto clamp = [](std::vector<double>& v) {
    for (double& x : v) {
      if (std::isfinite(x)) x = std::clamp(x, -kVelocityClampDegS, kVelocityClampDegS);
    }
  };
  const auto xs = channel_x(rec);
  const auto ys = channel_y(rec);
  auto vx = velocity(xs, rec.fs);
  auto vy = velocity(ys, rec.fs);
  clamp(vx);
  clamp(vy);

  std::vector<VelocityWindow> windows;
  const std::size_t count = vx.size() / kWindowSamples;
  for (std::size_t w = 0; w < count; ++w) {
    VelocityWindow win;
    win.subject_id = rec.subject_id;
    win.session_id = rec.session_id;
    win.index = w;
    const auto begin = static_cast<std::ptrdiff_t>(w * kWindowSamples);
    const auto end = begin + static_cast<std::ptrdiff_t>(kWindowSamples);
    win.vx.assign(vx.begin() + begin, vx.begin() + end);
    win.vy.assign(vy.begin() + begin, vy.begin() + end);
    windows.push_back(std::move(win));
  }
  return windows;
}

ZScoreStats corpus_stats(std::span<const VelocityWindow> windows) {
  if (windows.empty()) throw Error(ErrorCode::kEmptyMatrix, "z-score needs at least one window");
  ZScoreStats stats;
  for (int c = 0; c < 2; ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& w : windows) {
      for (double v : (c == 0 ? w.vx : w.vy)) {
        if (std::isfinite(v)) {
          sum += v;
          ++n;
        }
      }
    }
    if (n == 0) {
      throw Error(ErrorCode::kZeroVariance, "velocity channel has no finite values");
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& w : windows) {
      for (double v : (c == 0 ? w.vx : w.vy)) {
        if (std::isfinite(v)) ss += (v - mean) * (v - mean);
      }
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (!(sd > 0.0)) {
      throw Error(ErrorCode::kZeroVariance,
                  std::string("velocity channel ") + (c == 0 ? "x" : "y") + " has zero variance");
    }
    stats.mean[c] = mean;
    stats.stddev[c] = sd;
  }
  return stats;
}

void apply_zscore(std::span<VelocityWindow> windows, const ZScoreStats& stats) {
  for (auto& w : windows) {
    for (int c = 0; c < 2; ++c) {
      for (double& v : (c == 0 ? w.vx : w.vy)) {
        v = std::isfinite(v) ? (v - stats.mean[c]) / stats.stddev[c] : 0.0;
      }
    }
  }
}

ZScoreStats corpus_zscore(std::span<VelocityWindow> windows) {
  const ZScoreStats stats = corpus_stats(windows);
  apply_zscore(windows, stats);
  return stats;
}

namespace {

double interpolate_sorted(const std::vector<double>& sorted, double q) {
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  return sorted[lo] + (rank - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double slog(double x) { return std::copysign(std::log1p(std::abs(x)), x); }

// mean, std, skewness, excess kurtosis; higher moments are 0 for a
// constant signal.
void push_moments(const std::vector<double>& v, Embedding& out) {
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double sd = std::sqrt(m2);
  out.push_back(mean);
  out.push_back(sd);
  out.push_back(m2 > 0.0 ? m3 / (m2 * sd) : 0.0);
  out.push_back(m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0);
}

}  // namespace

Embedding StatisticalEmbedder::operator()(const VelocityWindow& window) const {
  if (window.vx.empty() || window.vx.size() != window.vy.size()) {
    throw Error(ErrorCode::kInvalidArgument, "window channels must be non-empty and equal length");
  }
  Embedding out;
  out.reserve(kDimension);
  for (const auto* channel : {&window.vx, &window.vy}) {
    // Absolute velocity: the sign mostly encodes saccade direction, which
    // the task dictates.
    std::vector<double> mag(channel->size());
    std::transform(channel->begin(), channel->end(), mag.begin(),
                   [](double v) { return std::abs(v); });
    Embedding moments;
    push_moments(mag, moments);
    out.push_back(slog(kQuantileGain * moments[0]));
    out.push_back(slog(kQuantileGain * moments[1]));
    out.push_back(slog(moments[2]));
    out.push_back(slog(moments[3]));
    std::sort(mag.begin(), mag.end());
    for (double q : kQuantiles) out.push_back(slog(kQuantileGain * interpolate_sorted(mag, q)));
  }

  std::vector<double> speed(window.vx.size());
  for (std::size_t i = 0; i < speed.size(); ++i) speed[i] = std::hypot(window.vx[i], window.vy[i]);
  Embedding speed_moments;
  push_moments(speed, speed_moments);
  out.push_back(slog(kQuantileGain * speed_moments[0]));
  out.push_back(slog(kQuantileGain * speed_moments[1]));
  std::vector<double> sorted = speed;
  std::sort(sorted.begin(), sorted.end());
  out.push_back(slog(kQuantileGain * interpolate_sorted(sorted, 0.50)));
  out.push_back(slog(kQuantileGain * interpolate_sorted(sorted, 0.90)));
  out.push_back(slog(kQuantileGain * interpolate_sorted(sorted, 0.99)));
  const auto fast = std::count_if(speed.begin(), speed.end(), [](double s) { return s > 1.0; });
  const auto n = static_cast<double>(speed.size());
  out.push_back(std::sqrt(static_cast<double>(fast) / n));

  std::vector<double> hist(kHistogramBins, 0.0);
  for (double s : speed) {
    std::size_t bin = 0;
    if (s > 0.0) {
      const double pos = (std::log10(s) - kHistogramLogMin) / kHistogramLogWidth;
      if (pos > 0.0) bin = std::min(static_cast<std::size_t>(pos), kHistogramBins - 1);
    }
    hist[bin] += 1.0;
  }
  // A zero signal has every sample in bin 0; report that bin relative to
  // the zero-signal baseline so the all-zero window embeds to zeros.
  hist[0] = n - hist[0];
  for (double h : hist) out.push_back(std::sqrt(h / n));
  return out;
}

ConcatEmbedder::ConcatEmbedder(std::vector<std::shared_ptr<const Embedder>> parts)
    : parts_(std::move(parts)) {
  if (parts_.empty()) throw Error(ErrorCode::kInvalidArgument, "ensemble needs at least one part");
}

std::size_t ConcatEmbedder::dimension() const {
  std::size_t d = 0;
  for (const auto& p : parts_) d += p->dimension();
  return d;
}

Embedding ConcatEmbedder::operator()(const VelocityWindow& window) const {
  Embedding out;
  out.reserve(dimension());
  for (const auto& p : parts_) {
    const Embedding e = (*p)(window);
    out.insert(out.end(), e.begin(), e.end());
  }
  return out;
}

std::string ConcatEmbedder::name() const {
  std::string n = "concat:";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) n += '+';
    n += parts_[i]->name();
  }
  return n;
}

std::unique_ptr<Embedder> make_embedder(const std::string& name) {
  if (name == "stats") return std::make_unique<StatisticalEmbedder>();
  const std::string prefix = "concat:";
  if (name.rfind(prefix, 0) == 0) {
    std::vector<std::shared_ptr<const Embedder>> parts;
    std::stringstream ss(name.substr(prefix.size()));
    std::string part;
    while (std::getline(ss, part, '+')) parts.push_back(make_embedder(part));
    return std::make_unique<ConcatEmbedder>(std::move(parts));
  }
  throw Error(ErrorCode::kConfigError, "unknown embedder '" + name + "'");
}

Embedding embed(const VelocityWindow& window, const Embedder& embedder) {
  Embedding e = embedder(window);
  if (e.size() != embedder.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedder " + embedder.name() + " returned " + std::to_string(e.size()) +
                    " values, declared " + std::to_string(embedder.dimension()));
  }
  for (double v : e) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kDimensionMismatch, "embedder produced a non-finite value");
    }
  }
  return e;
}

std::vector<Embedding> embed(std::span<const VelocityWindow> windows, const Embedder& embedder) {
  std::vector<Embedding> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(embed(w, embedder));
  return out;
}

SimilarityMatrix similarity_matrix(std::span<const Embedding> enroll,
                                   std::span<const Embedding> auth) {
  if (enroll.empty() || auth.empty()) {
    throw Error(ErrorCode::kEmptyMatrix, "similarity needs enrollment and authentication rows");
  }
  const std::size_t dim = enroll.front().size();
  auto norms = [dim](std::span<const Embedding> set) {
    std::vector<double> n;
    n.reserve(set.size());
    for (const auto& e : set) {
      if (e.size() != dim) {
        throw Error(ErrorCode::kDimensionMismatch, "embeddings have different dimensions");
      }
      double s = 0.0;
      for (double v : e) s += v * v;
      if (!(s > 0.0)) throw Error(ErrorCode::kZeroNorm, "embedding with zero norm");
      n.push_back(std::sqrt(s));
    }
    return n;
  };
  const auto ne = norms(enroll);
  const auto na = norms(auth);
  SimilarityMatrix s(enroll.size(), auth.size());
  for (std::size_t i = 0; i < enroll.size(); ++i) {
    for (std::size_t j = 0; j < auth.size(); ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < dim; ++k) dot += enroll[i][k] * auth[j][k];
      s(i, j) = dot / (ne[i] * na[j]);
    }
  }
  return s;
}

double rank1_ir(const SimilarityMatrix& s, const GroundTruthMatrix& y) {
  if (s.empty() || y.empty()) throw Error(ErrorCode::kEmptyMatrix, "empty similarity matrix");
  if (s.rows() != y.rows() || s.cols() != y.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "similarity and ground-truth shapes differ");
  }
  std::size_t hits = 0;
  for (std::size_t j = 0; j < s.cols(); ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.rows(); ++i) {
      if (s(i, j) > s(best, j)) best = i;
    }
    if (y(best, j) != 0) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(s.cols());
}

GroundTruthMatrix ground_truth(std::span<const std::string> enroll_subjects,
                               std::span<const std::string> auth_subjects) {
  GroundTruthMatrix y(enroll_subjects.size(), auth_subjects.size(), 0);
  for (std::size_t i = 0; i < enroll_subjects.size(); ++i) {
    for (std::size_t j = 0; j < auth_subjects.size(); ++j) {
      y(i, j) = enroll_subjects[i] == auth_subjects[j] ? 1 : 0;
    }
  }
  return y;
}

void write_window_csv(const std::string& path, const VelocityWindow& window) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path);
  os << "vx,vy\n" << std::setprecision(17);
  for (std::size_t i = 0; i < window.vx.size(); ++i) os << window.vx[i] << ',' << window.vy[i] << '\n';
}

void write_embeddings(const std::string& path, std::span<const Embedding> embeddings,
                      std::span<const EmbeddingRow> rows) {
  if (embeddings.size() != rows.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one index row per embedding is required");
  }
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path);
  os << std::setprecision(17);
  for (const auto& e : embeddings) {
    for (std::size_t k = 0; k < e.size(); ++k) os << (k ? "," : "") << e[k];
    os << '\n';
  }
  nlohmann::json side;
  side["dimension"] = embeddings.empty() ? 0 : embeddings.front().size();
  side["count"] = embeddings.size();
  side["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    side["rows"].push_back(
        {{"subject", r.subject_id}, {"session", r.session_id}, {"window", r.window_index}});
  }
  std::ofstream js(path + ".json");
  if (!js) throw Error(ErrorCode::kIoError, "cannot write " + path + ".json");
  js << side.dump(2) << '\n';
}

void read_embeddings(const std::string& path, std::vector<Embedding>& embeddings,
                     std::vector<EmbeddingRow>& rows) {
  std::ifstream js(path + ".json");
  if (!js) throw Error(ErrorCode::kIoError, "cannot read sidecar " + path + ".json");
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(js);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path + ".json: " + e.what());
  }
  const auto dim = side.at("dimension").get<std::size_t>();
  rows.clear();
  for (const auto& r : side.at("rows")) {
    rows.push_back({r.at("subject").get<std::string>(), r.at("session").get<std::string>(),
                    r.at("window").get<std::size_t>()});
  }
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIoError, "cannot read " + path);
  embeddings.clear();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    Embedding e;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        e.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParseError,
                    path + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (e.size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  path + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                      " values, found " + std::to_string(e.size()));
    }
    embeddings.push_back(std::move(e));
  }
  if (embeddings.size() != rows.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding matrix and sidecar disagree on row count");
  }
}

}  // namespace gazepriv
