#include "gazepriv/signal.hpp"

#include <algorithm>
#include <sstream>

#include "gazepriv/error.hpp"

namespace gazepriv {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAllSamplesMissing: return "AllSamplesMissing";
    case ErrorCode::kInvalidFactor: return "InvalidFactor";
    case ErrorCode::kInvalidVariance: return "InvalidVariance";
    case ErrorCode::kInvalidWindow: return "InvalidWindow";
    case ErrorCode::kInvalidBudget: return "InvalidBudget";
    case ErrorCode::kInvalidCutoff: return "InvalidCutoff";
    case ErrorCode::kNonFiniteState: return "NonFiniteState";
    case ErrorCode::kNoTargets: return "NoTargets";
    case ErrorCode::kDegenerateVector: return "DegenerateVector";
    case ErrorCode::kEmptyPopulation: return "EmptyPopulation";
    case ErrorCode::kRateMismatch: return "RateMismatch";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroNorm: return "ZeroNorm";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

bool operator==(const GazeSample& a, const GazeSample& b) {
  if (a.valid != b.valid || a.t_ms != b.t_ms) return false;
  return !a.valid || (a.x == b.x && a.y == b.y);
}

void ScreenBounds::validate() const {
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw Error(ErrorCode::kInvalidArgument, "screen bounds must satisfy min < max");
  }
}

void Recording::validate() const {
  if (samples.empty()) throw Error(ErrorCode::kInvalidArgument, "recording has no samples");
  if (!(fs > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sampling rate must be positive");
  const double span = samples.back().t_ms - t_origin_ms;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (i > 0 && !(targets[i].onset_ms > targets[i - 1].onset_ms)) {
      throw Error(ErrorCode::kInvalidArgument, "target onsets must be strictly increasing");
    }
    if (targets[i].onset_ms < 0.0 || targets[i].onset_ms > span) {
      std::ostringstream msg;
      msg << "target " << targets[i].id << " onset " << targets[i].onset_ms
          << " ms lies outside the recording";
      throw Error(ErrorCode::kInvalidArgument, msg.str());
    }
  }
}

Recording clamp_offscreen(const Recording& rec, const ScreenBounds& bounds) {
  Recording out = rec;
  for (auto& s : out.samples) {
    if (s.valid && !bounds.contains(s.x, s.y)) s = GazeSample::missing(s.t_ms);
  }
  return out;
}

Recording forward_fill(const Recording& rec) {
  auto first = std::find_if(rec.samples.begin(), rec.samples.end(),
                            [](const GazeSample& s) { return s.valid; });
  if (first == rec.samples.end()) {
    throw Error(ErrorCode::kAllSamplesMissing,
                "recording " + rec.subject_id + "/" + rec.session_id + " has no valid samples");
  }
  Recording out = rec;
  double last_x = first->x;
  double last_y = first->y;
  for (auto& s : out.samples) {
    if (s.valid) {
      last_x = s.x;
      last_y = s.y;
    } else {
      s = GazeSample::at(s.t_ms, last_x, last_y);
    }
  }
  return out;
}

double data_loss_rate(const Recording& rec) {
  if (rec.samples.empty()) return 0.0;
  const auto missing = std::count_if(rec.samples.begin(), rec.samples.end(),
                                     [](const GazeSample& s) { return !s.valid; });
  return static_cast<double>(missing) / static_cast<double>(rec.samples.size());
}

Recording preprocess(const Recording& rec, const ScreenBounds& bounds) {
  return forward_fill(clamp_offscreen(rec, bounds));
}

std::vector<double> channel_x(const Recording& rec) {
  std::vector<double> out;
  out.reserve(rec.samples.size());
  for (const auto& s : rec.samples) out.push_back(s.x);
  return out;
}

std::vector<double> channel_y(const Recording& rec) {
  std::vector<double> out;
  out.reserve(rec.samples.size());
  for (const auto& s : rec.samples) out.push_back(s.y);
  return out;
}

}  // namespace gazepriv
