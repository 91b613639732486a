#include "gazepriv/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <tuple>

#include "gazepriv/error.hpp"

namespace gazepriv {

std::vector<TargetWindow> segment_by_target(const Recording& rec, double window_ms) {
  if (rec.targets.empty()) {
    throw Error(ErrorCode::kNoTargets,
                "recording " + rec.subject_id + "/" + rec.session_id + " has no target track");
  }
  std::vector<TargetWindow> windows;
  windows.reserve(rec.targets.size());
  auto sample_at_or_after = [&](double rel_ms) {
    auto it = std::lower_bound(rec.samples.begin(), rec.samples.end(), rel_ms,
                               [&](const GazeSample& s, double v) {
                                 return s.t_ms - rec.t_origin_ms < v;
                               });
    return static_cast<std::size_t>(it - rec.samples.begin());
  };
  for (std::size_t k = 0; k < rec.targets.size(); ++k) {
    TargetWindow w;
    w.target = rec.targets[k];
    w.start_ms = w.target.onset_ms;
    w.end_ms = w.start_ms + window_ms;
    if (k + 1 < rec.targets.size()) w.end_ms = std::min(w.end_ms, rec.targets[k + 1].onset_ms);
    w.first_sample = sample_at_or_after(w.start_ms);
    w.sample_count = sample_at_or_after(w.end_ms) - w.first_sample;
    windows.push_back(w);
  }
  return windows;
}

InteractionOutcome rank1_fixation(std::span<const FixationSegment> fixations,
                                  const TargetWindow& window, double dwell_ms) {
  InteractionOutcome out;
  out.target_id = window.target.id;
  const FixationSegment* best = nullptr;
  double best_dist = 0.0;
  for (const auto& f : fixations) {
    if (f.onset_ms < window.start_ms || f.onset_ms >= window.end_ms) continue;
    if (f.duration_ms < dwell_ms) continue;
    ++out.fixation_count;
    const double dist = std::hypot(f.centroid_x - window.target.x, f.centroid_y - window.target.y);
    if (best == nullptr ||
        std::tie(dist, f.onset_ms, f.start_index) <
            std::tie(best_dist, best->onset_ms, best->start_index)) {
      best = &f;
      best_dist = dist;
    }
  }
  if (best != nullptr) {
    out.valid = true;
    out.trigger_x = best->centroid_x;
    out.trigger_y = best->centroid_y;
    out.offset_dva = angular_offset(best->centroid_x, best->centroid_y, window.target.x,
                                    window.target.y);
  }
  return out;
}

double angular_offset(double gaze_x, double gaze_y, double target_x, double target_y) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double g[3] = {std::tan(gaze_x * kDeg), std::tan(gaze_y * kDeg), 1.0};
  const double t[3] = {std::tan(target_x * kDeg), std::tan(target_y * kDeg), 1.0};
  const double gn = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
  const double tn = std::sqrt(t[0] * t[0] + t[1] * t[1] + t[2] * t[2]);
  if (!(gn > 0.0) || !(tn > 0.0) || !std::isfinite(gn) || !std::isfinite(tn)) {
    throw Error(ErrorCode::kDegenerateVector, "gaze or target direction is degenerate");
  }
  // atan2(|g x t|, g . t) is the same angle as acos of the normalized dot
  // product but stays accurate near zero.
  const double cx = g[1] * t[2] - g[2] * t[1];
  const double cy = g[2] * t[0] - g[0] * t[2];
  const double cz = g[0] * t[1] - g[1] * t[0];
  const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
  const double dot = g[0] * t[0] + g[1] * t[1] + g[2] * t[2];
  return std::atan2(cross, dot) / kDeg;
}

double success_rate(std::span<const InteractionOutcome> outcomes, std::size_t total_targets) {
  if (total_targets == 0) return 0.0;
  const auto valid = std::count_if(outcomes.begin(), outcomes.end(),
                                   [](const InteractionOutcome& o) { return o.valid; });
  return 100.0 * static_cast<double>(valid) / static_cast<double>(total_targets);
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::kEmptyPopulation, "percentile of an empty set");
  if (!(p >= 0.0 && p <= 100.0)) throw Error(ErrorCode::kInvalidArgument, "percentile out of range");
  std::sort(values.begin(), values.end());
  const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  return values[lo] + (rank - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

AccuracySummary summarize_accuracy(const std::map<std::string, std::vector<double>>& offsets) {
  AccuracySummary summary;
  std::vector<double> e50s;
  std::vector<double> e95s;
  for (const auto& [user, values] : offsets) {
    if (values.empty()) {
      summary.excluded_users.push_back(user);
      continue;
    }
    const double e50 = percentile(values, 50.0);
    const double e95 = percentile(values, 95.0);
    summary.per_user_e50[user] = e50;
    summary.per_user_e95[user] = e95;
    e50s.push_back(e50);
    e95s.push_back(e95);
  }
  if (e50s.empty()) {
    throw Error(ErrorCode::kEmptyPopulation, "no user has a valid interaction");
  }
  summary.u50_e50 = percentile(e50s, 50.0);
  summary.u95_e95 = percentile(e95s, 95.0);
  return summary;
}

std::vector<InteractionOutcome> simulate_interactions(const Recording& rec,
                                                      const Classification& cls,
                                                      InteractionParams params) {
  std::vector<InteractionOutcome> outcomes;
  for (const auto& w : segment_by_target(rec, params.window_ms)) {
    outcomes.push_back(rank1_fixation(cls.fixations, w, params.dwell_ms));
  }
  return outcomes;
}

void write_outcomes_csv(const std::string& path, std::span<const InteractionOutcome> outcomes) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path);
  os << "target_id,valid,trigger_x,trigger_y,offset_dva\n" << std::setprecision(10);
  for (const auto& o : outcomes) {
    os << o.target_id << ',' << (o.valid ? 1 : 0) << ',';
    if (o.valid) os << *o.trigger_x << ',' << *o.trigger_y << ',' << *o.offset_dva;
    else os << ",,";
    os << '\n';
  }
}

}  // namespace gazepriv
