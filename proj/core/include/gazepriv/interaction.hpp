#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazepriv/classification.hpp"
#include "gazepriv/signal.hpp"

namespace gazepriv {

struct TargetWindow {
  TargetEvent target;
  double start_ms = 0.0;  // from recording start, inclusive
  double end_ms = 0.0;    // exclusive
  std::size_t first_sample = 0;
  std::size_t sample_count = 0;
};

struct InteractionOutcome {
  int target_id = 0;
  bool valid = false;
  std::optional<double> trigger_x;
  std::optional<double> trigger_y;
  std::optional<double> offset_dva;
  std::size_t fixation_count = 0;
};

struct AccuracySummary {
  std::map<std::string, double> per_user_e50;
  std::map<std::string, double> per_user_e95;
  double u50_e50 = 0.0;
  double u95_e95 = 0.0;
  double success_rate = 0.0;
  // Users without a single valid interaction; excluded from U-level stats.
  std::vector<std::string> excluded_users;
};

struct InteractionParams {
  double window_ms = 1000.0;
  double dwell_ms = 100.0;
};

// One window per target: [onset, onset + window_ms), cut at the next onset.
// Throws kNoTargets.
std::vector<TargetWindow> segment_by_target(const Recording& rec,
                                            double window_ms = 1000.0);

// Among fixations that start inside the window and last at least dwell_ms,
// picks the one whose centroid is closest to the target (earliest onset on
// ties, then lowest start index). Independent of the input order.
InteractionOutcome rank1_fixation(std::span<const FixationSegment> fixations,
                                  const TargetWindow& window, double dwell_ms = 100.0);

// Angle in degrees between the viewing directions of two dva positions. A
// position (a, b) maps to the direction (tan a, tan b, 1).
double angular_offset(double gaze_x, double gaze_y, double target_x, double target_y);

double success_rate(std::span<const InteractionOutcome> outcomes, std::size_t total_targets);

// Inclusive linear interpolation between closest ranks; p in [0, 100].
double percentile(std::vector<double> values, double p);

// Throws kEmptyPopulation when no user has a valid offset. success_rate is
// left at 0 here; callers that know the target count fill it in.
AccuracySummary summarize_accuracy(const std::map<std::string, std::vector<double>>& offsets);

// Full per-recording simulation over a precomputed classification.
std::vector<InteractionOutcome> simulate_interactions(const Recording& rec,
                                                      const Classification& cls,
                                                      InteractionParams params = {});

void write_outcomes_csv(const std::string& path, std::span<const InteractionOutcome> outcomes);

}  // namespace gazepriv
