#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gazepriv {

// One monocular gaze observation. Positions are in degrees of visual angle
// (dva). A sample is valid or missing as a whole; missing samples carry NaN
// coordinates so that accidental arithmetic on them is visible.
struct GazeSample {
  double t_ms = 0.0;
  double x = std::numeric_limits<double>::quiet_NaN();
  double y = std::numeric_limits<double>::quiet_NaN();
  bool valid = false;

  static GazeSample at(double t_ms, double x, double y) {
    return GazeSample{t_ms, x, y, true};
  }
  static GazeSample missing(double t_ms) {
    return GazeSample{t_ms, std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN(), false};
  }

  friend bool operator==(const GazeSample& a, const GazeSample& b);
};

struct TargetEvent {
  double onset_ms = 0.0;  // from recording start
  double x = 0.0;
  double y = 0.0;
  int id = 0;
};

struct ScreenBounds {
  // GazeBase screen extent.
  double x_min = -23.3;
  double x_max = 23.3;
  double y_min = -18.5;
  double y_max = 11.7;

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  void validate() const;
};

struct Recording {
  std::vector<GazeSample> samples;
  double fs = 1000.0;
  std::string subject_id;
  std::string session_id;
  std::string task_tag;
  std::vector<TargetEvent> targets;
  // Clock value of the recording start. Target onsets and fixation onsets
  // are measured from here, which keeps them aligned after decimation.
  double t_origin_ms = 0.0;

  // Throws kInvalidArgument when the structural invariants do not hold.
  void validate() const;
};

// Samples outside the closed screen rectangle become missing.
Recording clamp_offscreen(const Recording& rec, const ScreenBounds& bounds = {});

// Missing samples take the most recent valid value; a missing prefix takes
// the first valid value. Throws kAllSamplesMissing.
Recording forward_fill(const Recording& rec);

double data_loss_rate(const Recording& rec);

// clamp_offscreen followed by forward_fill.
Recording preprocess(const Recording& rec, const ScreenBounds& bounds = {});

// Channel views, NaN where missing.
std::vector<double> channel_x(const Recording& rec);
std::vector<double> channel_y(const Recording& rec);

}  // namespace gazepriv
