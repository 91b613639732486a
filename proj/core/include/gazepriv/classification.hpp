#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "gazepriv/movement.hpp"
#include "gazepriv/signal.hpp"

namespace gazepriv {

struct FixationSegment {
  std::size_t start_index = 0;
  std::size_t end_index = 0;  // inclusive
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  double duration_ms = 0.0;
  double onset_ms = 0.0;  // from recording start
};

struct Classification {
  std::vector<MovementLabel> labels;
  std::vector<FixationSegment> fixations;
};

// v_i = (p_i - p_{i-1}) * fs, v_0 = 0.
std::vector<double> velocity(std::span<const double> positions, double fs);

struct IdtParams {
  double dispersion_threshold = 0.5;  // dva, (max-min) summed over channels
  double min_duration_ms = 32.0;
};

// Streaming dispersion-threshold identification. A fixation is emitted when
// the open window is long enough and the next sample would break the
// dispersion limit; labels are final once emitted and lag the input by at
// most the open window.
class IdtClassifier {
 public:
  IdtClassifier(IdtParams params, double fs, double t_origin_ms = 0.0);

  void push(double t_ms, double x, double y);
  // Closes the open window at end of stream.
  void finish();

  const std::vector<MovementLabel>& labels() const { return labels_; }
  const std::vector<FixationSegment>& fixations() const { return fixations_; }
  std::size_t pushed() const { return pushed_; }

 private:
  struct Point {
    double t_ms, x, y;
  };
  double window_dispersion_with(const Point& p) const;
  void recompute_extent();
  void emit_fixation();
  void drop_front();

  IdtParams params_;
  double fs_;
  double t_origin_ms_;
  std::size_t min_samples_;
  std::size_t pushed_ = 0;
  std::size_t window_start_ = 0;
  std::deque<Point> window_;
  double x_min_ = 0, x_max_ = 0, y_min_ = 0, y_max_ = 0;
  std::vector<MovementLabel> labels_;
  std::vector<FixationSegment> fixations_;
};

struct IkfParams {
  double chi_square = 3.75;
  int window = 5;
  // Normalizer of squared velocity residuals, (deg/s)^2. Also the
  // measurement variance of the velocity filter.
  double deviation = 1000.0;
  // Random-walk variance of the predicted velocity per sample, (deg/s)^2.
  double process_noise = 1e-3;
};

// Kalman-filter identification. Each channel's velocity is tracked by a
// constant-velocity Kalman filter fed with finite-difference velocity; the
// statistic sum over the last `window` samples of |v_obs - v_pred|^2 /
// deviation is compared with chi_square. Labels are emitted per sample
// without deferral; the first window-1 samples are UNKNOWN.
class IkfClassifier {
 public:
  IkfClassifier(IkfParams params, double fs, double t_origin_ms = 0.0);

  MovementLabel push(double t_ms, double x, double y);
  void finish();

  const std::vector<MovementLabel>& labels() const { return labels_; }
  const std::vector<FixationSegment>& fixations() const { return fixations_; }
  double last_statistic() const { return last_stat_; }

 private:
  struct VelocityFilter {
    double estimate = 0.0;
    double variance = 0.0;
  };
  void close_run();

  IkfParams params_;
  double fs_;
  double t_origin_ms_;
  std::size_t index_ = 0;
  bool have_prev_ = false;
  double prev_x_ = 0, prev_y_ = 0;
  VelocityFilter fx_, fy_;
  std::deque<double> residuals_;
  double residual_sum_ = 0.0;
  double last_stat_ = 0.0;
  std::vector<MovementLabel> labels_;
  std::vector<FixationSegment> fixations_;
  // Open run of consecutive FIXATION labels.
  bool in_run_ = false;
  std::size_t run_start_ = 0;
  double run_sum_x_ = 0, run_sum_y_ = 0, run_onset_ms_ = 0;
};

// Batch helpers over a forward-filled recording.
Classification idt_classify(const Recording& rec, IdtParams params = {});
Classification ikf_classify(const Recording& rec, IkfParams params = {});

void write_labels_csv(const std::string& path, std::span<const MovementLabel> labels);

}  // namespace gazepriv
