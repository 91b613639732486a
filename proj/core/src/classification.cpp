#include "gazepriv/classification.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gazepriv/error.hpp"

namespace gazepriv {

std::vector<double> velocity(std::span<const double> positions, double fs) {
  std::vector<double> v(positions.size(), 0.0);
  for (std::size_t i = 1; i < positions.size(); ++i) {
    v[i] = (positions[i] - positions[i - 1]) * fs;
  }
  return v;
}

IdtClassifier::IdtClassifier(IdtParams params, double fs, double t_origin_ms)
    : params_(params), fs_(fs), t_origin_ms_(t_origin_ms) {
  if (!(fs > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sampling rate must be positive");
  if (!(params.dispersion_threshold > 0.0) || params.min_duration_ms < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "IDT needs a positive dispersion threshold");
  }
  // Smallest sample count whose duration n * 1000 / fs reaches the minimum.
  const double exact = params.min_duration_ms * fs / 1000.0;
  min_samples_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(exact - 1e-9)));
}

double IdtClassifier::window_dispersion_with(const Point& p) const {
  return (std::max(x_max_, p.x) - std::min(x_min_, p.x)) +
         (std::max(y_max_, p.y) - std::min(y_min_, p.y));
}

void IdtClassifier::recompute_extent() {
  if (window_.empty()) return;
  x_min_ = x_max_ = window_.front().x;
  y_min_ = y_max_ = window_.front().y;
  for (const auto& p : window_) {
    x_min_ = std::min(x_min_, p.x);
    x_max_ = std::max(x_max_, p.x);
    y_min_ = std::min(y_min_, p.y);
    y_max_ = std::max(y_max_, p.y);
  }
}

void IdtClassifier::emit_fixation() {
  FixationSegment seg;
  seg.start_index = window_start_;
  seg.end_index = window_start_ + window_.size() - 1;
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& p : window_) {
    sx += p.x;
    sy += p.y;
  }
  const auto n = static_cast<double>(window_.size());
  seg.centroid_x = sx / n;
  seg.centroid_y = sy / n;
  seg.duration_ms = n * 1000.0 / fs_;
  seg.onset_ms = window_.front().t_ms - t_origin_ms_;
  fixations_.push_back(seg);
  labels_.insert(labels_.end(), window_.size(), MovementLabel::kFixation);
  window_start_ += window_.size();
  window_.clear();
}

void IdtClassifier::drop_front() {
  window_.pop_front();
  labels_.push_back(MovementLabel::kSaccade);
  ++window_start_;
  recompute_extent();
}

void IdtClassifier::push(double t_ms, double x, double y) {
  const Point p{t_ms, x, y};
  ++pushed_;
  if (window_.empty()) {
    window_.push_back(p);
    x_min_ = x_max_ = x;
    y_min_ = y_max_ = y;
    return;
  }
  if (window_dispersion_with(p) <= params_.dispersion_threshold) {
    window_.push_back(p);
    x_min_ = std::min(x_min_, x);
    x_max_ = std::max(x_max_, x);
    y_min_ = std::min(y_min_, y);
    y_max_ = std::max(y_max_, y);
    return;
  }
  if (window_.size() >= min_samples_) {
    emit_fixation();
  } else {
    while (!window_.empty() && window_dispersion_with(p) > params_.dispersion_threshold) {
      drop_front();
    }
  }
  if (window_.empty()) {
    x_min_ = x_max_ = x;
    y_min_ = y_max_ = y;
  } else {
    x_min_ = std::min(x_min_, x);
    x_max_ = std::max(x_max_, x);
    y_min_ = std::min(y_min_, y);
    y_max_ = std::max(y_max_, y);
  }
  window_.push_back(p);
}

void IdtClassifier::finish() {
  if (window_.size() >= min_samples_) {
    emit_fixation();
    return;
  }
  while (!window_.empty()) {
    window_.pop_front();
    labels_.push_back(MovementLabel::kSaccade);
    ++window_start_;
  }
}

IkfClassifier::IkfClassifier(IkfParams params, double fs, double t_origin_ms)
    : params_(params), fs_(fs), t_origin_ms_(t_origin_ms) {
  if (!(fs > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sampling rate must be positive");
  if (params.window < 1 || !(params.deviation > 0.0) || !(params.chi_square > 0.0) ||
      params.process_noise < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid IKF parameters");
  }
}

MovementLabel IkfClassifier::push(double t_ms, double x, double y) {
  const std::size_t idx = index_++;
  double vx = 0.0;
  double vy = 0.0;
  if (have_prev_) {
    vx = (x - prev_x_) * fs_;
    vy = (y - prev_y_) * fs_;
  }
  have_prev_ = true;
  prev_x_ = x;
  prev_y_ = y;

  // Predict with the constant-velocity model, score the residual against
  // the prediction, then fold the observation in.
  auto step = [&](VelocityFilter& f, double observed) {
    f.variance += params_.process_noise;
    const double residual = observed - f.estimate;
    const double gain = f.variance / (f.variance + params_.deviation);
    f.estimate += gain * residual;
    f.variance *= (1.0 - gain);
    return residual;
  };
  const double rx = step(fx_, vx);
  const double ry = step(fy_, vy);

  residuals_.push_back(rx * rx + ry * ry);
  if (residuals_.size() > static_cast<std::size_t>(params_.window)) residuals_.pop_front();

  MovementLabel label = MovementLabel::kUnknown;
  if (idx + 1 >= static_cast<std::size_t>(params_.window)) {
    double sum = 0.0;
    for (double r : residuals_) sum += r;
    last_stat_ = sum / params_.deviation;
    label = last_stat_ < params_.chi_square ? MovementLabel::kFixation : MovementLabel::kSaccade;
  }
  labels_.push_back(label);

  if (label == MovementLabel::kFixation) {
    if (!in_run_) {
      in_run_ = true;
      run_start_ = idx;
      run_sum_x_ = run_sum_y_ = 0.0;
      run_onset_ms_ = t_ms - t_origin_ms_;
    }
    run_sum_x_ += x;
    run_sum_y_ += y;
  } else if (in_run_) {
    close_run();
  }
  return label;
}

void IkfClassifier::close_run() {
  if (!in_run_) return;
  FixationSegment seg;
  seg.start_index = run_start_;
  seg.end_index = labels_.back() == MovementLabel::kFixation ? index_ - 1 : index_ - 2;
  const auto n = static_cast<double>(seg.end_index - seg.start_index + 1);
  seg.centroid_x = run_sum_x_ / n;
  seg.centroid_y = run_sum_y_ / n;
  seg.duration_ms = n * 1000.0 / fs_;
  seg.onset_ms = run_onset_ms_;
  fixations_.push_back(seg);
  in_run_ = false;
}

void IkfClassifier::finish() { close_run(); }

namespace {

void require_filled(const Recording& rec) {
  for (const auto& s : rec.samples) {
    if (!s.valid) {
      throw Error(ErrorCode::kInvalidArgument,
                  "classification expects a forward-filled stream without missing samples");
    }
  }
}

}  // namespace

Classification idt_classify(const Recording& rec, IdtParams params) {
  require_filled(rec);
  IdtClassifier idt(params, rec.fs, rec.t_origin_ms);
  for (const auto& s : rec.samples) idt.push(s.t_ms, s.x, s.y);
  idt.finish();
  return {idt.labels(), idt.fixations()};
}

Classification ikf_classify(const Recording& rec, IkfParams params) {
  require_filled(rec);
  IkfClassifier ikf(params, rec.fs, rec.t_origin_ms);
  for (const auto& s : rec.samples) ikf.push(s.t_ms, s.x, s.y);
  ikf.finish();
  return {ikf.labels(), ikf.fixations()};
}

void write_labels_csv(const std::string& path, std::span<const MovementLabel> labels) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path);
  os << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) os << i << ',' << to_string(labels[i]) << '\n';
}

}  // namespace gazepriv
