#include "gazepriv/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gazepriv/io.hpp"
#include "gazepriv/rng.hpp"

namespace gazepriv::synth {
namespace {

// Targets stay well inside the screen so that overshoot and drift never
// leave it.
constexpr double kTargetXMax = 15.0;
constexpr double kTargetYMin = -10.0;
constexpr double kTargetYMax = 8.0;

struct Point {
  double x, y;
};

Point random_target(Rng& rng) {
  std::uniform_real_distribution<double> ux(-kTargetXMax, kTargetXMax);
  std::uniform_real_distribution<double> uy(kTargetYMin, kTargetYMax);
  const double x = ux(rng.engine());
  const double y = uy(rng.engine());
  return {x, y};
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng.engine());
}

// Minimum-jerk position profile on [0, 1].
double min_jerk(double tau) {
  tau = std::clamp(tau, 0.0, 1.0);
  return tau * tau * tau * (10.0 - 15.0 * tau + 6.0 * tau * tau);
}

}  // namespace

Recording ran_teleport(const RanLayout& layout) {
  Rng rng(layout.seed);
  Recording rec;
  rec.fs = layout.fs;
  rec.subject_id = "synthetic";
  rec.session_id = "1";
  rec.task_tag = "RAN";
  const auto per_target =
      static_cast<std::size_t>(std::llround(layout.target_interval_ms * layout.fs / 1000.0));
  const std::size_t n = per_target * static_cast<std::size_t>(layout.targets);
  rec.samples.reserve(n);

  std::vector<Point> targets, parking;
  for (int k = 0; k < layout.targets; ++k) {
    const Point t = random_target(rng);
    targets.push_back(t);
    // Opposite half of the screen, at least several degrees away.
    parking.push_back({t.x > 0 ? t.x - 12.0 : t.x + 12.0, t.y > -1.0 ? t.y - 6.0 : t.y + 6.0});
    rec.targets.push_back({k * layout.target_interval_ms, t.x, t.y, k});
  }
  Point gaze{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double t_ms = static_cast<double>(i) * 1000.0 / layout.fs;
    const auto k = static_cast<std::size_t>(i / per_target);
    const double since = t_ms - rec.targets[k].onset_ms;
    if (since >= layout.reaction_ms + layout.dwell_ms) gaze = parking[k];
    else if (since >= layout.reaction_ms) gaze = targets[k];
    rec.samples.push_back(GazeSample::at(t_ms, gaze.x, gaze.y));
  }
  return rec;
}

SubjectProfile random_profile(std::uint64_t seed) {
  Rng rng(seed);
  SubjectProfile p;
  p.noise_dva = uniform(rng, 0.002, 0.006);
  p.tremor_hz = uniform(rng, 60.0, 100.0);
  p.tremor_dva = uniform(rng, 0.002, 0.008);
  p.drift_deg_s = uniform(rng, 0.1, 0.6);
  p.saccade_speed = uniform(rng, 0.7, 1.3);
  p.overshoot = uniform(rng, 0.0, 0.12);
  p.reaction_ms = uniform(rng, 150.0, 280.0);
  p.landing_error_dva = uniform(rng, 0.1, 0.5);
  return p;
}

Recording subject_recording(const SubjectProfile& profile, const SubjectRecordingSpec& spec,
                            const std::string& subject_id, const std::string& session_id) {
  Rng rng(spec.seed);
  Rng target_rng = rng.split();
  Rng motor_rng = rng.split();
  std::normal_distribution<double> unit(0.0, 1.0);

  Recording rec;
  rec.fs = spec.fs;
  rec.subject_id = subject_id;
  rec.session_id = session_id;
  rec.task_tag = "RAN";
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_ms * spec.fs / 1000.0));
  const double dt_ms = 1000.0 / spec.fs;
  const int target_count =
      static_cast<int>(std::ceil(spec.duration_ms / spec.target_interval_ms));
  for (int k = 0; k < target_count; ++k) {
    const Point t = random_target(target_rng);
    rec.targets.push_back({k * spec.target_interval_ms, t.x, t.y, k});
  }

  // Saccade plan for the current target.
  struct Saccade {
    double start_ms = 0, duration_ms = 0;
    Point from{0, 0}, peak{0, 0}, land{0, 0};
  };
  constexpr double kGlissadeMs = 20.0;
  std::optional<Saccade> sac;
  std::size_t next_target = 0;
  double next_start = 0.0;
  Point eye{0.0, 0.0};
  Point drift{0.0, 0.0};
  Point drift_v{0.0, 0.0};
  const double phase_x = uniform(motor_rng, 0.0, 2.0 * std::numbers::pi);
  const double phase_y = uniform(motor_rng, 0.0, 2.0 * std::numbers::pi);
  // Drift velocity is an Ornstein-Uhlenbeck process with stationary std
  // drift_deg_s, so drift stays smooth at the sample level.
  constexpr double kDriftTauS = 0.2;
  const double drift_a = std::exp(-1.0 / (kDriftTauS * spec.fs));
  const double drift_b = profile.drift_deg_s * std::sqrt(1.0 - drift_a * drift_a);

  rec.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t_ms = static_cast<double>(i) * dt_ms;
    if (next_target < rec.targets.size() && t_ms >= rec.targets[next_target].onset_ms) {
      const double jitter = 15.0 * unit(motor_rng.engine());
      next_start = t_ms + std::max(80.0, profile.reaction_ms + jitter);
      ++next_target;
    }
    if (next_target > 0 && next_start > 0.0 && t_ms >= next_start) {
      const auto& tgt = rec.targets[next_target - 1];
      Saccade s;
      s.start_ms = t_ms;
      s.from = {eye.x + drift.x, eye.y + drift.y};
      s.land = {tgt.x + profile.landing_error_dva * unit(motor_rng.engine()),
                tgt.y + profile.landing_error_dva * unit(motor_rng.engine())};
      const double dx = s.land.x - s.from.x;
      const double dy = s.land.y - s.from.y;
      const double amplitude = std::hypot(dx, dy);
      s.peak = {s.land.x + profile.overshoot * dx, s.land.y + profile.overshoot * dy};
      s.duration_ms = (2.2 * amplitude + 21.0) / profile.saccade_speed;
      sac = s;
      eye = s.from;
      drift = {0.0, 0.0};
      next_start = 0.0;
    }

    Point pos = eye;
    if (sac) {
      const double el = t_ms - sac->start_ms;
      if (el < sac->duration_ms) {
        const double f = min_jerk(el / sac->duration_ms);
        pos = {sac->from.x + f * (sac->peak.x - sac->from.x),
               sac->from.y + f * (sac->peak.y - sac->from.y)};
      } else if (el < sac->duration_ms + kGlissadeMs) {
        const double f = min_jerk((el - sac->duration_ms) / kGlissadeMs);
        pos = {sac->peak.x + f * (sac->land.x - sac->peak.x),
               sac->peak.y + f * (sac->land.y - sac->peak.y)};
      } else {
        eye = sac->land;
        pos = eye;
        sac.reset();
      }
    }
    if (!sac) {
      drift_v.x = drift_a * drift_v.x + drift_b * unit(motor_rng.engine());
      drift_v.y = drift_a * drift_v.y + drift_b * unit(motor_rng.engine());
      drift.x += drift_v.x / spec.fs;
      drift.y += drift_v.y / spec.fs;
      pos = {eye.x + drift.x, eye.y + drift.y};
    }
    const double ts = t_ms / 1000.0;
    const double w = 2.0 * std::numbers::pi * profile.tremor_hz * ts;
    pos.x += profile.tremor_dva * std::sin(w + phase_x) + profile.noise_dva * unit(motor_rng.engine());
    pos.y += profile.tremor_dva * std::sin(w + phase_y) + profile.noise_dva * unit(motor_rng.engine());
    rec.samples.push_back(GazeSample::at(t_ms, pos.x, pos.y));
  }
  return rec;
}

std::vector<Recording> corpus(const CorpusSpec& spec) {
  std::vector<Recording> out;
  for (int s = 1; s <= spec.subjects; ++s) {
    const std::string subject = std::to_string(s);
    const SubjectProfile base = random_profile(derive_seed(spec.seed, subject, "profile"));
    for (int k = 1; k <= spec.sessions; ++k) {
      const std::string session = std::to_string(k);
      const std::uint64_t seed = derive_seed(spec.seed, subject, session);
      // Small day-to-day variation around the subject's traits. Drift is a
      // state of the session, not a trait of the subject.
      Rng jitter(mix64(seed));
      SubjectProfile p = base;
      p.noise_dva *= uniform(jitter, 0.95, 1.05);
      p.saccade_speed *= uniform(jitter, 0.95, 1.05);
      p.drift_deg_s = uniform(jitter, 0.1, 0.6);
      SubjectRecordingSpec rs;
      rs.duration_ms = spec.duration_ms;
      rs.seed = seed;
      out.push_back(subject_recording(p, rs, subject, session));
    }
  }
  return out;
}

void write_dataset(const std::filesystem::path& dir, const std::vector<Recording>& recordings) {
  std::filesystem::create_directories(dir);
  for (const auto& rec : recordings) {
    write_recording_csv(dir / ("S" + rec.subject_id + "_" + rec.session_id + "_" + rec.task_tag + ".csv"),
                        rec);
  }
}

}  // namespace gazepriv::synth
