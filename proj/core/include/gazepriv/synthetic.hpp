#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gazepriv/signal.hpp"

namespace gazepriv::synth {

struct RanLayout {
  int targets = 100;
  double target_interval_ms = 1000.0;
  double fs = 1000.0;
  double reaction_ms = 200.0;
  double dwell_ms = 150.0;
  std::uint64_t seed = 1;
};

// Noise-free random-saccade recording: gaze jumps onto each target after
// the reaction time, stays `dwell_ms`, then jumps to an off-target parking
// spot until the next onset.
Recording ran_teleport(const RanLayout& layout);

// Oculomotor traits that make a synthetic subject identifiable.
struct SubjectProfile {
  double noise_dva = 0.004;       // white positional noise
  double tremor_hz = 80.0;
  double tremor_dva = 0.005;
  double drift_deg_s = 0.3;
  double saccade_speed = 1.0;     // main-sequence speed multiplier
  double overshoot = 0.05;        // fraction of amplitude
  double reaction_ms = 200.0;
  double landing_error_dva = 0.3;
};

SubjectProfile random_profile(std::uint64_t seed);

struct SubjectRecordingSpec {
  double duration_ms = 20000.0;
  double fs = 1000.0;
  double target_interval_ms = 1000.0;
  std::uint64_t seed = 1;
};

// Random-saccade task driven by a profile: smooth saccades to each target,
// fixational noise, tremor and drift. Targets are recorded.
Recording subject_recording(const SubjectProfile& profile, const SubjectRecordingSpec& spec,
                            const std::string& subject_id, const std::string& session_id);

struct CorpusSpec {
  int subjects = 12;
  int sessions = 2;
  double duration_ms = 20000.0;
  std::uint64_t seed = 7;
};

std::vector<Recording> corpus(const CorpusSpec& spec);

// Writes recordings as S<subject>_<session>_<task>.csv into `dir`.
void write_dataset(const std::filesystem::path& dir, const std::vector<Recording>& recordings);

}  // namespace gazepriv::synth
