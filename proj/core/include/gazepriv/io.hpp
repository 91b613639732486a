#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gazepriv/signal.hpp"

namespace gazepriv {

// Default filename convention S<subject>_<session>_<task>.csv.
inline constexpr const char* kDefaultFilenamePattern = R"(^S_?([^_]+)_([^_]+)_([^_.]+)\.csv$)";

struct RecordingFile {
  std::filesystem::path path;
  std::string subject_id;
  std::string session_id;
  std::string task_tag;
};

// Parses `t_ms,x_dva,y_dva[,target_x_dva,target_y_dva]` with a header row.
// "NaN" (any case) marks missing gaze. A change of target coordinates
// starts a new TargetEvent. fs is estimated from the median timestamp step
// unless given. Throws kParseError (file:line:column) / kSchemaError.
Recording read_recording_csv(const std::filesystem::path& path,
                             std::optional<double> fs = std::nullopt);
Recording parse_recording_csv(const std::string& text, const std::string& source_name,
                              std::optional<double> fs = std::nullopt);

// Writes the same schema; target columns are emitted when targets exist.
void write_recording_csv(const std::filesystem::path& path, const Recording& rec);

// Lists matching CSV files under `root` (or `root` itself when it is a
// file), sorted by path. Capture groups 1-3 give subject, session, task.
std::vector<RecordingFile> discover_recordings(const std::filesystem::path& root,
                                               const std::string& filename_pattern =
                                                   kDefaultFilenamePattern);

Recording load_recording(const RecordingFile& file, std::optional<double> fs = std::nullopt);

// Nominal rate from the median timestamp difference, snapped to an integer
// when within 0.5 % of one.
double estimate_rate(const std::vector<GazeSample>& samples);

// Environment variable consulted for the default dataset root.
inline constexpr const char* kDataRootEnv = "GAZEPRIV_DATA_ROOT";

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace gazepriv
