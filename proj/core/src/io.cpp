#include "gazepriv/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

#include "gazepriv/error.hpp"

namespace gazepriv {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string_view trim_view(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Cells are views into `line`; `out` is reused across rows.
void split(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim_view(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, std::size_t column,
                             const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line << ":" << column << ": " << what;
  throw Error(ErrorCode::kParseError, msg.str());
}

bool is_nan_literal(std::string_view cell) {
  return cell.size() == 3 && (cell[0] | 0x20) == 'n' && (cell[1] | 0x20) == 'a' &&
         (cell[2] | 0x20) == 'n';
}

// Returns NaN for the literal "nan" in any case.
double parse_number(std::string_view cell, const std::string& source, std::size_t line,
                    std::size_t column) {
  if (is_nan_literal(cell)) return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    parse_fail(source, line, column, "not a number: '" + std::string(cell) + "'");
  }
  return value;
}

// Iterates over the lines of a buffer without copying.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}
  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const auto nl = text_.find('\n', pos_);
    const auto end = nl == std::string_view::npos ? text_.size() : nl;
    line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    return true;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

void append_number(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

double estimate_rate(const std::vector<GazeSample>& samples) {
  if (samples.size() < 2) return 1000.0;
  std::vector<double> dt;
  dt.reserve(samples.size() - 1);
  for (std::size_t i = 1; i < samples.size(); ++i) dt.push_back(samples[i].t_ms - samples[i - 1].t_ms);
  std::nth_element(dt.begin(), dt.begin() + dt.size() / 2, dt.end());
  const double step = dt[dt.size() / 2];
  if (!(step > 0.0)) throw Error(ErrorCode::kParseError, "timestamps do not advance");
  const double fs = 1000.0 / step;
  const double snapped = std::round(fs);
  return std::abs(fs - snapped) <= 0.005 * snapped ? snapped : fs;
}

Recording parse_recording_csv(const std::string& text, const std::string& source_name,
                              std::optional<double> fs) {
  LineReader reader(text);
  std::string_view line;
  std::size_t line_no = 0;
  std::vector<std::string_view> cells;
  std::vector<std::string> header;
  while (reader.next(line)) {
    ++line_no;
    std::string_view row = trim_view(line);
    if (line_no == 1 && row.substr(0, 3) == "\xEF\xBB\xBF") row.remove_prefix(3);
    if (!row.empty()) {
      split(row, cells);
      header.assign(cells.begin(), cells.end());
      break;
    }
  }
  static const std::vector<std::string> kColumns{"t_ms", "x_dva", "y_dva", "target_x_dva",
                                                 "target_y_dva"};
  const bool numeric_first = !header.empty() && !header[0].empty() &&
                             (std::isdigit(static_cast<unsigned char>(header[0][0])) ||
                              header[0][0] == '-' || header[0][0] == '+' || header[0][0] == '.');
  if (header.empty() || numeric_first) {
    throw Error(ErrorCode::kSchemaError, source_name + ": missing header row");
  }
  if (header.size() != 3 && header.size() != 5) {
    throw Error(ErrorCode::kSchemaError,
                source_name + ": header must have 3 or 5 columns (t_ms,x_dva,y_dva[,target_x_dva,"
                              "target_y_dva])");
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (lower(header[c]) != kColumns[c]) {
      throw Error(ErrorCode::kSchemaError, source_name + ": header column " +
                                               std::to_string(c + 1) + " must be '" +
                                               kColumns[c] + "', found '" + header[c] + "'");
    }
  }
  const bool has_targets = header.size() == 5;

  Recording rec;
  double cur_tx = std::numeric_limits<double>::quiet_NaN();
  double cur_ty = std::numeric_limits<double>::quiet_NaN();
  rec.samples.reserve(text.size() / 40);
  while (reader.next(line)) {
    ++line_no;
    const std::string_view row = trim_view(line);
    if (row.empty()) continue;
    split(row, cells);
    if (cells.size() != header.size()) {
      parse_fail(source_name, line_no, std::min(cells.size(), header.size()) + 1,
                 "expected " + std::to_string(header.size()) + " fields, found " +
                     std::to_string(cells.size()));
    }
    const double t = parse_number(cells[0], source_name, line_no, 1);
    if (!std::isfinite(t)) parse_fail(source_name, line_no, 1, "timestamp must be finite");
    if (!rec.samples.empty() && t < rec.samples.back().t_ms) {
      parse_fail(source_name, line_no, 1, "timestamps must be non-decreasing");
    }
    const double x = parse_number(cells[1], source_name, line_no, 2);
    const double y = parse_number(cells[2], source_name, line_no, 3);
    if (std::isfinite(x) && std::isfinite(y)) {
      rec.samples.push_back(GazeSample::at(t, x, y));
    } else {
      rec.samples.push_back(GazeSample::missing(t));
    }
    if (has_targets) {
      const double tx = parse_number(cells[3], source_name, line_no, 4);
      const double ty = parse_number(cells[4], source_name, line_no, 5);
      const bool shown = std::isfinite(tx) && std::isfinite(ty);
      if (shown && !(tx == cur_tx && ty == cur_ty)) {
        TargetEvent ev;
        ev.onset_ms = t - rec.samples.front().t_ms;
        ev.x = tx;
        ev.y = ty;
        ev.id = static_cast<int>(rec.targets.size());
        if (!rec.targets.empty() && ev.onset_ms <= rec.targets.back().onset_ms) {
          parse_fail(source_name, line_no, 4, "target changes twice at the same timestamp");
        }
        rec.targets.push_back(ev);
      }
      cur_tx = shown ? tx : std::numeric_limits<double>::quiet_NaN();
      cur_ty = shown ? ty : std::numeric_limits<double>::quiet_NaN();
    }
  }
  if (rec.samples.empty()) {
    throw Error(ErrorCode::kParseError, source_name + ": no data rows");
  }
  rec.t_origin_ms = rec.samples.front().t_ms;
  rec.fs = fs ? *fs : estimate_rate(rec.samples);
  return rec;
}

Recording read_recording_csv(const std::filesystem::path& path, std::optional<double> fs) {
  return parse_recording_csv(read_text_file(path), path.string(), fs);
}

void write_recording_csv(const std::filesystem::path& path, const Recording& rec) {
  const bool targets = !rec.targets.empty();
  std::string out = targets ? "t_ms,x_dva,y_dva,target_x_dva,target_y_dva\n" : "t_ms,x_dva,y_dva\n";
  out.reserve(rec.samples.size() * (targets ? 90 : 50));
  std::size_t next = 0;
  const TargetEvent* current = nullptr;
  for (const auto& s : rec.samples) {
    while (next < rec.targets.size() && rec.targets[next].onset_ms <= s.t_ms - rec.t_origin_ms) {
      current = &rec.targets[next++];
    }
    append_number(out, s.t_ms);
    out += ',';
    if (s.valid) {
      append_number(out, s.x);
      out += ',';
      append_number(out, s.y);
    } else {
      out += "NaN,NaN";
    }
    if (targets) {
      if (current) {
        out += ',';
        append_number(out, current->x);
        out += ',';
        append_number(out, current->y);
      } else {
        out += ",NaN,NaN";
      }
    }
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<RecordingFile> discover_recordings(const std::filesystem::path& root,
                                               const std::string& filename_pattern) {
  namespace fs = std::filesystem;
  std::regex pattern;
  try {
    pattern = std::regex(filename_pattern);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::kConfigError, "bad filename pattern: " + std::string(e.what()));
  }
  auto describe = [&](const fs::path& p) -> std::optional<RecordingFile> {
    std::smatch m;
    const std::string name = p.filename().string();
    if (std::regex_match(name, m, pattern) && m.size() >= 3) {
      return RecordingFile{p, m[1].str(), m[2].str(), m.size() >= 4 ? m[3].str() : ""};
    }
    return std::nullopt;
  };
  std::vector<RecordingFile> files;
  std::error_code ec;
  if (fs::is_regular_file(root, ec)) {
    auto f = describe(root);
    files.push_back(f ? *f : RecordingFile{root, root.stem().string(), "1", ""});
    return files;
  }
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::kIoError, "dataset path " + root.string() + " does not exist");
  }
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    if (auto f = describe(entry.path())) files.push_back(*f);
  }
  std::sort(files.begin(), files.end(),
            [](const RecordingFile& a, const RecordingFile& b) { return a.path < b.path; });
  return files;
}

Recording load_recording(const RecordingFile& file, std::optional<double> fs) {
  Recording rec = read_recording_csv(file.path, fs);
  rec.subject_id = file.subject_id;
  rec.session_id = file.session_id;
  rec.task_tag = file.task_tag;
  return rec;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  os << text;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace gazepriv
