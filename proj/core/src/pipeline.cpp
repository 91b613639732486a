#include "gazepriv/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gazepriv/error.hpp"
#include "gazepriv/privacy.hpp"
#include "gazepriv/rng.hpp"

namespace gazepriv {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
// handled exactly once; results must be written to per-index slots.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t threads = std::min<std::size_t>(std::max(workers, 1), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct ClassifierResult {
  std::size_t fixations = 0;
  std::size_t valid = 0;
  std::size_t targets = 0;
  std::vector<double> offsets;
};

struct RecordingResult {
  bool ok = false;
  std::string error;
  std::vector<ClassifierResult> classifiers;
  std::vector<VelocityWindow> windows;
  std::optional<std::string> window_error;
};

std::string slug(const PrivatizerSpec& spec) {
  std::string s = spec.op;
  for (const auto& [key, value] : spec.params.values()) {
    s += "_" + key + "-";
    if (const double* d = std::get_if<double>(&value)) {
      std::ostringstream os;
      os << *d;
      s += os.str();
    } else {
      s += std::get<std::string>(value);
    }
  }
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return s;
}

std::string recording_stem(const Recording& rec) {
  return "S" + rec.subject_id + "_" + rec.session_id + "_" + rec.task_tag;
}

RecordingResult process_recording(const Recording& rec, const PipelineConfig& config,
                                  const PrivatizerSpec& spec, const fs::path& artifact_dir) {
  RecordingResult r;
  try {
    const Recording pre = preprocess(rec, config.bounds);
    const std::uint64_t seed = derive_seed(config.rng_seed.value_or(0), rec.subject_id,
                                           rec.session_id, rec.task_tag);
    auto op = make_privatizer(spec, pre.fs, seed);
    std::vector<MovementLabel> labels;
    if (op->uses_labels()) labels = classify(pre, config.noise_classifier).labels;
    const Recording out = forward_fill(apply_privatizer(pre, *op, labels).recording);

    const bool artifacts = config.write_recording_artifacts;
    const std::string stem = recording_stem(rec);
    if (artifacts) write_recording_csv(artifact_dir / (stem + ".csv"), out);

    for (const auto& cspec : config.classifiers) {
      ClassifierResult cr;
      const Classification cls = classify(out, cspec);
      cr.fixations = cls.fixations.size();
      if (artifacts) {
        write_labels_csv((artifact_dir / (stem + "." + cspec.name() + "-labels.csv")).string(),
                         cls.labels);
      }
      if (!out.targets.empty()) {
        const auto outcomes = simulate_interactions(out, cls, config.interaction);
        cr.targets = config.total_targets.value_or(outcomes.size());
        for (const auto& o : outcomes) {
          if (!o.valid) continue;
          ++cr.valid;
          cr.offsets.push_back(*o.offset_dva);
        }
        if (artifacts) {
          write_outcomes_csv(
              (artifact_dir / (stem + "." + cspec.name() + "-outcomes.csv")).string(), outcomes);
        }
      }
      r.classifiers.push_back(std::move(cr));
    }

    try {
      r.windows = make_velocity_windows(out);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRateMismatch) throw;
      r.window_error = e.what();
    }
    r.ok = true;
  } catch (const std::exception& e) {
    r = RecordingResult{};
    r.error = e.what();
  }
  return r;
}

std::optional<double> privacy_metric(std::vector<VelocityWindow> windows,
                                     const PipelineConfig& config,
                                     std::vector<std::string>& notes) {
  if (windows.empty()) {
    notes.push_back("rank1_ir: no complete 5000-sample windows");
    return std::nullopt;
  }
  try {
    corpus_zscore(windows);
    const auto embedder = make_embedder(config.embedder);
    std::vector<const VelocityWindow*> enroll, auth;
    for (const auto& w : windows) {
      if (w.session_id == config.split.enroll_session) enroll.push_back(&w);
      else if (w.session_id == config.split.auth_session) auth.push_back(&w);
    }
    if (enroll.empty() || auth.empty()) {
      notes.push_back("rank1_ir: enrollment or authentication session has no windows");
      return std::nullopt;
    }
    std::vector<Embedding> e_emb(enroll.size()), a_emb(auth.size());
    std::vector<std::string> e_sub, a_sub;
    parallel_for(enroll.size() + auth.size(), config.workers, [&](std::size_t i) {
      if (i < enroll.size()) e_emb[i] = embed(*enroll[i], *embedder);
      else a_emb[i - enroll.size()] = embed(*auth[i - enroll.size()], *embedder);
    });
    for (const auto* w : enroll) e_sub.push_back(w->subject_id);
    for (const auto* w : auth) a_sub.push_back(w->subject_id);
    return rank1_ir(similarity_matrix(e_emb, a_emb), ground_truth(e_sub, a_sub));
  } catch (const Error& e) {
    notes.push_back(std::string("rank1_ir: ") + e.what());
    return std::nullopt;
  }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  const auto files = discover_recordings(config.dataset_path, config.filename_pattern);
  if (files.empty()) {
    throw Error(ErrorCode::kIoError, "no recordings found under '" + config.dataset_path + "'");
  }

  PipelineResult result;
  result.ingested = files.size();
  std::vector<std::optional<Recording>> loaded(files.size());
  std::vector<std::string> load_errors(files.size());
  parallel_for(files.size(), config.workers, [&](std::size_t i) {
    try {
      loaded[i] = load_recording(files[i], config.fs);
    } catch (const std::exception& e) {
      load_errors[i] = e.what();
    }
  });
  double nominal_fs = config.fs.value_or(0.0);
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!loaded[i]) {
      std::cerr << "skipping " << files[i].path.string() << ": " << load_errors[i] << "\n";
    } else if (nominal_fs == 0.0) {
      nominal_fs = loaded[i]->fs;
    }
  }
  if (nominal_fs == 0.0) nominal_fs = kWindowRateHz;

  for (const auto& spec : config.privatizers) {
    ReportRow row;
    const VariantLabel label = describe(spec, nominal_fs);
    row.approach = label.approach;
    row.variant = label.variant;
    row.approach_rank = label.approach_rank;
    row.embedder = config.embedder;
    const PrivatizerMeta meta = make_privatizer(spec, nominal_fs, 0)->meta();
    row.initialization_samples = meta.initialization_samples;
    row.latency_ms = meta.latency_ms(nominal_fs);
    row.latency_samples = meta.latency.samples();

    const fs::path artifact_dir = fs::path(config.output_dir) / "recordings" / slug(spec);
    if (config.write_recording_artifacts) fs::create_directories(artifact_dir);

    std::vector<RecordingResult> per(files.size());
    parallel_for(files.size(), config.workers, [&](std::size_t i) {
      if (loaded[i]) per[i] = process_recording(*loaded[i], config, spec, artifact_dir);
      else per[i].error = load_errors[i];
    });

    std::vector<std::map<std::string, std::vector<double>>> offsets(config.classifiers.size());
    std::vector<UtilityColumns> utility(config.classifiers.size());
    std::vector<VelocityWindow> windows;
    std::optional<std::string> window_error;
    for (std::size_t i = 0; i < files.size(); ++i) {
      auto& r = per[i];
      if (!r.ok) {
        ++row.skipped;
        if (loaded[i]) {
          std::cerr << "skipping " << files[i].path.string() << " [" << spec.op
                    << "]: " << r.error << "\n";
        }
        continue;
      }
      ++row.processed;
      for (std::size_t c = 0; c < r.classifiers.size(); ++c) {
        auto& cr = r.classifiers[c];
        utility[c].fixation_count += cr.fixations;
        utility[c].valid_interactions += cr.valid;
        utility[c].total_targets += cr.targets;
        if (cr.targets > 0) {
          auto& bucket = offsets[c][loaded[i]->subject_id];
          bucket.insert(bucket.end(), cr.offsets.begin(), cr.offsets.end());
        }
      }
      if (r.window_error) {
        if (!window_error) window_error = r.window_error;
      } else {
        std::move(r.windows.begin(), r.windows.end(), std::back_inserter(windows));
      }
    }

    for (std::size_t c = 0; c < config.classifiers.size(); ++c) {
      const std::string name = config.classifiers[c].name();
      row.classifier_names.push_back(name);
      auto& u = utility[c];
      if (u.total_targets == 0) {
        row.notes.push_back(name + ": no target track");
        continue;
      }
      u.success_rate = 100.0 * static_cast<double>(u.valid_interactions) /
                       static_cast<double>(u.total_targets);
      try {
        const auto summary = summarize_accuracy(offsets[c]);
        u.u50_e50 = summary.u50_e50;
        u.u95_e95 = summary.u95_e95;
        if (!summary.excluded_users.empty()) {
          row.notes.push_back(name + ": " + std::to_string(summary.excluded_users.size()) +
                              " user(s) without valid interactions excluded");
        }
      } catch (const Error& e) {
        row.notes.push_back(name + ": " + e.what());
      }
    }
    row.utility = std::move(utility);

    if (window_error) {
      row.notes.push_back("rank1_ir: " + *window_error);
    } else if (row.processed > 0) {
      row.rank1_ir_pct = privacy_metric(std::move(windows), config, row.notes);
    }
    result.rows.push_back(std::move(row));
  }
  sort_rows(result.rows);
  return result;
}

namespace {

// Splits "75/79" into its numeric runs and the text between them.
bool variant_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
    const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
    if (da && db) {
      double x = 0, y = 0;
      auto ra = std::from_chars(a.data() + i, a.data() + a.size(), x);
      auto rb = std::from_chars(b.data() + j, b.data() + b.size(), y);
      if (x != y) return x < y;
      i = static_cast<std::size_t>(ra.ptr - a.data());
      j = static_cast<std::size_t>(rb.ptr - b.data());
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  return a.size() - i < b.size() - j;
}

std::string fmt(std::optional<double> v, int precision) {
  if (!v) return "";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << *v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

std::vector<std::string> classifier_columns(const std::vector<ReportRow>& rows) {
  std::vector<std::string> names;
  for (const auto& r : rows) {
    for (const auto& n : r.classifier_names) {
      if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    }
  }
  return names;
}

const UtilityColumns* utility_for(const ReportRow& row, const std::string& name) {
  for (std::size_t i = 0; i < row.classifier_names.size() && i < row.utility.size(); ++i) {
    if (row.classifier_names[i] == name) return &row.utility[i];
  }
  return nullptr;
}

json opt_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void sort_rows(std::vector<ReportRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.approach_rank != b.approach_rank) return a.approach_rank < b.approach_rank;
    if (a.approach != b.approach) return a.approach < b.approach;
    return variant_less(a.variant, b.variant);
  });
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  const auto names = classifier_columns(rows);
  std::vector<std::string> header{"approach", "variant", "rank1_ir_pct"};
  for (const auto& n : names) {
    header.push_back(n + "_u50_e50");
    header.push_back(n + "_u95_e95");
    header.push_back(n + "_sr_pct");
  }
  for (const char* h : {"initialization_samples", "latency_ms", "latency_samples", "embedder",
                        "processed", "skipped", "notes"}) {
    header.emplace_back(h);
  }
  std::string out = join(header, ",") + "\n";
  for (const auto& r : rows) {
    std::vector<std::string> f{csv_field(r.approach), csv_field(r.variant),
                               fmt(r.rank1_ir_pct, 6)};
    for (const auto& n : names) {
      const auto* u = utility_for(r, n);
      f.push_back(u ? fmt(u->u50_e50, 6) : "");
      f.push_back(u ? fmt(u->u95_e95, 6) : "");
      f.push_back(u ? fmt(u->success_rate, 6) : "");
    }
    f.push_back(std::to_string(r.initialization_samples));
    f.push_back(std::to_string(r.latency_ms));
    f.push_back(fmt(r.latency_samples, 6));
    f.push_back(csv_field(r.embedder));
    f.push_back(std::to_string(r.processed));
    f.push_back(std::to_string(r.skipped));
    f.push_back(csv_field(join(r.notes, "; ")));
    out += join(f, ",") + "\n";
  }
  return out;
}

std::string report_json(const std::vector<ReportRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json j;
    j["approach"] = r.approach;
    j["variant"] = r.variant;
    j["approach_rank"] = r.approach_rank;
    j["embedder"] = r.embedder;
    j["rank1_ir_pct"] = opt_json(r.rank1_ir_pct);
    j["classifiers"] = json::array();
    for (std::size_t i = 0; i < r.classifier_names.size() && i < r.utility.size(); ++i) {
      const auto& u = r.utility[i];
      j["classifiers"].push_back({{"name", r.classifier_names[i]},
                                  {"u50_e50", opt_json(u.u50_e50)},
                                  {"u95_e95", opt_json(u.u95_e95)},
                                  {"sr_pct", opt_json(u.success_rate)},
                                  {"fixation_count", u.fixation_count},
                                  {"valid_interactions", u.valid_interactions},
                                  {"total_targets", u.total_targets}});
    }
    j["initialization_samples"] = r.initialization_samples;
    j["latency_ms"] = r.latency_ms;
    j["latency_samples"] = r.latency_samples;
    j["processed"] = r.processed;
    j["skipped"] = r.skipped;
    j["notes"] = r.notes;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<ReportRow> rows_from_json(const std::string& json_text) {
  std::vector<ReportRow> rows;
  try {
    const json arr = json::parse(json_text);
    auto opt = [](const json& v) -> std::optional<double> {
      if (v.is_null()) return std::nullopt;
      return v.get<double>();
    };
    for (const auto& j : arr) {
      ReportRow r;
      r.approach = j.at("approach").get<std::string>();
      r.variant = j.at("variant").get<std::string>();
      r.approach_rank = j.at("approach_rank").get<int>();
      r.embedder = j.at("embedder").get<std::string>();
      r.rank1_ir_pct = opt(j.at("rank1_ir_pct"));
      for (const auto& c : j.at("classifiers")) {
        r.classifier_names.push_back(c.at("name").get<std::string>());
        UtilityColumns u;
        u.u50_e50 = opt(c.at("u50_e50"));
        u.u95_e95 = opt(c.at("u95_e95"));
        u.success_rate = opt(c.at("sr_pct"));
        u.fixation_count = c.at("fixation_count").get<std::size_t>();
        u.valid_interactions = c.at("valid_interactions").get<std::size_t>();
        u.total_targets = c.at("total_targets").get<std::size_t>();
        r.utility.push_back(u);
      }
      r.initialization_samples = j.at("initialization_samples").get<std::int64_t>();
      r.latency_ms = j.at("latency_ms").get<std::int64_t>();
      r.latency_samples = j.at("latency_samples").get<double>();
      r.processed = j.at("processed").get<std::size_t>();
      r.skipped = j.at("skipped").get<std::size_t>();
      r.notes = j.at("notes").get<std::vector<std::string>>();
      rows.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("report JSON: ") + e.what());
  }
  return rows;
}

std::string report_text(const std::vector<ReportRow>& rows) {
  const auto names = classifier_columns(rows);
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header{"Approach", "Variant", "Rank-1 IR (%)"};
  for (const auto& n : names) {
    std::string up = n;
    std::transform(up.begin(), up.end(), up.begin(), ::toupper);
    header.push_back(up + " U50|E50");
    header.push_back(up + " U95|E95");
    header.push_back(up + " SR (%)");
  }
  header.push_back("Initialization");
  header.push_back("Latency (ms)");
  table.push_back(header);
  for (const auto& r : rows) {
    std::vector<std::string> line{r.approach, r.variant,
                                  r.rank1_ir_pct ? fmt(r.rank1_ir_pct, 2) : "-"};
    for (const auto& n : names) {
      const auto* u = utility_for(r, n);
      auto cell = [](std::optional<double> v) { return v ? fmt(v, 2) : std::string("-"); };
      line.push_back(u ? cell(u->u50_e50) : "-");
      line.push_back(u ? cell(u->u95_e95) : "-");
      line.push_back(u ? cell(u->success_rate) : "-");
    }
    line.push_back(std::to_string(r.initialization_samples));
    line.push_back(std::to_string(r.latency_ms));
    table.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::string out;
  for (std::size_t li = 0; li < table.size(); ++li) {
    const auto& line = table[li];
    std::string s;
    for (std::size_t c = 0; c < line.size(); ++c) {
      const bool left = c < 2;
      const std::string pad(width[c] - line[c].size(), ' ');
      s += (c ? "  " : "") + (left ? line[c] + pad : pad + line[c]);
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out += s + "\n";
    if (li == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
    }
  }
  bool any_notes = false;
  for (const auto& r : rows) {
    for (const auto& n : r.notes) {
      if (!any_notes) out += "\nNotes:\n";
      any_notes = true;
      out += "  " + r.approach + " / " + r.variant + ": " + n + "\n";
    }
  }
  return out;
}

void emit_report(const std::vector<ReportRow>& rows, const std::string& dir) {
  fs::create_directories(dir);
  write_text_file(fs::path(dir) / "report.csv", report_csv(rows));
  write_text_file(fs::path(dir) / "report.json", report_json(rows));
  write_text_file(fs::path(dir) / "report.txt", report_text(rows));
}

}  // namespace gazepriv
