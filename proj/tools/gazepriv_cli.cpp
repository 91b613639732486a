// gazepriv command-line front end.
//
// Exit codes: 0 success, 1 configuration error, 2 data error.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gazepriv/classification.hpp"
#include "gazepriv/config.hpp"
#include "gazepriv/error.hpp"
#include "gazepriv/fir.hpp"
#include "gazepriv/interaction.hpp"
#include "gazepriv/io.hpp"
#include "gazepriv/pipeline.hpp"
#include "gazepriv/privacy.hpp"
#include "gazepriv/privatizers.hpp"
#include "gazepriv/rng.hpp"
#include "gazepriv/synthetic.hpp"

namespace fs = std::filesystem;
using namespace gazepriv;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string dataset;
  std::string output_dir;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON configuration file");
  cmd->add_option("--preset", o.preset, "Named privatizer set (overrides the config)");
  cmd->add_option("--seed", o.seed, "Global RNG seed");
  cmd->add_option("--workers", o.workers, "Worker threads");
  cmd->add_option("--dataset", o.dataset, std::string("Dataset root (default: $") + kDataRootEnv + ")");
  cmd->add_option("--output-dir", o.output_dir, "Output directory");
}

PipelineConfig resolve_config(const CommonOptions& o) {
  PipelineConfig c = o.config_path.empty() ? PipelineConfig{} : load_config(o.config_path);
  if (!o.preset.empty()) c.privatizers = preset_privatizers(o.preset);
  if (o.seed) c.rng_seed = *o.seed;
  if (o.workers) c.workers = *o.workers;
  if (!o.dataset.empty()) c.dataset_path = o.dataset;
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  if (c.dataset_path.empty()) {
    if (const char* env = std::getenv(kDataRootEnv)) c.dataset_path = env;
  }
  return c;
}

void require_dataset(const PipelineConfig& c) {
  if (c.dataset_path.empty()) {
    throw Error(ErrorCode::kConfigError,
                std::string("no dataset given (use --dataset, the config or $") + kDataRootEnv + ")");
  }
}

// A single file; subject/session/task come from the filename when it
// follows the naming pattern.
Recording load_input(const std::string& path, const PipelineConfig& c) {
  const auto files = discover_recordings(path, c.filename_pattern);
  if (files.size() == 1) return load_recording(files.front(), c.fs);
  Recording rec = read_recording_csv(path, c.fs);
  rec.subject_id = fs::path(path).stem().string();
  rec.session_id = "1";
  rec.task_tag = "NA";
  return rec;
}

ClassifierSpec pick_classifier(const PipelineConfig& c, const std::string& name) {
  if (name.empty()) {
    if (c.classifiers.empty()) throw Error(ErrorCode::kConfigError, "no classifier configured");
    return c.classifiers.front();
  }
  for (const auto& spec : c.classifiers) {
    if (spec.name() == name) return spec;
  }
  if (name == "idt") return ClassifierSpec{ClassifierKind::kIdt, {}, {}};
  if (name == "ikf") return ClassifierSpec{ClassifierKind::kIkf, {}, {}};
  throw Error(ErrorCode::kConfigError, "unknown classifier '" + name + "'");
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

int cmd_ingest_check(const CommonOptions& o) {
  const PipelineConfig c = resolve_config(o);
  require_dataset(c);
  const auto files = discover_recordings(c.dataset_path, c.filename_pattern);
  std::cout << "path,subject,session,task,samples,fs,targets,data_loss\n";
  int failures = 0;
  for (const auto& f : files) {
    try {
      const Recording rec = load_recording(f, c.fs);
      std::cout << f.path.string() << "," << f.subject_id << "," << f.session_id << ","
                << f.task_tag << "," << rec.samples.size() << "," << rec.fs << ","
                << rec.targets.size() << "," << fmt(data_loss_rate(rec)) << "\n";
    } catch (const Error& e) {
      ++failures;
      std::cerr << e.what() << "\n";
    }
  }
  std::cerr << files.size() << " file(s), " << failures << " failed\n";
  if (files.empty()) {
    std::cerr << "no files matched the filename pattern\n";
    return kExitData;
  }
  return failures ? kExitData : 0;
}

struct PrivatizeOptions {
  std::string input, output, spec_json, dump_fir;
};

int cmd_privatize(const CommonOptions& o, const PrivatizeOptions& p) {
  PipelineConfig c = resolve_config(o);
  if (!p.spec_json.empty()) c.privatizers = {parse_privatizer_spec(p.spec_json)};
  c.validate();
  const PrivatizerSpec& spec = c.privatizers.front();
  const Recording pre = preprocess(load_input(p.input, c), c.bounds);
  auto op = make_privatizer(spec, pre.fs,
                            derive_seed(c.rng_seed.value_or(0), pre.subject_id, pre.session_id,
                                        pre.task_tag));
  if (!p.dump_fir.empty()) {
    const auto* fir = dynamic_cast<const FirFilter*>(op.get());
    if (fir == nullptr) throw Error(ErrorCode::kConfigError, "--dump-fir needs a fir privatizer");
    write_coefficients_csv(p.dump_fir, fir->coefficients());
  }
  std::vector<MovementLabel> labels;
  if (op->uses_labels()) labels = classify(pre, c.noise_classifier).labels;
  const auto out = apply_privatizer(pre, *op, labels);
  write_recording_csv(p.output, out.recording);
  const auto label = describe(spec, pre.fs);
  std::cout << label.approach << " / " << label.variant << ": " << pre.samples.size()
            << " in, " << out.recording.samples.size() << " out, initialization "
            << out.meta.initialization_samples << ", latency " << out.meta.latency_ms(pre.fs)
            << " ms\n";
  return 0;
}

struct ClassifyOptions {
  std::string input, output, classifier, fixations;
};

void write_fixations_csv(const std::string& path, const std::vector<FixationSegment>& fx) {
  std::ostringstream os;
  os << std::setprecision(17) << "start_index,end_index,onset_ms,duration_ms,centroid_x,centroid_y\n";
  for (const auto& f : fx) {
    os << f.start_index << "," << f.end_index << "," << f.onset_ms << "," << f.duration_ms << ","
       << f.centroid_x << "," << f.centroid_y << "\n";
  }
  write_text_file(path, os.str());
}

int cmd_classify(const CommonOptions& o, const ClassifyOptions& a) {
  const PipelineConfig c = resolve_config(o);
  const ClassifierSpec spec = pick_classifier(c, a.classifier);
  const Recording rec = preprocess(load_input(a.input, c), c.bounds);
  const Classification cls = classify(rec, spec);
  if (!a.output.empty()) write_labels_csv(a.output, cls.labels);
  if (!a.fixations.empty()) write_fixations_csv(a.fixations, cls.fixations);
  std::map<MovementLabel, std::size_t> counts;
  for (auto l : cls.labels) ++counts[l];
  std::cout << spec.name() << ": " << cls.fixations.size() << " fixations; labels";
  for (auto [l, n] : counts) std::cout << " " << to_string(l) << "=" << n;
  std::cout << "\n";
  return 0;
}

int cmd_simulate(const CommonOptions& o, const ClassifyOptions& a) {
  const PipelineConfig c = resolve_config(o);
  const ClassifierSpec spec = pick_classifier(c, a.classifier);
  const Recording rec = preprocess(load_input(a.input, c), c.bounds);
  const auto outcomes = simulate_interactions(rec, classify(rec, spec), c.interaction);
  if (!a.output.empty()) write_outcomes_csv(a.output, outcomes);
  std::vector<double> offsets;
  for (const auto& oc : outcomes) {
    if (oc.valid) offsets.push_back(*oc.offset_dva);
  }
  const std::size_t total = c.total_targets.value_or(outcomes.size());
  std::cout << spec.name() << ": SR " << fmt(success_rate(outcomes, total), 2) << " % ("
            << offsets.size() << "/" << total << ")";
  if (!offsets.empty()) {
    std::cout << ", E50 " << fmt(percentile(offsets, 50.0)) << " dva, E95 "
              << fmt(percentile(offsets, 95.0)) << " dva";
  }
  std::cout << "\n";
  return 0;
}

struct PrivacyOptions {
  std::string export_windows, embeddings, embedder;
};

int cmd_privacy(const CommonOptions& o, const PrivacyOptions& a) {
  PipelineConfig c = resolve_config(o);
  if (!a.embedder.empty()) c.embedder = a.embedder;
  require_dataset(c);
  const auto embedder = make_embedder(c.embedder);
  std::vector<VelocityWindow> windows;
  for (const auto& f : discover_recordings(c.dataset_path, c.filename_pattern)) {
    auto w = make_velocity_windows(preprocess(load_recording(f, c.fs), c.bounds));
    std::move(w.begin(), w.end(), std::back_inserter(windows));
  }
  corpus_zscore(windows);
  if (!a.export_windows.empty()) {
    fs::create_directories(a.export_windows);
    for (const auto& w : windows) {
      write_window_csv((fs::path(a.export_windows) /
                        ("S" + w.subject_id + "_" + w.session_id + "_w" + std::to_string(w.index) +
                         ".csv"))
                           .string(),
                       w);
    }
  }
  const auto all = embed(windows, *embedder);
  if (!a.embeddings.empty()) {
    std::vector<EmbeddingRow> rows;
    for (const auto& w : windows) rows.push_back({w.subject_id, w.session_id, w.index});
    write_embeddings(a.embeddings, all, rows);
  }
  std::vector<Embedding> enroll, auth;
  std::vector<std::string> es, as;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].session_id == c.split.enroll_session) {
      enroll.push_back(all[i]);
      es.push_back(windows[i].subject_id);
    } else if (windows[i].session_id == c.split.auth_session) {
      auth.push_back(all[i]);
      as.push_back(windows[i].subject_id);
    }
  }
  const double ir = rank1_ir(similarity_matrix(enroll, auth), ground_truth(es, as));
  std::cout << "rank-1 IR " << fmt(ir, 2) << " % (" << enroll.size() << " enrollment, "
            << auth.size() << " authentication windows, embedder " << embedder->name() << ")\n";
  return 0;
}

int cmd_report(const std::string& input, const std::string& output_dir) {
  const auto rows = rows_from_json(read_text_file(input));
  if (!output_dir.empty()) emit_report(rows, output_dir);
  std::cout << report_text(rows);
  return 0;
}

int cmd_run(const CommonOptions& o) {
  const PipelineConfig c = resolve_config(o);
  require_dataset(c);
  const PipelineResult result = run_pipeline(c);
  emit_report(result.rows, c.output_dir);
  write_text_file(fs::path(c.output_dir) / "config.json", config_to_json(c) + "\n");
  std::cout << report_text(result.rows);
  std::cerr << result.ingested << " recording(s) ingested; report written to " << c.output_dir
            << "\n";
  return 0;
}

struct SynthOptions {
  std::string output;
  int subjects = 12;
  int sessions = 2;
  double duration_ms = 20000.0;
  std::uint64_t seed = 7;
  int ran_targets = 0;
};

int cmd_synth(const SynthOptions& s) {
  std::vector<Recording> recs;
  if (s.ran_targets > 0) {
    synth::RanLayout layout;
    layout.targets = s.ran_targets;
    layout.seed = s.seed;
    recs.push_back(synth::ran_teleport(layout));
  } else {
    recs = synth::corpus({s.subjects, s.sessions, s.duration_ms, s.seed});
  }
  synth::write_dataset(s.output, recs);
  std::cout << "wrote " << recs.size() << " recording(s) to " << s.output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving gaze stream processing and evaluation"};
  app.require_subcommand(1);

  CommonOptions common;
  PrivatizeOptions priv;
  ClassifyOptions cls;
  PrivacyOptions privacy;
  SynthOptions syn;
  std::string report_input, report_out;

  auto* ingest = app.add_subcommand("ingest-check", "Parse every recording and list the manifest");
  add_common(ingest, common);

  auto* privatize = app.add_subcommand("privatize", "Privatize one recording");
  add_common(privatize, common);
  privatize->add_option("-i,--input", priv.input, "Input recording CSV")->required();
  privatize->add_option("-o,--output", priv.output, "Output recording CSV")->required();
  privatize->add_option("--privatizer", priv.spec_json,
                        R"(Operator as JSON, e.g. {"op":"fir","fc_hz":25,"taps":49})");
  privatize->add_option("--dump-fir", priv.dump_fir, "Write FIR coefficients to this CSV");

  auto* classify_cmd = app.add_subcommand("classify", "Label samples as fixation or saccade");
  add_common(classify_cmd, common);
  classify_cmd->add_option("-i,--input", cls.input, "Input recording CSV")->required();
  classify_cmd->add_option("-o,--output", cls.output, "Per-sample labels CSV");
  classify_cmd->add_option("--fixations", cls.fixations, "Fixation segments CSV");
  classify_cmd->add_option("--classifier", cls.classifier, "idt or ikf");

  auto* simulate = app.add_subcommand("simulate", "Simulate dwell-based target selection");
  add_common(simulate, common);
  simulate->add_option("-i,--input", cls.input, "Input recording CSV with targets")->required();
  simulate->add_option("-o,--output", cls.output, "Per-target outcomes CSV");
  simulate->add_option("--classifier", cls.classifier, "idt or ikf");

  auto* privacy_cmd = app.add_subcommand("privacy", "Rank-1 identification rate of a dataset");
  add_common(privacy_cmd, common);
  privacy_cmd->add_option("--embedder", privacy.embedder, "Embedder name (stats, concat:a+b)");
  privacy_cmd->add_option("--export-windows", privacy.export_windows,
                          "Write normalized velocity windows to this directory");
  privacy_cmd->add_option("--embeddings", privacy.embeddings, "Write the embedding matrix CSV");

  auto* report = app.add_subcommand("report", "Render a report.json as a table");
  report->add_option("-i,--input", report_input, "report.json")->required();
  report->add_option("--output-dir", report_out, "Re-emit CSV/JSON/text here");

  auto* run = app.add_subcommand("run", "Full privacy/utility evaluation");
  add_common(run, common);

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset");
  synth_cmd->add_option("-o,--output", syn.output, "Output directory")->required();
  synth_cmd->add_option("--subjects", syn.subjects, "Subjects")->capture_default_str();
  synth_cmd->add_option("--sessions", syn.sessions, "Sessions per subject")->capture_default_str();
  synth_cmd->add_option("--duration-ms", syn.duration_ms, "Recording length")->capture_default_str();
  synth_cmd->add_option("--seed", syn.seed, "Seed")->capture_default_str();
  synth_cmd->add_option("--ran", syn.ran_targets,
                        "Write one noise-free teleport recording with this many targets instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*ingest) return cmd_ingest_check(common);
    if (*privatize) return cmd_privatize(common, priv);
    if (*classify_cmd) return cmd_classify(common, cls);
    if (*simulate) return cmd_simulate(common, cls);
    if (*privacy_cmd) return cmd_privacy(common, privacy);
    if (*report) return cmd_report(report_input, report_out);
    if (*run) return cmd_run(common);
    if (*synth_cmd) return cmd_synth(syn);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_config_error() ? kExitConfig : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
