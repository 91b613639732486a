#include "gazepriv/config.hpp"

#include <set>

#include <json.hpp>

#include "gazepriv/error.hpp"
#include "gazepriv/privacy.hpp"

namespace gazepriv {
namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& what) {
  throw Error(ErrorCode::kConfigError, what);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) config_fail(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_fail(where + ": key '" + key + "' has the wrong type");
  }
}

PrivatizerSpec spec_from_json(const json& j) {
  if (!j.is_object()) config_fail("privatizer spec must be an object");
  PrivatizerSpec spec;
  if (!j.contains("op")) config_fail("privatizer spec needs an 'op'");
  spec.op = get_as<std::string>(j, "op", "privatizer");
  for (const auto& [key, value] : j.items()) {
    if (key == "op") continue;
    if (value.is_number()) spec.params.set(key, value.get<double>());
    else if (value.is_boolean()) spec.params.set(key, value.get<bool>() ? 1.0 : 0.0);
    else if (value.is_string()) spec.params.set(key, value.get<std::string>());
    else config_fail("privatizer '" + spec.op + "': parameter '" + key + "' has an unsupported type");
  }
  validate_spec(spec);
  return spec;
}

json spec_to_json(const PrivatizerSpec& spec) {
  json j;
  j["op"] = spec.op;
  for (const auto& [key, value] : spec.params.values()) {
    std::visit([&](const auto& v) { j[key] = v; }, value);
  }
  return j;
}

ClassifierSpec classifier_from_json(const json& j) {
  if (j.is_string()) {
    return classifier_from_json(json{{"name", j.get<std::string>()}});
  }
  if (!j.is_object() || !j.contains("name")) config_fail("classifier spec needs a 'name'");
  ClassifierSpec spec;
  const auto name = get_as<std::string>(j, "name", "classifier");
  if (name == "idt") {
    reject_unknown(j, {"name", "dispersion_threshold", "min_duration_ms"}, "idt");
    spec.kind = ClassifierKind::kIdt;
    if (j.contains("dispersion_threshold"))
      spec.idt.dispersion_threshold = get_as<double>(j, "dispersion_threshold", "idt");
    if (j.contains("min_duration_ms"))
      spec.idt.min_duration_ms = get_as<double>(j, "min_duration_ms", "idt");
  } else if (name == "ikf") {
    reject_unknown(j, {"name", "chi_square", "window", "deviation", "process_noise"}, "ikf");
    spec.kind = ClassifierKind::kIkf;
    if (j.contains("chi_square")) spec.ikf.chi_square = get_as<double>(j, "chi_square", "ikf");
    if (j.contains("window")) spec.ikf.window = get_as<int>(j, "window", "ikf");
    if (j.contains("deviation")) spec.ikf.deviation = get_as<double>(j, "deviation", "ikf");
    if (j.contains("process_noise"))
      spec.ikf.process_noise = get_as<double>(j, "process_noise", "ikf");
  } else {
    config_fail("unknown classifier '" + name + "' (expected idt or ikf)");
  }
  return spec;
}

json classifier_to_json(const ClassifierSpec& spec) {
  if (spec.kind == ClassifierKind::kIdt) {
    return {{"name", "idt"},
            {"dispersion_threshold", spec.idt.dispersion_threshold},
            {"min_duration_ms", spec.idt.min_duration_ms}};
  }
  return {{"name", "ikf"},
          {"chi_square", spec.ikf.chi_square},
          {"window", spec.ikf.window},
          {"deviation", spec.ikf.deviation},
          {"process_noise", spec.ikf.process_noise}};
}

}  // namespace

Classification classify(const Recording& rec, const ClassifierSpec& spec) {
  return spec.kind == ClassifierKind::kIdt ? idt_classify(rec, spec.idt)
                                           : ikf_classify(rec, spec.ikf);
}

void PipelineConfig::validate() const {
  if (privatizers.empty()) config_fail("at least one privatizer is required");
  for (const auto& p : privatizers) {
    validate_spec(p);
    if (is_stochastic(p) && !rng_seed) {
      config_fail("privatizer '" + p.op + "' is stochastic and needs rng_seed");
    }
  }
  if (workers < 1) config_fail("workers must be >= 1");
  if (split.enroll_session == split.auth_session) {
    config_fail("enrollment and authentication sessions must differ");
  }
  if (!(interaction.dwell_ms >= 0.0) || !(interaction.window_ms > 0.0)) {
    config_fail("interaction window must be positive and dwell non-negative");
  }
  if (fs && !(*fs > 0.0)) config_fail("fs must be positive");
  try {
    bounds.validate();
    make_embedder(embedder);
  } catch (const Error& e) {
    config_fail(e.what());
  }
}

PipelineConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    config_fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_fail("config must be a JSON object");
  reject_unknown(j,
                 {"dataset_path", "privatizer", "privatizers", "preset", "classifiers",
                  "noise_classifier", "rng_seed", "embedder", "split", "output_dir", "workers",
                  "filename_pattern", "fs", "dwell_ms", "window_ms", "total_targets", "bounds",
                  "write_recording_artifacts"},
                 "config");
  PipelineConfig c;
  if (j.contains("dataset_path")) c.dataset_path = get_as<std::string>(j, "dataset_path", "config");
  if (j.contains("preset")) c.privatizers = preset_privatizers(get_as<std::string>(j, "preset", "config"));
  if (j.contains("privatizers")) {
    c.privatizers.clear();
    for (const auto& p : j.at("privatizers")) c.privatizers.push_back(spec_from_json(p));
  }
  if (j.contains("privatizer")) c.privatizers = {spec_from_json(j.at("privatizer"))};
  if (j.contains("classifiers")) {
    c.classifiers.clear();
    for (const auto& cl : j.at("classifiers")) c.classifiers.push_back(classifier_from_json(cl));
  }
  if (j.contains("noise_classifier")) c.noise_classifier = classifier_from_json(j.at("noise_classifier"));
  if (j.contains("rng_seed") && !j.at("rng_seed").is_null()) {
    c.rng_seed = get_as<std::uint64_t>(j, "rng_seed", "config");
  }
  if (j.contains("embedder")) c.embedder = get_as<std::string>(j, "embedder", "config");
  if (j.contains("split")) {
    const auto& s = j.at("split");
    reject_unknown(s, {"enroll_session", "auth_session"}, "split");
    if (s.contains("enroll_session")) c.split.enroll_session = get_as<std::string>(s, "enroll_session", "split");
    if (s.contains("auth_session")) c.split.auth_session = get_as<std::string>(s, "auth_session", "split");
  }
  if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j, "output_dir", "config");
  if (j.contains("workers")) c.workers = get_as<int>(j, "workers", "config");
  if (j.contains("filename_pattern")) c.filename_pattern = get_as<std::string>(j, "filename_pattern", "config");
  if (j.contains("fs") && !j.at("fs").is_null()) c.fs = get_as<double>(j, "fs", "config");
  if (j.contains("dwell_ms")) c.interaction.dwell_ms = get_as<double>(j, "dwell_ms", "config");
  if (j.contains("window_ms")) c.interaction.window_ms = get_as<double>(j, "window_ms", "config");
  if (j.contains("total_targets") && !j.at("total_targets").is_null()) {
    c.total_targets = get_as<std::size_t>(j, "total_targets", "config");
  }
  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    reject_unknown(b, {"x_min", "x_max", "y_min", "y_max"}, "bounds");
    if (b.contains("x_min")) c.bounds.x_min = get_as<double>(b, "x_min", "bounds");
    if (b.contains("x_max")) c.bounds.x_max = get_as<double>(b, "x_max", "bounds");
    if (b.contains("y_min")) c.bounds.y_min = get_as<double>(b, "y_min", "bounds");
    if (b.contains("y_max")) c.bounds.y_max = get_as<double>(b, "y_max", "bounds");
  }
  if (j.contains("write_recording_artifacts")) {
    c.write_recording_artifacts = get_as<bool>(j, "write_recording_artifacts", "config");
  }
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    config_fail(e.what());
  }
  return parse_config(text);
}

std::string config_to_json(const PipelineConfig& c) {
  json j;
  j["dataset_path"] = c.dataset_path;
  j["privatizers"] = json::array();
  for (const auto& p : c.privatizers) j["privatizers"].push_back(spec_to_json(p));
  j["classifiers"] = json::array();
  for (const auto& cl : c.classifiers) j["classifiers"].push_back(classifier_to_json(cl));
  j["noise_classifier"] = classifier_to_json(c.noise_classifier);
  j["rng_seed"] = c.rng_seed ? json(*c.rng_seed) : json(nullptr);
  j["embedder"] = c.embedder;
  j["split"] = {{"enroll_session", c.split.enroll_session}, {"auth_session", c.split.auth_session}};
  j["output_dir"] = c.output_dir;
  j["workers"] = c.workers;
  j["filename_pattern"] = c.filename_pattern;
  j["fs"] = c.fs ? json(*c.fs) : json(nullptr);
  j["dwell_ms"] = c.interaction.dwell_ms;
  j["window_ms"] = c.interaction.window_ms;
  j["total_targets"] = c.total_targets ? json(*c.total_targets) : json(nullptr);
  j["bounds"] = {{"x_min", c.bounds.x_min}, {"x_max", c.bounds.x_max},
                 {"y_min", c.bounds.y_min}, {"y_max", c.bounds.y_max}};
  j["write_recording_artifacts"] = c.write_recording_artifacts;
  return j.dump(2);
}

PrivatizerSpec parse_privatizer_spec(const std::string& json_text) {
  try {
    return spec_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    config_fail(std::string("privatizer spec is not valid JSON: ") + e.what());
  }
}

std::string privatizer_spec_to_json(const PrivatizerSpec& spec) { return spec_to_json(spec).dump(); }

namespace {

PrivatizerSpec op(std::string name, ParamMap params = {}) {
  return PrivatizerSpec{std::move(name), std::move(params)};
}

const std::map<std::string, std::vector<PrivatizerSpec>>& presets() {
  static const std::map<std::string, std::vector<PrivatizerSpec>> table = [] {
    std::map<std::string, std::vector<PrivatizerSpec>> t;
    t["baseline"] = {op("identity")};
    t["median3"] = {op("median3")};
    for (int m : {2, 4, 10, 11, 20}) {
      t["downsample-" + std::to_string(1000 / m)] = {op("downsample", {{"factor", double(m)}})};
    }
    for (const char* v : {"0.25", "0.5", "1", "2"}) {
      t[std::string("gaussian-") + v] = {op("gaussian", {{"variance", std::stod(v)}})};
    }
    for (int b : {50, 100, 200}) {
      t["lwma-" + std::to_string(b)] = {op("lwma", {{"window", double(b)}})};
    }
    t["targeted-laplace"] = {op("targeted_laplace", {{"radius", 1.5}, {"epsilon", 0.5}})};
    for (auto [fc, taps] : {std::pair{75, 79}, std::pair{25, 49}, std::pair{10, 29}}) {
      t["fir-" + std::to_string(fc) + "-" + std::to_string(taps)] = {
          op("fir", {{"fc_hz", double(fc)}, {"taps", double(taps)}})};
    }
    t["kalman"] = {op("kalman")};

    std::vector<PrivatizerSpec> table1;
    for (const char* name :
         {"baseline", "median3", "downsample-500", "downsample-250", "downsample-100",
          "downsample-90", "downsample-50", "lwma-50", "lwma-100", "lwma-200", "targeted-laplace",
          "fir-75-79", "fir-25-49", "fir-10-29", "kalman"}) {
      table1.push_back(t.at(name).front());
    }
    auto all = table1;
    for (const char* name : {"gaussian-0.25", "gaussian-0.5", "gaussian-1", "gaussian-2"}) {
      all.push_back(t.at(name).front());
    }
    t["table1"] = std::move(table1);
    t["all"] = std::move(all);
    return t;
  }();
  return table;
}

}  // namespace

std::vector<PrivatizerSpec> preset_privatizers(const std::string& name) {
  auto it = presets().find(name);
  if (it == presets().end()) config_fail("unknown preset '" + name + "'");
  return it->second;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, specs] : presets()) names.push_back(name);
  return names;
}

}  // namespace gazepriv
