#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gazepriv/classification.hpp"
#include "gazepriv/interaction.hpp"
#include "gazepriv/io.hpp"
#include "gazepriv/privatizers.hpp"

namespace gazepriv {

enum class ClassifierKind { kIdt, kIkf };

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::kIdt;
  IdtParams idt;
  IkfParams ikf;

  std::string name() const { return kind == ClassifierKind::kIdt ? "idt" : "ikf"; }
};

Classification classify(const Recording& rec, const ClassifierSpec& spec);

struct SplitSpec {
  std::string enroll_session = "1";
  std::string auth_session = "2";
};

struct PipelineConfig {
  std::string dataset_path;
  std::vector<PrivatizerSpec> privatizers{PrivatizerSpec{}};
  std::vector<ClassifierSpec> classifiers{ClassifierSpec{ClassifierKind::kIdt, {}, {}},
                                          ClassifierSpec{ClassifierKind::kIkf, {}, {}}};
  // Classifier whose labels drive targeted noise; must be causal per sample.
  ClassifierSpec noise_classifier{ClassifierKind::kIkf, {}, {}};
  std::optional<std::uint64_t> rng_seed;
  std::string embedder = "stats";
  SplitSpec split;
  std::string output_dir = "gazepriv-out";
  int workers = 1;
  std::string filename_pattern = kDefaultFilenamePattern;
  std::optional<double> fs;
  InteractionParams interaction;
  std::optional<std::size_t> total_targets;
  ScreenBounds bounds;
  bool write_recording_artifacts = true;

  // Throws kConfigError.
  void validate() const;
};

PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::string& path);
std::string config_to_json(const PipelineConfig& config);

PrivatizerSpec parse_privatizer_spec(const std::string& json_text);
std::string privatizer_spec_to_json(const PrivatizerSpec& spec);

// Named operator sets; "table1" expands to every variant of the comparison
// table. Throws kConfigError for unknown names.
std::vector<PrivatizerSpec> preset_privatizers(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace gazepriv
