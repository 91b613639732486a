#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "gazepriv/config.hpp"
#include "gazepriv/error.hpp"

using namespace gazepriv;

namespace {

ErrorCode config_error(const std::string& text) {
  try {
    parse_config(text).validate();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(Config, Defaults) {
  const auto c = parse_config("{}");
  ASSERT_EQ(c.privatizers.size(), 1u);
  EXPECT_EQ(c.privatizers[0].op, "identity");
  EXPECT_EQ(c.classifiers.size(), 2u);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesPrivatizerAndClassifiers) {
  const auto c = parse_config(R"({"privatizer": {"op": "fir", "fc_hz": 10, "taps": 29},
                                  "classifiers": ["idt", {"name": "ikf", "chi_square": 5}],
                                  "workers": 3, "split": {"enroll_session": "a", "auth_session": "b"}})");
  EXPECT_EQ(c.privatizers[0].op, "fir");
  EXPECT_EQ(c.privatizers[0].params.number("taps", 0), 29.0);
  EXPECT_EQ(c.classifiers[1].ikf.chi_square, 5.0);
  EXPECT_EQ(c.workers, 3);
  EXPECT_EQ(c.split.auth_session, "b");
}

TEST(Config, RoundTrip) {
  auto c = parse_config(R"({"preset": "table1", "rng_seed": 5, "embedder": "concat:stats+stats"})");
  const auto again = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
  EXPECT_EQ(again.privatizers.size(), 15u);
  EXPECT_EQ(*again.rng_seed, 5u);
}

TEST(Config, Rejections) {
  EXPECT_EQ(config_error("{"), ErrorCode::kConfigError);
  EXPECT_EQ(config_error(R"({"colour": 1})"), ErrorCode::kConfigError);
  EXPECT_EQ(config_error(R"({"privatizer": {"op": "fir", "cutoff": 3}})"), ErrorCode::kConfigError);
  EXPECT_EQ(config_error(R"({"privatizer": {"op": "gaussian", "variance": 1}})"), ErrorCode::kConfigError);
  EXPECT_EQ(config_error(R"({"workers": 0})"), ErrorCode::kConfigError);
  EXPECT_EQ(config_error(R"({"split": {"enroll_session": "1", "auth_session": "1"}})"),
            ErrorCode::kConfigError);
  EXPECT_EQ(config_error(R"({"embedder": "ekyt"})"), ErrorCode::kConfigError);
  EXPECT_EQ(config_error(R"({"preset": "nope"})"), ErrorCode::kConfigError);
  EXPECT_EQ(config_error(R"({"classifiers": ["ivt"]})"), ErrorCode::kConfigError);
}

TEST(Config, SeedSatisfiesStochasticOp) {
  EXPECT_NO_THROW(parse_config(R"({"privatizer": {"op": "gaussian", "variance": 1}, "rng_seed": 3})").validate());
}

TEST(Config, PrivatizerSpecText) {
  const auto spec = parse_privatizer_spec(R"({"op": "targeted_laplace", "exponential": "rate"})");
  EXPECT_EQ(spec.params.text("exponential", ""), "rate");
  EXPECT_EQ(parse_privatizer_spec(privatizer_spec_to_json(spec)).params.values(), spec.params.values());
}

TEST(Config, PresetNames) {
  for (const auto& name : preset_names()) {
    for (const auto& spec : preset_privatizers(name)) EXPECT_NO_THROW(validate_spec(spec)) << name;
  }
}

TEST(Config, ShippedPresetFilesMatchBuiltins) {
  const std::filesystem::path dir = GAZEPRIV_PRESET_DIR;
  std::size_t variant_files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    const auto config = load_config(entry.path().string());
    EXPECT_NO_THROW(config.validate()) << entry.path();
    const auto name = entry.path().stem().string();
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) continue;
    const auto builtin = preset_privatizers(name);
    ASSERT_EQ(config.privatizers.size(), builtin.size()) << name;
    for (std::size_t i = 0; i < builtin.size(); ++i) {
      EXPECT_EQ(config.privatizers[i].op, builtin[i].op) << name;
      const auto want = describe(builtin[i], 1000.0);
      const auto got = describe(config.privatizers[i], 1000.0);
      EXPECT_EQ(got.variant, want.variant) << name;
    }
    ++variant_files;
  }
  EXPECT_EQ(variant_files, preset_names().size() - 1);  // "all" has no file
}
