#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <unistd.h>

#include "fixtures.hpp"

using namespace poselsa;
namespace fs = std::filesystem;

namespace {

struct Built {
  SynthData data;
  StopwordSet stop;
  ScoringModel model;
};

Built build(const ModelConfig& config) {
  Built b{generate(SynthSpec{}), {}, {}};
  b.stop = StopwordSet(b.data.stopwords.begin(), b.data.stopwords.end());
  const auto w = build_weighted_wcm(b.data.corpus, config, b.stop);
  b.model = calibrate_thresholds(build_space(w, 8), b.data.train, config, b.stop);
  return b;
}

}  // namespace

TEST(ModelIo, ReloadGradesIdentically) {
  ModelConfig c;
  c.kinds = preset_kinds("pcn");
  c.include_ambiguous = true;
  const auto b = build(c);
  const auto path = fs::temp_directory_path() / ("poselsa-model-" + std::to_string(::getpid()) + ".json");
  save_model(path, b.model, Granularity::Document);
  const auto loaded = load_model(path);
  fs::remove(path);

  EXPECT_EQ(loaded.model.config, c);
  EXPECT_EQ(loaded.model.cutpoints, b.model.cutpoints);
  EXPECT_EQ(loaded.model.space.context_vectors, b.model.space.context_vectors);
  EXPECT_EQ(loaded.model.space.factors.u, b.model.space.factors.u);
  const auto before = grade_essays(b.model, b.data.test, b.stop);
  const auto after = grade_essays(loaded.model, b.data.test, b.stop);
  ASSERT_EQ(before.size(), after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(before[i].score, after[i].score);
    EXPECT_EQ(before[i].assigned, after[i].assigned);
  }
}

TEST(ModelIo, FingerprintTracksConfig) {
  ModelConfig a, b;
  b.include_ambiguous = true;
  EXPECT_NE(config_fingerprint(a, Granularity::Document, Aggregation::Sum),
            config_fingerprint(b, Granularity::Document, Aggregation::Sum));
  EXPECT_NE(config_fingerprint(a, Granularity::Document, Aggregation::Sum),
            config_fingerprint(a, Granularity::Sentence, Aggregation::Sum));
  EXPECT_NE(config_fingerprint(a, Granularity::Document, Aggregation::Sum),
            config_fingerprint(a, Granularity::Document, Aggregation::Mean));
  EXPECT_EQ(config_fingerprint(a, Granularity::Document, Aggregation::Sum),
            config_fingerprint(ModelConfig{}, Granularity::Document, Aggregation::Sum));
}

TEST(ModelIo, TamperedModelRejected) {
  const auto b = build(ModelConfig{});
  auto j = model_to_json(b.model, Granularity::Document);
  j["config"]["include_ambiguous"] = true;
  try {
    model_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigMismatch);
  }
}

TEST(ModelIo, MalformedFiles) {
  const auto path = fs::temp_directory_path() / ("poselsa-bad-" + std::to_string(::getpid()) + ".json");
  std::ofstream(path) << "{not json";
  EXPECT_THROW(load_model(path), Error);
  std::ofstream(path) << R"({"format":"other","version":1})";
  EXPECT_THROW(load_model(path), Error);
  fs::remove(path);
  EXPECT_THROW(load_model(path), Error);
}
