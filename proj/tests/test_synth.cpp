#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <unistd.h>

#include "fixtures.hpp"

using namespace poselsa;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double course_share(const TaggedDocument& essay, const std::set<std::string>& course) {
  double on = 0, all = 0;
  for (const auto& s : essay.sentences)
    for (const auto& t : s.tokens) {
      if (t.primary().pos == "PUNCT") continue;
      ++all;
      on += course.count(t.primary().lemma);
    }
  return all ? on / all : 0.0;
}

}  // namespace

TEST(Synth, SameSeedSameBytes) {
  const auto base = fs::temp_directory_path() / ("poselsa-synth-" + std::to_string(::getpid()));
  write_synthetic(base / "a", generate(SynthSpec{}));
  write_synthetic(base / "b", generate(SynthSpec{}));
  for (const char* f : {files::corpus, files::train, files::test, files::stopwords, files::scale}) {
    EXPECT_EQ(slurp(base / "a" / f), slurp(base / "b" / f)) << f;
  }
  SynthSpec other;
  other.seed = 2;
  write_synthetic(base / "c", generate(other));
  EXPECT_NE(slurp(base / "a" / files::corpus), slurp(base / "c" / files::corpus));
  fs::remove_all(base);
}

TEST(Synth, ShapeMatchesSpec) {
  const auto d = generate(SynthSpec{});
  EXPECT_EQ(d.corpus.context_count(), 40u);
  EXPECT_EQ(d.train.size(), 60u);
  EXPECT_EQ(d.test.size(), 40u);
  std::set<int> grades;
  for (int g : d.train.grades()) grades.insert(g);
  EXPECT_EQ(grades, (std::set<int>{0, 1, 2, 3, 4, 5}));
}

TEST(Synth, NoAmbiguityMeansSingleReadings) {
  SynthSpec s;
  s.ambiguity_rate = 0.0;
  const auto d = generate(s);
  for (const auto& doc : d.corpus.documents)
    for (const auto& sen : doc.sentences)
      for (const auto& t : sen.tokens) ASSERT_EQ(t.readings.size(), 1u);
}

TEST(Synth, AmbiguityPresentWhenRequested) {
  SynthSpec s;
  s.ambiguity_rate = 0.5;
  std::size_t multi = 0;
  for (const auto& doc : generate(s).corpus.documents)
    for (const auto& sen : doc.sentences)
      for (const auto& t : sen.tokens) multi += t.readings.size() > 1;
  EXPECT_GT(multi, 0u);
}

TEST(Synth, CourseOverlapRisesWithGrade) {
  const auto d = generate(SynthSpec{});
  std::map<int, std::pair<double, int>> acc;
  for (const auto& e : d.train.essays) {
    acc[e.grade].first += course_share(e.essay, d.course_lemmas);
    acc[e.grade].second += 1;
  }
  double last = -1.0;
  for (const auto& [g, v] : acc) {
    const double mean = v.first / v.second;
    EXPECT_GT(mean, last) << "grade " << g;
    last = mean;
  }
}

TEST(Synth, InfeasibleSpecsRejected) {
  SynthSpec tiny;
  tiny.vocab_size = 5;
  EXPECT_THROW(generate(tiny), Error);
  SynthSpec fine;
  fine.sentences_per_essay = 3;
  EXPECT_THROW(generate(fine), Error);
  SynthSpec flat;
  flat.overlap_profile = {0.2, 0.2, 0.4, 0.6, 0.8, 1.0};
  EXPECT_THROW(generate(flat), Error);
  SynthSpec no_noun;
  no_noun.tagset = {"V", "A", "PUNCT"};
  EXPECT_THROW(generate(no_noun), Error);
}

TEST(Synth, RoundTripThroughFiles) {
  const auto dir = fs::temp_directory_path() / ("poselsa-rt-" + std::to_string(::getpid()));
  const auto d = generate(SynthSpec{});
  write_synthetic(dir, d);
  const auto set = load_eval_set(dir, Granularity::Document);
  EXPECT_EQ(set.corpus, d.corpus);
  EXPECT_EQ(set.train, d.train);
  EXPECT_EQ(set.test, d.test);
  EXPECT_EQ(set.stopwords.size(), d.stopwords.size());
  fs::remove_all(dir);
}
