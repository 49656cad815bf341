#include <filesystem>
#include <functional>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace poselsa;

namespace {

const char* kThreeDocs =
    "#doc a\n"
    "puolustuksen\tpuolustus/N\n"
    "suomalainen\tsuomalainen/A\n"
    "\n"
    "#doc b\n"
    "häntä\thäntä/N;hän/P\n"
    "\n"
    "#doc c\n"
    "tukipilari\ttukipilari/N\n";

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no poselsa::Error thrown";
  return ErrorKind::Io;
}

}  // namespace

TEST(Corpus, DocumentGranularityCountsRecords) {
  const auto c = fx::corpus_from(kThreeDocs);
  EXPECT_EQ(c.context_count(), 3u);
  EXPECT_EQ(c.contexts()[1].id, "b");
}

TEST(Corpus, AmbiguousReadingsKeepOrder) {
  const auto c = fx::corpus_from(kThreeDocs);
  const auto& t = c.documents[1].sentences[0].tokens[0];
  ASSERT_EQ(t.readings.size(), 2u);
  EXPECT_EQ(t.readings[0], (PosReading{"häntä", "N"}));
  EXPECT_EQ(t.readings[1], (PosReading{"hän", "P"}));
  EXPECT_EQ(t.primary().pos, "N");
}

TEST(Corpus, SentenceGranularity) {
  std::string text = "#doc essay\n";
  for (int s = 0; s < 5; ++s) text += "sana\tsana/N\n.\t./PUNCT\n\n";
  const auto c = fx::corpus_from(text, Granularity::Sentence);
  EXPECT_EQ(c.context_count(), 5u);
  EXPECT_EQ(c.contexts()[4].id, "essay#5");
  EXPECT_EQ(fx::corpus_from(text).context_count(), 1u);
}

TEST(Corpus, LemmasAreCaseFolded) {
  const auto c = fx::corpus_from("#doc x\nHelsinki\tHelsinki/N;HELSINKI/N\nÄÄNI\tÄÄNI/N\n");
  const auto& toks = c.documents[0].sentences[0].tokens;
  ASSERT_EQ(toks[0].readings.size(), 1u);
  EXPECT_EQ(toks[0].readings[0].lemma, "helsinki");
  EXPECT_EQ(toks[0].surface, "Helsinki");
  EXPECT_EQ(toks[1].readings[0].lemma, "ääni");
}

TEST(Corpus, CommentsBomAndCrlf) {
  const auto c = fx::corpus_from("\xEF\xBB\xBF# generated\r\n#doc x\r\nkissa\tkissa/N\r\n# note\r\n");
  ASSERT_EQ(c.context_count(), 1u);
  EXPECT_EQ(c.documents[0].sentences[0].tokens[0].readings[0].pos, "N");
}

TEST(Corpus, LemmaMayContainSlash) {
  const auto c = fx::corpus_from("#doc x\n1/2\t1/2/NUM\n");
  EXPECT_EQ(c.documents[0].sentences[0].tokens[0].readings[0].lemma, "1/2");
}

TEST(Corpus, ParseErrorsNameTheLine) {
  try {
    fx::corpus_from("#doc x\nkissa kissa/N\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  EXPECT_EQ(kind_of([] { fx::corpus_from("kissa\tkissa/N\n"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { fx::corpus_from("#doc x\nkissa\tkissa\n"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { fx::corpus_from("#doc x\nkissa\t/N\n"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { fx::corpus_from("#doc x\na\ta/N\n#doc x\nb\tb/N\n"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { fx::corpus_from("#doc x\na\ta/N\n#grade 3\n"); }), ErrorKind::Parse);
}

TEST(Corpus, EmptyCorpusRejected) {
  EXPECT_EQ(kind_of([] { fx::corpus_from(""); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { fx::corpus_from("# only a comment\n"); }), ErrorKind::Parse);
}

TEST(Corpus, MissingFileIsIoError) {
  EXPECT_EQ(kind_of([] { parse_corpus(std::filesystem::path("/nonexistent/corpus.tagged")); }), ErrorKind::Io);
}

TEST(EssaySet, SeventyEssaysOnZeroToSix) {
  std::string text;
  for (int i = 0; i < 70; ++i) {
    text += "#doc e" + std::to_string(i) + "\n#grade " + std::to_string(i % 7) + "\nsana\tsana/N\n\n";
  }
  const auto set = fx::essays_from(text, 0, 6);
  EXPECT_EQ(set.size(), 70u);
  EXPECT_EQ(set.grades()[13], 6);
}

TEST(EssaySet, GradeOutsideScaleNamesEssay) {
  try {
    fx::essays_from("#doc late-essay\n#grade 7\nsana\tsana/N\n", 0, 6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
    EXPECT_NE(std::string(e.what()).find("late-essay"), std::string::npos);
  }
}

TEST(EssaySet, EmptyListAllowed) { EXPECT_EQ(fx::essays_from("", 0, 6).size(), 0u); }

TEST(EssaySet, MissingGradeRejected) {
  EXPECT_EQ(kind_of([] { fx::essays_from("#doc e\nsana\tsana/N\n", 0, 6); }), ErrorKind::Parse);
}

TEST(EssaySet, UngradedEssaysParseLeniently) {
  std::istringstream in("#doc a\n#grade 2\nx\tx/N\n\n#doc b\ny\ty/N\n");
  const auto recs = parse_essays(in);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].grade, 2);
  EXPECT_FALSE(recs[1].grade.has_value());
}

TEST(Stopwords, SetSemantics) {
  std::istringstream two("ja\non\n");
  EXPECT_EQ(load_stopwords(two).size(), 2u);
  std::istringstream dup("ja\nja\n");
  EXPECT_EQ(load_stopwords(dup).size(), 1u);
  std::istringstream empty("");
  EXPECT_TRUE(load_stopwords(empty).empty());
  EXPECT_EQ(kind_of([] { load_stopwords(std::filesystem::path("/nonexistent/stop.txt")); }), ErrorKind::Io);
}

TEST(Corpus, WriteThenParseRoundTrips) {
  SynthSpec spec;
  spec.n_contexts = 12;
  spec.n_train = 12;
  spec.n_test = 6;
  spec.ambiguity_rate = 0.3;
  const auto data = generate(spec);

  std::ostringstream c;
  write_corpus(c, data.corpus);
  EXPECT_EQ(fx::corpus_from(c.str()), data.corpus);

  std::ostringstream e;
  write_essay_set(e, data.train);
  EXPECT_EQ(fx::essays_from(e.str(), spec.grade_min, spec.grade_max), data.train);
}
