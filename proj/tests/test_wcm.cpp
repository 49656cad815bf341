#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace poselsa;

namespace {

Corpus two_contexts() {
  Corpus c;
  c.documents.push_back({"pillar", {fx::pillar_phrase()}});
  c.documents.push_back(fx::bag("other", {"kissa", "koira"}));
  return c;
}

Wcm counts_of(std::vector<std::vector<long>> dense) {
  Wcm w;
  w.counts.cols = dense.front().size();
  for (std::size_t i = 0; i < dense.size(); ++i) {
    w.vocabulary.intern(EntryKey{std::nullopt, "t" + std::to_string(i), std::nullopt, std::nullopt});
    w.counts.rows.emplace_back();
    for (std::size_t j = 0; j < dense[i].size(); ++j) {
      if (dense[i][j]) w.counts.rows.back().push_back({j, dense[i][j]});
    }
  }
  for (std::size_t j = 0; j < w.counts.cols; ++j) w.context_ids.push_back("c" + std::to_string(j));
  return w;
}

EntryKey lemma_key(std::string l) { return EntryKey{std::nullopt, std::move(l), std::nullopt, std::nullopt}; }

}  // namespace

TEST(Wcm, PillarPhraseCounts) {
  const auto w = build_wcm(two_contexts(), ModelConfig{}, {});
  EXPECT_EQ(w.rows(), 5u);
  EXPECT_EQ(w.cols(), 2u);
  for (const char* l : {"puolustus", "suomalainen", "tukipilari"}) {
    const auto i = w.vocabulary.find(lemma_key(l));
    ASSERT_TRUE(i) << l;
    EXPECT_EQ(w.counts.get(*i, 0), 1);
    EXPECT_EQ(w.counts.get(*i, 1), 0);
  }
  EXPECT_EQ(w.context_ids, (std::vector<std::string>{"pillar", "other"}));
}

TEST(Wcm, StopwordRowAbsent) {
  const auto w = build_wcm(two_contexts(), ModelConfig{}, {"suomalainen"});
  EXPECT_FALSE(w.vocabulary.find(lemma_key("suomalainen")));
  EXPECT_EQ(w.rows(), 4u);
}

TEST(Wcm, RepeatedWordCountsTwice) {
  Corpus c;
  c.documents.push_back(fx::bag("a", {"kissa", "kissa"}));
  c.documents.push_back(fx::bag("b", {"koira"}));
  const auto w = build_wcm(c, ModelConfig{}, {});
  EXPECT_EQ(w.counts.get(*w.vocabulary.find(lemma_key("kissa")), 0), 2);
}

TEST(Wcm, NeedsTwoContexts) {
  Corpus c;
  c.documents.push_back(fx::bag("a", {"kissa"}));
  EXPECT_THROW(build_wcm(c, ModelConfig{}, {}), Error);
}

TEST(Wcm, EverythingStoppedIsEmptyModel) {
  try {
    build_wcm(two_contexts(), ModelConfig{}, {"puolustus", "suomalainen", "tukipilari", "kissa", "koira"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyModel);
  }
}

TEST(Prune, SingletonRemovedPairKept) {
  const auto w = prune_singletons(counts_of({{1, 0, 0}, {1, 1, 0}, {0, 0, 2}}));
  ASSERT_EQ(w.rows(), 2u);
  EXPECT_EQ(w.vocabulary.at(0).lemma, "t1");
  EXPECT_EQ(w.vocabulary.at(1).lemma, "t2");
}

TEST(Prune, FixpointWhenNoSingletons) {
  const auto in = counts_of({{2, 0}, {1, 1}, {0, 3}});
  const auto out = prune_singletons(in);
  EXPECT_EQ(out.counts.to_dense(), in.counts.to_dense());
  EXPECT_EQ(out.vocabulary.keys(), in.vocabulary.keys());
}

TEST(Prune, AllPrunedIsEmptyModel) {
  try {
    prune_singletons(counts_of({{1, 0}, {0, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyModel);
  }
}

TEST(LogEntropy, ConcentratedTermHasWeightOne) {
  const auto w = apply_log_entropy(counts_of({{1, 0, 0, 0}, {1, 1, 1, 1}}));
  EXPECT_DOUBLE_EQ(w.global_weights[0], 1.0);
  EXPECT_NEAR(w.cells.get(0, 0), std::log(2.0), 1e-15);
}

TEST(LogEntropy, UniformTermHasWeightZero) {
  for (std::size_t n : {2u, 3u, 7u, 40u}) {
    std::vector<long> row(n, 3);
    const auto w = apply_log_entropy(counts_of({row}));
    EXPECT_NEAR(w.global_weights[0], 0.0, 1e-12) << n;
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(w.cells.get(0, j), 0.0, 1e-12);
  }
}

TEST(LogEntropy, HandComputedPartialSpread) {
  // counts (1, 3) over n = 4: g = 1 + (0.25 ln 0.25 + 0.75 ln 0.75) / ln 4
  const auto w = apply_log_entropy(counts_of({{1, 3, 0, 0}}));
  const double g = 1.0 + (0.25 * std::log(0.25) + 0.75 * std::log(0.75)) / std::log(4.0);
  EXPECT_NEAR(w.global_weights[0], g, 1e-15);
  EXPECT_NEAR(w.cells.get(0, 1), std::log(4.0) * g, 1e-15);
}

TEST(LogEntropy, WeightAlwaysInUnitInterval) {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> n_dist(2, 30), cnt(0, 6);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = n_dist(rng);
    std::vector<long> row(static_cast<std::size_t>(n));
    for (auto& c : row) c = cnt(rng);
    row[0] += 1;
    const double g = apply_log_entropy(counts_of({row})).global_weights[0];
    ASSERT_GE(g, 0.0);
    ASSERT_LE(g, 1.0);
  }
}

TEST(LogEntropy, NeedsTwoContexts) { EXPECT_THROW(apply_log_entropy(counts_of({{3}})), Error); }

TEST(RawCount, CellsEqualCounts) {
  const auto in = counts_of({{2, 0, 1}, {0, 5, 5}});
  const auto w = apply_weighting(in, Weighting::RawCount);
  EXPECT_EQ(w.dense(), in.counts.to_dense());
  EXPECT_EQ(w.global_weights, (std::vector<double>{1.0, 1.0}));
}

TEST(LogEntropy, ContextPermutationPermutesColumns) {
  const auto a = counts_of({{2, 0, 1, 4}, {1, 1, 1, 0}, {0, 3, 0, 1}});
  const auto b = counts_of({{4, 1, 0, 2}, {0, 1, 1, 1}, {1, 0, 3, 0}});  // columns reversed
  const auto wa = apply_log_entropy(a).dense();
  const auto wb = apply_log_entropy(b).dense();
  EXPECT_TRUE(wa.isApprox(wb.rowwise().reverse(), 1e-15));
}

TEST(Wcm, PipelineIsDeterministic) {
  SynthSpec spec;
  spec.n_contexts = 10;
  const auto data = generate(spec);
  ModelConfig c;
  c.kinds = preset_kinds("pcn");
  const auto a = build_weighted_wcm(data.corpus, c, {});
  const auto b = build_weighted_wcm(data.corpus, c, {});
  EXPECT_EQ(a.dense(), b.dense());
  EXPECT_EQ(a.vocabulary.keys(), b.vocabulary.keys());
}

TEST(Wcm, MatrixMarketDump) {
  std::ostringstream mm, voc;
  const auto w = counts_of({{2, 0}, {0, 1}});
  write_matrix_market(mm, w.counts);
  write_vocabulary(voc, w.vocabulary);
  EXPECT_EQ(mm.str(), "%%MatrixMarket matrix coordinate integer general\n2 2 2\n1 1 2\n2 2 1\n");
  EXPECT_EQ(voc.str(), "0\t\tt0\t\t\n1\t\tt1\t\t\n");
}
