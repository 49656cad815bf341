#pragma once

#include <initializer_list>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "poselsa/poselsa.hpp"

namespace fx {

using poselsa::PosReading;
using poselsa::Sentence;
using poselsa::TaggedDocument;
using poselsa::TaggedToken;

inline TaggedToken tok(std::string surface, std::initializer_list<std::pair<const char*, const char*>> readings) {
  TaggedToken t{std::move(surface), {}};
  for (const auto& [lemma, pos] : readings) t.readings.push_back({lemma, pos});
  return t;
}

inline Sentence sentence(std::initializer_list<TaggedToken> tokens) { return Sentence{tokens}; }

// "puolustuksen suomalainen tukipilari"
inline Sentence pillar_phrase() {
  return sentence({tok("puolustuksen", {{"puolustus", "N"}}), tok("suomalainen", {{"suomalainen", "A"}}),
                   tok("tukipilari", {{"tukipilari", "N"}})});
}

inline TaggedToken hanta() { return tok("häntä", {{"häntä", "N"}, {"hän", "P"}}); }

inline poselsa::Corpus corpus_from(const std::string& text,
                                   poselsa::Granularity g = poselsa::Granularity::Document) {
  std::istringstream in(text);
  return poselsa::parse_corpus(in, g);
}

inline poselsa::GradedEssaySet essays_from(const std::string& text, int lo, int hi) {
  std::istringstream in(text);
  return poselsa::parse_essay_set(in, lo, hi);
}

/// One-sentence document whose tokens are the given lemmas, all tagged N.
inline TaggedDocument bag(std::string id, const std::vector<std::string>& lemmas) {
  TaggedDocument d{std::move(id), {Sentence{}}};
  for (const auto& l : lemmas) d.sentences[0].tokens.push_back({l, {{l, "N"}}});
  return d;
}

inline poselsa::StopwordSet no_stopwords() { return {}; }

inline poselsa::EvalSet eval_set(std::string name, const poselsa::SynthData& d) {
  return {std::move(name), d.corpus, d.train, d.test, poselsa::StopwordSet(d.stopwords.begin(), d.stopwords.end())};
}

/// Small random corpus with no more distinct words than contexts, so the
/// weighted matrix has full row rank and every query lies in its column space.
struct LsaFixture {
  poselsa::Corpus corpus;
  std::vector<TaggedDocument> essays;
};

inline LsaFixture random_lsa_fixture(std::mt19937& rng) {
  std::uniform_int_distribution<int> words_d(3, 8);
  const int words = words_d(rng);
  std::uniform_int_distribution<int> ctx_d(words + 1, 14), word_d(0, words - 1), len_d(2, 12);
  const int contexts = ctx_d(rng);
  auto lemma = [](int w) { return "w" + std::to_string(w); };

  std::vector<std::vector<std::string>> bags(static_cast<std::size_t>(contexts));
  std::uniform_int_distribution<int> pick_ctx(0, contexts - 1);
  for (int w = 0; w < words; ++w) {
    bags[static_cast<std::size_t>(pick_ctx(rng))].push_back(lemma(w));
    bags[static_cast<std::size_t>(pick_ctx(rng))].push_back(lemma(w));
  }
  for (auto& b : bags)
    for (int i = len_d(rng); i > 0; --i) b.push_back(lemma(word_d(rng)));

  LsaFixture f;
  for (int j = 0; j < contexts; ++j) f.corpus.documents.push_back(bag("c" + std::to_string(j), bags[static_cast<std::size_t>(j)]));
  for (int e = 0; e < 4; ++e) {
    std::vector<std::string> essay;
    for (int i = len_d(rng); i > 0; --i) essay.push_back(lemma(word_d(rng)));
    essay.push_back("outside");
    f.essays.push_back(bag("e" + std::to_string(e), essay));
  }
  return f;
}

}  // namespace fx
