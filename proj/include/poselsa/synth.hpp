#pragma once

// Seeded generator of tagged course corpora and graded essay sets with a
// planted grade structure: an essay of grade g copies round(f(g) * S) of its
// S sentences from the course contexts and takes the rest from off-topic
// material. Higher grades therefore share strictly more lemma/POS material
// with the course contexts.
//
// Off-topic material uses its own vocabulary. When digression_contexts > 0
// the last contexts of the corpus are off-topic passages and essays copy
// their off-topic sentences from them; otherwise the off-topic sentences are
// fresh and entirely out of vocabulary.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "poselsa/corpus.hpp"
#include "poselsa/error.hpp"

namespace poselsa {

struct SynthSpec {
  std::uint64_t seed = 1;
  int n_contexts = 40;
  int vocab_size = 150;
  std::vector<std::string> tagset{"N", "V", "A", "ADV", "C", "P", "PUNCT"};
  int n_train = 60;
  int n_test = 40;
  int grade_min = 0;
  int grade_max = 5;
  double ambiguity_rate = 0.1;
  std::vector<double> overlap_profile;  // one per grade; empty = linear from 0.1 to 0.9
  int sentences_per_context = 10;
  int sentences_per_essay = 10;
  int digression_contexts = 6;  // corpus contexts written about the off-topic vocabulary

  std::vector<double> profile() const {
    if (!overlap_profile.empty()) return overlap_profile;
    const int g = grade_max - grade_min + 1;
    std::vector<double> p;
    for (int i = 0; i < g; ++i) p.push_back(g == 1 ? 0.5 : 0.1 + 0.8 * i / (g - 1));
    return p;
  }

  /// Course sentences copied into an essay of each grade.
  std::vector<int> on_topic_sentences() const {
    std::vector<int> out;
    for (double f : profile()) out.push_back(static_cast<int>(std::lround(f * sentences_per_essay)));
    return out;
  }

  void validate() const {
    const auto fail = [](const std::string& m) { throw Error(ErrorKind::Validation, "synthetic spec: " + m); };
    if (n_contexts < 2) fail("n_contexts must be at least 2");
    if (digression_contexts < 0 || n_contexts - digression_contexts < 2) fail("need at least 2 course contexts");
    if (n_train <= 0 || n_test <= 0) fail("essay counts must be positive");
    if (sentences_per_context <= 0 || sentences_per_essay <= 0) fail("sentence counts must be positive");
    if (grade_min >= grade_max) fail("grade_min must be below grade_max");
    if (!(ambiguity_rate >= 0.0 && ambiguity_rate <= 1.0)) fail("ambiguity_rate must lie in [0, 1]");
    for (const char* t : {"N", "V", "A", "PUNCT"}) {
      if (std::find(tagset.begin(), tagset.end(), t) == tagset.end()) fail(std::string("tagset lacks ") + t);
    }
    const auto p = profile();
    if (p.size() != static_cast<std::size_t>(grade_max - grade_min + 1)) fail("overlap_profile needs one value per grade");
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(p[i] >= 0.0 && p[i] <= 1.0)) fail("overlap fractions must lie in [0, 1]");
      if (i && !(p[i] > p[i - 1])) fail("overlap_profile must be strictly increasing");
    }
    const auto counts = on_topic_sentences();
    for (std::size_t i = 1; i < counts.size(); ++i) {
      if (counts[i] <= counts[i - 1]) {
        fail("overlap gradient too fine for " + std::to_string(sentences_per_essay) + " sentences per essay");
      }
    }
    const int grades = grade_max - grade_min + 1;
    if (vocab_size < std::max(20, 4 * grades)) {
      fail("vocab_size " + std::to_string(vocab_size) + " too small for " + std::to_string(grades) + " grade bands");
    }
  }
};

struct SynthData {
  Corpus corpus;
  GradedEssaySet train;
  GradedEssaySet test;
  std::vector<std::string> stopwords;  // sorted
  std::set<std::string> course_lemmas;
  std::set<std::string> off_topic_lemmas;
};

namespace detail {

/// Deterministic across platforms, unlike the std distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, n).
  std::size_t below(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = next(); while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

  /// Skewed toward the front of the list, so some entries recur often.
  std::size_t skewed(std::size_t n) {
    const double u = unit();
    return std::min(n - 1, static_cast<std::size_t>(static_cast<double>(n) * u * u));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

inline std::string pseudo_word(std::size_t index, std::size_t salt) {
  static constexpr std::array<const char*, 16> syl{"ka", "lo", "mi", "te", "su", "ra", "ne", "vi",
                                                   "po", "hu", "ja", "ke", "si", "to", "ma", "ly"};
  std::size_t x = index + salt * 4096;
  std::string w;
  for (int i = 0; i < 4; ++i) {
    w += syl[x % 16];
    x /= 16;
  }
  return w;
}

struct Lexeme {
  std::string lemma;
  std::string pos;
  int partner = -1;  // index of the alternative reading's lexeme in the same pool
};

struct Lexicon {
  std::vector<Lexeme> course;                              // topical words
  std::vector<Lexeme> off_topic;
  std::map<std::string, std::vector<Lexeme>> function_words;  // by tag
};

inline const std::vector<std::vector<std::string>>& templates() {
  static const std::vector<std::vector<std::string>> t{
      {"A", "N", "V", "N"},
      {"N", "V", "A", "N"},
      {"P", "V", "A", "N", "C", "N"},
      {"N", "ADV", "V", "N"},
      {"A", "A", "N", "V", "ADV"},
      {"N", "C", "N", "V", "A", "N"},
      {"P", "ADV", "V", "N"},
  };
  return t;
}

class Generator {
 public:
  explicit Generator(const SynthSpec& spec) : spec_(spec), rng_(spec.seed) {}

  SynthData run() {
    spec_.validate();
    build_lexicon();
    SynthData out;
    for (const auto& l : lex_.course) out.course_lemmas.insert(l.lemma);
    for (const auto& l : lex_.off_topic) out.off_topic_lemmas.insert(l.lemma);

    const int n_course = spec_.n_contexts - spec_.digression_contexts;
    n_clusters_ = std::max(2, n_course / 8);
    out.corpus.granularity = Granularity::Document;
    for (int c = 0; c < spec_.n_contexts; ++c) {
      TaggedDocument d;
      d.id = "ctx-" + pad(c + 1);
      const bool course = c < n_course;
      for (int s = 0; s < spec_.sentences_per_context; ++s) {
        d.sentences.push_back(course ? course_sentence(c % n_clusters_) : off_topic_sentence());
      }
      (course ? course_docs_ : digression_docs_).push_back(out.corpus.documents.size());
      out.corpus.documents.push_back(std::move(d));
    }
    out.train = essays("train", spec_.n_train, out.corpus);
    out.test = essays("test", spec_.n_test, out.corpus);

    for (const auto& [tag, words] : lex_.function_words) {
      for (std::size_t i = 0; i < words.size(); i += 2) out.stopwords.push_back(words[i].lemma);
    }
    std::sort(out.stopwords.begin(), out.stopwords.end());
    return out;
  }

 private:
  static std::string pad(int i) {
    std::string s = std::to_string(i);
    return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
  }

  std::string content_tag() {
    const double u = rng_.unit();
    return u < 0.5 ? "N" : (u < 0.75 ? "V" : "A");
  }

  void build_lexicon() {
    const auto n_off = static_cast<std::size_t>(std::max(8, spec_.vocab_size / 4));
    const auto n_course = static_cast<std::size_t>(spec_.vocab_size);
    for (std::size_t i = 0; i < n_course; ++i) lex_.course.push_back({pseudo_word(i, 0), content_tag(), -1});
    for (std::size_t i = 0; i < n_off; ++i) lex_.off_topic.push_back({pseudo_word(i, 1), content_tag(), -1});
    for (auto* pool : {&lex_.course, &lex_.off_topic}) {
      for (auto& l : *pool) {
        // the alternative reading is another word of the pool with a different tag
        for (int tries = 0; tries < 64; ++tries) {
          const auto j = rng_.below(pool->size());
          if ((*pool)[j].pos != l.pos) {
            l.partner = static_cast<int>(j);
            break;
          }
        }
      }
    }
    std::size_t salt_index = 0;
    for (const auto& tag : spec_.tagset) {
      if (tag == "N" || tag == "V" || tag == "A" || tag == "PUNCT") continue;
      auto& words = lex_.function_words[tag];
      for (int i = 0; i < 4; ++i) words.push_back({pseudo_word(salt_index++, 2), tag, -1});
    }
  }

  TaggedToken token(const Lexeme& l, const std::vector<Lexeme>& pool) {
    static constexpr std::array<const char*, 6> suffix{"", "n", "a", "ssa", "t", "lla"};
    TaggedToken t;
    t.surface = l.lemma + suffix[rng_.below(suffix.size())];
    t.readings.push_back({l.lemma, l.pos});
    if (l.partner >= 0 && spec_.ambiguity_rate > 0.0 && rng_.chance(spec_.ambiguity_rate)) {
      const auto& alt = pool[static_cast<std::size_t>(l.partner)];
      t.readings.push_back({alt.lemma, alt.pos});
    }
    return t;
  }

  static TaggedToken punct(const char* p) { return {p, {{p, "PUNCT"}}}; }

  const Lexeme& pick_content(const std::vector<Lexeme>& pool, const std::string& tag, int cluster) {
    // course words: cluster members with probability 0.8, otherwise any word of the tag
    std::vector<std::size_t> cand;
    const bool own = cluster >= 0 && rng_.chance(0.8);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].pos != tag) continue;
      if (own && static_cast<int>(i % static_cast<std::size_t>(n_clusters_)) != cluster) continue;
      cand.push_back(i);
    }
    if (cand.empty()) {
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool[i].pos == tag) cand.push_back(i);
      }
    }
    if (cand.empty()) return pool[rng_.below(pool.size())];
    return pool[cand[rng_.skewed(cand.size())]];
  }

  Sentence sentence_from(const std::vector<Lexeme>& pool, int cluster) {
    const auto& tmpl = templates()[rng_.below(templates().size())];
    Sentence s;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
      const auto& tag = tmpl[i];
      if (tag == "N" || tag == "V" || tag == "A") {
        s.tokens.push_back(token(pick_content(pool, tag, cluster), pool));
      } else if (auto it = lex_.function_words.find(tag); it != lex_.function_words.end()) {
        s.tokens.push_back(token(it->second[rng_.skewed(it->second.size())], pool));
      }
      if (i + 2 == tmpl.size() && tmpl.size() > 4 && rng_.chance(0.2)) s.tokens.push_back(punct(","));
    }
    if (!s.tokens.empty() && !s.tokens.front().surface.empty()) {
      auto& c = s.tokens.front().surface[0];
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    s.tokens.push_back(punct("."));
    return s;
  }

  Sentence course_sentence(int cluster) { return sentence_from(lex_.course, cluster); }
  Sentence off_topic_sentence() { return sentence_from(lex_.off_topic, -1); }

  GradedEssaySet essays(const std::string& prefix, int count, const Corpus& corpus) {
    const int grades = spec_.grade_max - spec_.grade_min + 1;
    const auto on_topic = spec_.on_topic_sentences();
    std::vector<int> assigned;
    for (int i = 0; i < count; ++i) assigned.push_back(spec_.grade_min + i % grades);
    rng_.shuffle(assigned);

    GradedEssaySet set{spec_.grade_min, spec_.grade_max, {}};
    for (int i = 0; i < count; ++i) {
      const int g = assigned[static_cast<std::size_t>(i)];
      const int copies = on_topic[static_cast<std::size_t>(g - spec_.grade_min)];
      std::vector<Sentence> sents;
      for (int s = 0; s < spec_.sentences_per_essay; ++s) {
        if (s < copies) {
          const auto& doc = corpus.documents[course_docs_[rng_.below(course_docs_.size())]];
          sents.push_back(doc.sentences[rng_.below(doc.sentences.size())]);
        } else if (!digression_docs_.empty()) {
          const auto& doc = corpus.documents[digression_docs_[rng_.below(digression_docs_.size())]];
          sents.push_back(doc.sentences[rng_.below(doc.sentences.size())]);
        } else {
          sents.push_back(off_topic_sentence());
        }
      }
      rng_.shuffle(sents);
      set.essays.push_back({TaggedDocument{prefix + "-" + pad(i + 1), std::move(sents)}, g});
    }
    return set;
  }

  SynthSpec spec_;
  SplitMix64 rng_;
  Lexicon lex_;
  int n_clusters_ = 2;
  std::vector<std::size_t> course_docs_;
  std::vector<std::size_t> digression_docs_;
};

}  // namespace detail

inline SynthData generate(const SynthSpec& spec) { return detail::Generator(spec).run(); }

}  // namespace poselsa
