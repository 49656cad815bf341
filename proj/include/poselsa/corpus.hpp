#pragma once

// Tagged-record corpus format (UTF-8, line based):
//
//   #doc <id>            starts a document
//   #grade <int>         optional, only directly after #doc (essay files)
//   <surface>\t<lemma>/<pos>[;<lemma>/<pos>...]
//   <blank line>         sentence boundary
//
// Other lines starting with '#' and containing no tab are comments.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "poselsa/error.hpp"
#include "poselsa/text.hpp"

namespace poselsa {

struct PosReading {
  std::string lemma;
  std::string pos;

  friend auto operator<=>(const PosReading&, const PosReading&) = default;
};

struct TaggedToken {
  std::string surface;
  std::vector<PosReading> readings;  // first = tagger's primary choice

  const PosReading& primary() const { return readings.front(); }

  friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

struct Sentence {
  std::vector<TaggedToken> tokens;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct TaggedDocument {
  std::string id;
  std::vector<Sentence> sentences;

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.tokens.size();
    return n;
  }

  friend bool operator==(const TaggedDocument&, const TaggedDocument&) = default;
};

enum class Granularity { Document, Sentence };

inline std::string_view to_string(Granularity g) {
  return g == Granularity::Document ? "document" : "sentence";
}

inline Granularity parse_granularity(std::string_view s) {
  if (s == "document") return Granularity::Document;
  if (s == "sentence") return Granularity::Sentence;
  throw Error(ErrorKind::Validation, "unknown granularity '" + std::string(s) + "'");
}

/// A view of one WCM column: a run of sentences with an identifier.
struct ContextView {
  std::string id;
  std::vector<const Sentence*> sentences;
};

struct Corpus {
  std::vector<TaggedDocument> documents;
  Granularity granularity = Granularity::Document;

  std::size_t context_count() const {
    if (granularity == Granularity::Document) return documents.size();
    std::size_t n = 0;
    for (const auto& d : documents) n += d.sentences.size();
    return n;
  }

  /// Contexts in corpus order. Sentence contexts are named `<doc>#<1-based index>`.
  std::vector<ContextView> contexts() const {
    std::vector<ContextView> out;
    for (const auto& d : documents) {
      if (granularity == Granularity::Document) {
        ContextView cv{d.id, {}};
        for (const auto& s : d.sentences) cv.sentences.push_back(&s);
        out.push_back(std::move(cv));
      } else {
        for (std::size_t i = 0; i < d.sentences.size(); ++i) {
          out.push_back({d.id + "#" + std::to_string(i + 1), {&d.sentences[i]}});
        }
      }
    }
    return out;
  }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct GradedEssay {
  TaggedDocument essay;
  int grade = 0;

  friend bool operator==(const GradedEssay&, const GradedEssay&) = default;
};

struct GradedEssaySet {
  int grade_min = 0;
  int grade_max = 0;
  std::vector<GradedEssay> essays;

  std::size_t size() const { return essays.size(); }

  std::vector<int> grades() const {
    std::vector<int> g;
    g.reserve(essays.size());
    for (const auto& e : essays) g.push_back(e.grade);
    return g;
  }

  friend bool operator==(const GradedEssaySet&, const GradedEssaySet&) = default;
};

using StopwordSet = std::unordered_set<std::string>;

/// Lemma normalization applied to corpus lemmas and stopwords alike.
inline std::string normalize_lemma(std::string_view lemma) { return text::to_lower(lemma); }

namespace detail {

struct RawRecord {
  std::string id;
  std::optional<int> grade;
  std::size_t line = 0;
  TaggedDocument doc;
};

inline Error parse_error(const std::string& source, std::size_t line, const std::string& msg) {
  return Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ": " + msg);
}

inline std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
  return v;
}

inline TaggedToken parse_token_line(std::string_view line, const std::string& source,
                                    std::size_t lineno) {
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos) {
    throw parse_error(source, lineno, "token line needs '<surface>\\t<readings>'");
  }
  TaggedToken tok;
  tok.surface = std::string(line.substr(0, tab));
  if (tok.surface.empty()) throw parse_error(source, lineno, "empty surface form");
  const auto readings = text::trim(line.substr(tab + 1));
  if (readings.empty()) throw parse_error(source, lineno, "token has no readings");
  for (auto part : text::split(readings, ';')) {
    const auto slash = part.rfind('/');
    if (slash == std::string_view::npos || slash == 0 || slash + 1 == part.size()) {
      throw parse_error(source, lineno, "reading '" + std::string(part) + "' is not <lemma>/<pos>");
    }
    PosReading r{normalize_lemma(part.substr(0, slash)), std::string(part.substr(slash + 1))};
    if (text::has_whitespace(r.lemma) || text::has_whitespace(r.pos)) {
      throw parse_error(source, lineno, "whitespace inside reading '" + std::string(part) + "'");
    }
    // Readings are kept distinct; a duplicate after case folding is dropped.
    if (std::find(tok.readings.begin(), tok.readings.end(), r) == tok.readings.end()) {
      tok.readings.push_back(std::move(r));
    }
  }
  return tok;
}

inline std::vector<RawRecord> parse_records(std::istream& in, const std::string& source) {
  std::vector<RawRecord> records;
  std::set<std::string> ids;
  Sentence current;
  bool grade_allowed = false;
  std::string line;
  std::size_t lineno = 0;

  auto close_sentence = [&] {
    if (!current.tokens.empty()) records.back().doc.sentences.push_back(std::move(current));
    current = Sentence{};
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (lineno == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);

    if (text::trim(view).empty()) {
      if (!records.empty()) close_sentence();
      grade_allowed = false;
      continue;
    }
    if (view.front() == '#' && view.find('\t') == std::string_view::npos) {
      if (view.starts_with("#doc") && (view.size() == 4 || view[4] == ' ')) {
        if (!records.empty()) close_sentence();
        const auto id = std::string(text::trim(view.substr(4)));
        if (id.empty()) throw parse_error(source, lineno, "#doc without an id");
        if (text::has_whitespace(id)) throw parse_error(source, lineno, "document id contains whitespace");
        if (!ids.insert(id).second) throw parse_error(source, lineno, "duplicate document id '" + id + "'");
        records.push_back(RawRecord{id, std::nullopt, lineno, TaggedDocument{id, {}}});
        grade_allowed = true;
        continue;
      }
      if (view.starts_with("#grade") && (view.size() == 6 || view[6] == ' ')) {
        if (!grade_allowed) throw parse_error(source, lineno, "#grade must directly follow #doc");
        const auto g = parse_int(text::trim(view.substr(6)));
        if (!g) throw parse_error(source, lineno, "#grade needs an integer");
        records.back().grade = *g;
        grade_allowed = false;
        continue;
      }
      continue;  // comment
    }
    if (records.empty()) throw parse_error(source, lineno, "token line before any #doc");
    grade_allowed = false;
    current.tokens.push_back(parse_token_line(view, source, lineno));
  }
  if (!records.empty()) close_sentence();
  return records;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  return in;
}

}  // namespace detail

inline Corpus parse_corpus(std::istream& in, Granularity granularity,
                           const std::string& source = "<stream>") {
  Corpus corpus;
  corpus.granularity = granularity;
  for (auto& rec : detail::parse_records(in, source)) corpus.documents.push_back(std::move(rec.doc));
  if (corpus.context_count() == 0) throw Error(ErrorKind::Parse, source + ": corpus has no contexts");
  return corpus;
}

inline Corpus parse_corpus(const std::filesystem::path& path,
                           Granularity granularity = Granularity::Document) {
  auto in = detail::open_input(path);
  return parse_corpus(in, granularity, path.string());
}

inline GradedEssaySet parse_essay_set(std::istream& in, int grade_min, int grade_max,
                                      const std::string& source = "<stream>") {
  if (grade_min >= grade_max) {
    throw Error(ErrorKind::Validation, "grade scale needs grade_min < grade_max");
  }
  GradedEssaySet set{grade_min, grade_max, {}};
  for (auto& rec : detail::parse_records(in, source)) {
    if (!rec.grade) {
      throw detail::parse_error(source, rec.line, "essay '" + rec.id + "' has no #grade line");
    }
    if (*rec.grade < grade_min || *rec.grade > grade_max) {
      throw Error(ErrorKind::Validation,
                  "essay '" + rec.id + "' has grade " + std::to_string(*rec.grade) + " outside " +
                      std::to_string(grade_min) + "-" + std::to_string(grade_max));
    }
    set.essays.push_back({std::move(rec.doc), *rec.grade});
  }
  return set;
}

inline GradedEssaySet parse_essay_set(const std::filesystem::path& path, int grade_min, int grade_max) {
  auto in = detail::open_input(path);
  return parse_essay_set(in, grade_min, grade_max, path.string());
}

/// An essay whose human grade may be unknown.
struct EssayRecord {
  TaggedDocument essay;
  std::optional<int> grade;
};

/// Essay file with optional #grade lines, for grading unseen essays.
inline std::vector<EssayRecord> parse_essays(std::istream& in, const std::string& source = "<stream>") {
  std::vector<EssayRecord> out;
  for (auto& rec : detail::parse_records(in, source)) out.push_back({std::move(rec.doc), rec.grade});
  return out;
}

inline std::vector<EssayRecord> parse_essays(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_essays(in, path.string());
}

inline StopwordSet load_stopwords(std::istream& in) {
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    const auto w = text::trim(line);
    if (w.empty() || w.front() == '#') continue;
    words.insert(normalize_lemma(w));
  }
  return words;
}

inline StopwordSet load_stopwords(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return load_stopwords(in);
}

// Serialization back to the record format.

inline void write_document(std::ostream& out, const TaggedDocument& doc,
                           std::optional<int> grade = std::nullopt) {
  out << "#doc " << doc.id << '\n';
  if (grade) out << "#grade " << *grade << '\n';
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    if (s) out << '\n';
    for (const auto& tok : doc.sentences[s].tokens) {
      out << tok.surface << '\t';
      for (std::size_t r = 0; r < tok.readings.size(); ++r) {
        if (r) out << ';';
        out << tok.readings[r].lemma << '/' << tok.readings[r].pos;
      }
      out << '\n';
    }
  }
  out << '\n';
}

inline void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& d : corpus.documents) write_document(out, d);
}

inline void write_essay_set(std::ostream& out, const GradedEssaySet& set) {
  for (const auto& e : set.essays) write_document(out, e.essay, e.grade);
}

}  // namespace poselsa
