#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "poselsa/corpus.hpp"
#include "poselsa/error.hpp"
#include "poselsa/text.hpp"

namespace poselsa {

/// How a token occurrence is keyed in the word-by-context matrix.
enum class EntryKind {
  LemmaOnly,   // lemma
  CurrentPos,  // (lemma, cur)
  PrevPos,     // (prev, lemma, cur)
  NextPos,     // (lemma, cur, next)
};

inline std::string_view to_string(EntryKind k) {
  switch (k) {
    case EntryKind::LemmaOnly: return "lemma";
    case EntryKind::CurrentPos: return "cur";
    case EntryKind::PrevPos: return "prev";
    case EntryKind::NextPos: return "next";
  }
  return "?";
}

inline EntryKind parse_entry_kind(std::string_view s) {
  if (s == "lemma") return EntryKind::LemmaOnly;
  if (s == "cur" || s == "pos") return EntryKind::CurrentPos;
  if (s == "prev") return EntryKind::PrevPos;
  if (s == "next") return EntryKind::NextPos;
  throw Error(ErrorKind::Validation, "unknown entry kind '" + std::string(s) + "'");
}

enum class Weighting { LogEntropy, RawCount };

inline std::string_view to_string(Weighting w) {
  return w == Weighting::LogEntropy ? "log-entropy" : "raw";
}

inline Weighting parse_weighting(std::string_view s) {
  if (s == "log-entropy" || s == "logentropy") return Weighting::LogEntropy;
  if (s == "raw" || s == "rawcount") return Weighting::RawCount;
  throw Error(ErrorKind::Validation, "unknown weighting '" + std::string(s) + "'");
}

struct ModelConfig {
  std::vector<EntryKind> kinds{EntryKind::LemmaOnly};
  bool include_ambiguous = false;
  bool content_words_only = false;
  std::set<std::string> content_tags{"N", "V", "A"};
  std::string boundary_tag = "PUNCT";
  bool prune_singletons = true;
  Weighting weighting = Weighting::LogEntropy;

  /// Throws Validation on an unusable configuration.
  void validate() const {
    if (kinds.empty()) throw Error(ErrorKind::Validation, "model config needs at least one entry kind");
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      for (std::size_t j = i + 1; j < kinds.size(); ++j) {
        if (kinds[i] == kinds[j]) {
          throw Error(ErrorKind::Validation,
                      "entry kind '" + std::string(to_string(kinds[i])) + "' listed twice");
        }
      }
    }
    if (content_words_only && content_tags.empty()) {
      throw Error(ErrorKind::Validation, "content-words filter needs a non-empty tag set");
    }
    if (boundary_tag.empty() || text::has_whitespace(boundary_tag)) {
      throw Error(ErrorKind::Validation, "boundary tag must be a non-empty token");
    }
  }

  /// Canonical text form; two configs with the same canonical form behave identically.
  std::string canonical() const {
    std::string s = "kinds=";
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (i) s += ',';
      s += to_string(kinds[i]);
    }
    s += ";ambiguous=";
    s += include_ambiguous ? '1' : '0';
    s += ";content_words=";
    s += content_words_only ? '1' : '0';
    s += ";content_tags=";
    bool first = true;
    for (const auto& t : content_tags) {
      if (!first) s += ',';
      s += t;
      first = false;
    }
    s += ";boundary=" + boundary_tag;
    s += ";prune=";
    s += prune_singletons ? '1' : '0';
    s += ";weighting=";
    s += to_string(weighting);
    return s;
  }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Named presets: lemma | pos | prev | next | cn | pcn.
inline std::vector<EntryKind> preset_kinds(std::string_view name) {
  using K = EntryKind;
  if (name == "lemma") return {K::LemmaOnly};
  if (name == "pos") return {K::CurrentPos};
  if (name == "prev") return {K::PrevPos};
  if (name == "next") return {K::NextPos};
  if (name == "cn") return {K::CurrentPos, K::NextPos};
  if (name == "pcn") return {K::PrevPos, K::CurrentPos, K::NextPos};
  throw Error(ErrorKind::Validation, "unknown preset '" + std::string(name) + "'");
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"lemma", "pos", "prev", "next", "cn", "pcn"};
  return names;
}

/// Row identity of the WCM. Absent fields are std::nullopt.
struct EntryKey {
  std::optional<std::string> prev_tag;
  std::string lemma;
  std::optional<std::string> cur_tag;
  std::optional<std::string> next_tag;

  static EntryKey make(EntryKind kind, std::string lemma, std::string cur, std::string_view prev,
                       std::string_view next) {
    EntryKey k;
    k.lemma = std::move(lemma);
    switch (kind) {
      case EntryKind::LemmaOnly: break;
      case EntryKind::CurrentPos: k.cur_tag = std::move(cur); break;
      case EntryKind::PrevPos:
        k.prev_tag = std::string(prev);
        k.cur_tag = std::move(cur);
        break;
      case EntryKind::NextPos:
        k.cur_tag = std::move(cur);
        k.next_tag = std::string(next);
        break;
    }
    return k;
  }

  /// Human-readable form, e.g. `(PUNCT, puolustus, N)` or `puolustus`.
  std::string str() const {
    if (!prev_tag && !cur_tag && !next_tag) return lemma;
    std::string s = "(";
    if (prev_tag) s += *prev_tag + ", ";
    s += lemma;
    if (cur_tag) s += ", " + *cur_tag;
    if (next_tag) s += ", " + *next_tag;
    return s + ")";
  }

  friend auto operator<=>(const EntryKey&, const EntryKey&) = default;
};

struct EntryKeyHash {
  std::size_t operator()(const EntryKey& k) const noexcept {
    std::uint64_t h = text::fnv1a(k.lemma);
    auto mix = [&h](const std::optional<std::string>& f, char tag) {
      h = text::fnv1a(std::string_view(&tag, 1), h);
      if (f) h = text::fnv1a(*f, h);
    };
    mix(k.prev_tag, 'p');
    mix(k.cur_tag, 'c');
    mix(k.next_tag, 'n');
    return static_cast<std::size_t>(h);
  }
};

/// Emits the entry keys of one sentence in token order, then kind order,
/// then reading order.
///
/// Neighbor tags always come from the neighbor's primary reading, with the
/// boundary tag standing in at sentence edges. Tokens whose primary POS is
/// the boundary tag emit nothing. With content_words_only, readings outside
/// content_tags emit nothing; neighbor tags are not filtered.
inline std::vector<EntryKey> generate_entries(const Sentence& sentence, const ModelConfig& config) {
  std::vector<EntryKey> out;
  const auto& toks = sentence.tokens;
  for (std::size_t t = 0; t < toks.size(); ++t) {
    const auto& tok = toks[t];
    if (tok.readings.empty() || tok.primary().pos == config.boundary_tag) continue;
    const std::string_view prev = t == 0 ? std::string_view(config.boundary_tag)
                                         : std::string_view(toks[t - 1].primary().pos);
    const std::string_view next = t + 1 == toks.size() ? std::string_view(config.boundary_tag)
                                                       : std::string_view(toks[t + 1].primary().pos);
    const std::size_t n_readings = config.include_ambiguous ? tok.readings.size() : 1;
    for (EntryKind kind : config.kinds) {
      for (std::size_t r = 0; r < n_readings; ++r) {
        const auto& reading = tok.readings[r];
        if (config.content_words_only && !config.content_tags.contains(reading.pos)) continue;
        out.push_back(EntryKey::make(kind, reading.lemma, reading.pos, prev, next));
      }
    }
  }
  return out;
}

/// All entries of a document, sentence by sentence.
inline std::vector<EntryKey> generate_entries(const TaggedDocument& doc, const ModelConfig& config) {
  std::vector<EntryKey> out;
  for (const auto& s : doc.sentences) {
    auto part = generate_entries(s, config);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

}  // namespace poselsa
