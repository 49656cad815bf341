#pragma once

// On-disk layout of one evaluation set:
//
//   <dir>/corpus.tagged     course material
//   <dir>/train.tagged      graded training essays
//   <dir>/test.tagged       graded test essays
//   <dir>/stopwords.txt     optional
//   <dir>/scale             "<grade_min> <grade_max>", optional if given elsewhere

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "poselsa/corpus.hpp"
#include "poselsa/error.hpp"
#include "poselsa/eval.hpp"
#include "poselsa/synth.hpp"

namespace poselsa {

namespace files {
inline constexpr const char* corpus = "corpus.tagged";
inline constexpr const char* train = "train.tagged";
inline constexpr const char* test = "test.tagged";
inline constexpr const char* stopwords = "stopwords.txt";
inline constexpr const char* scale = "scale";
}  // namespace files

inline std::pair<int, int> read_scale(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  int lo = 0, hi = 0;
  if (!(in >> lo >> hi)) throw Error(ErrorKind::Parse, path.string() + ": expected '<grade_min> <grade_max>'");
  if (lo >= hi) throw Error(ErrorKind::Validation, path.string() + ": grade_min must be below grade_max");
  return {lo, hi};
}

inline EvalSet load_eval_set(const std::filesystem::path& dir, Granularity granularity,
                             std::optional<std::pair<int, int>> scale = std::nullopt) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::Io, "'" + dir.string() + "' is not a directory");
  const auto [lo, hi] = scale ? *scale : read_scale(dir / files::scale);
  EvalSet set;
  set.name = dir.filename().string();
  if (set.name.empty()) set.name = dir.parent_path().filename().string();
  set.corpus = parse_corpus(dir / files::corpus, granularity);
  set.train = parse_essay_set(dir / files::train, lo, hi);
  set.test = parse_essay_set(dir / files::test, lo, hi);
  if (std::filesystem::exists(dir / files::stopwords)) set.stopwords = load_stopwords(dir / files::stopwords);
  return set;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

/// Writes a synthetic set in the layout above, creating `dir` if needed.
inline void write_synthetic(const std::filesystem::path& dir, const SynthData& data) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create '" + dir.string() + "': " + ec.message());
  std::ostringstream corpus, train, test, stop, scale;
  write_corpus(corpus, data.corpus);
  write_essay_set(train, data.train);
  write_essay_set(test, data.test);
  for (const auto& w : data.stopwords) stop << w << '\n';
  scale << data.train.grade_min << ' ' << data.train.grade_max << '\n';
  write_text_file(dir / files::corpus, corpus.str());
  write_text_file(dir / files::train, train.str());
  write_text_file(dir / files::test, test.str());
  write_text_file(dir / files::stopwords, stop.str());
  write_text_file(dir / files::scale, scale.str());
}

}  // namespace poselsa
