#pragma once

// Scoring model persistence as a single JSON document. Doubles are written in
// shortest round-trip form, so a reloaded model is bit-identical.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "poselsa/corpus.hpp"
#include "poselsa/error.hpp"
#include "poselsa/grader.hpp"
#include "poselsa/text.hpp"

namespace poselsa {

inline constexpr std::string_view kModelFormat = "poselsa-model";
inline constexpr int kModelVersion = 1;

/// Everything that decides how text becomes a query vector, besides the vocabulary.
inline std::string pipeline_canonical(const ModelConfig& config, Granularity granularity, Aggregation agg) {
  return config.canonical() + ";granularity=" + std::string(to_string(granularity)) +
         ";aggregation=" + std::string(to_string(agg));
}

inline std::string config_fingerprint(const ModelConfig& config, Granularity granularity, Aggregation agg) {
  return text::hex64(text::fnv1a(pipeline_canonical(config, granularity, agg)));
}

/// Hash of the pipeline configuration plus every vocabulary key in order.
inline std::string model_fingerprint(const ModelConfig& config, Granularity granularity, Aggregation agg,
                                     const Vocabulary& vocabulary) {
  std::uint64_t h = text::fnv1a(pipeline_canonical(config, granularity, agg));
  const auto field = [&h](const std::optional<std::string>& f) {
    h = text::fnv1a(f ? "\x1f" + *f : std::string("\x1e"), h);
  };
  for (const auto& k : vocabulary.keys()) {
    field(k.prev_tag);
    h = text::fnv1a("\x1f" + k.lemma, h);
    field(k.cur_tag);
    field(k.next_tag);
    h = text::fnv1a("\n", h);
  }
  return text::hex64(h);
}

struct StoredModel {
  ScoringModel model;
  Granularity granularity = Granularity::Document;
  std::string fingerprint;
  std::string config_fingerprint;
};

namespace detail {

inline nlohmann::json config_to_json(const ModelConfig& c) {
  nlohmann::json kinds = nlohmann::json::array();
  for (auto k : c.kinds) kinds.push_back(std::string(to_string(k)));
  return {{"kinds", kinds},
          {"include_ambiguous", c.include_ambiguous},
          {"content_words_only", c.content_words_only},
          {"content_tags", std::vector<std::string>(c.content_tags.begin(), c.content_tags.end())},
          {"boundary_tag", c.boundary_tag},
          {"prune_singletons", c.prune_singletons},
          {"weighting", std::string(to_string(c.weighting))}};
}

inline ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.kinds.clear();
  for (const auto& k : j.at("kinds")) c.kinds.push_back(parse_entry_kind(k.get<std::string>()));
  c.include_ambiguous = j.at("include_ambiguous").get<bool>();
  c.content_words_only = j.at("content_words_only").get<bool>();
  const auto tags = j.at("content_tags").get<std::vector<std::string>>();
  c.content_tags = {tags.begin(), tags.end()};
  c.boundary_tag = j.at("boundary_tag").get<std::string>();
  c.prune_singletons = j.at("prune_singletons").get<bool>();
  c.weighting = parse_weighting(j.at("weighting").get<std::string>());
  return c;
}

inline nlohmann::json optional_json(const std::optional<std::string>& s) {
  return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

inline std::optional<std::string> optional_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

inline std::vector<double> flatten_row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

inline Eigen::MatrixXd unflatten_row_major(const std::vector<double>& v, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(v.size()) != rows * cols) {
    throw Error(ErrorKind::Parse, "model matrix has " + std::to_string(v.size()) + " values, expected " +
                                      std::to_string(rows * cols));
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v[static_cast<std::size_t>(i * cols + j)];
  }
  return m;
}

}  // namespace detail

inline nlohmann::json model_to_json(const ScoringModel& model, Granularity granularity) {
  const auto& s = model.space;
  nlohmann::json vocab = nlohmann::json::array();
  for (const auto& k : s.vocabulary.keys()) {
    vocab.push_back({detail::optional_json(k.prev_tag), k.lemma, detail::optional_json(k.cur_tag),
                     detail::optional_json(k.next_tag)});
  }
  std::vector<double> sigma(s.factors.sigma.data(), s.factors.sigma.data() + s.factors.sigma.size());
  return {
      {"format", kModelFormat},
      {"version", kModelVersion},
      {"fingerprint", model_fingerprint(model.config, granularity, model.aggregation, s.vocabulary)},
      {"config_fingerprint", config_fingerprint(model.config, granularity, model.aggregation)},
      {"config", detail::config_to_json(model.config)},
      {"granularity", std::string(to_string(granularity))},
      {"aggregation", std::string(to_string(model.aggregation))},
      {"grade_min", model.grade_min},
      {"grade_max", model.grade_max},
      {"cutpoints", model.cutpoints},
      {"warnings", model.warnings},
      {"k", s.k},
      {"m", s.vocabulary.size()},
      {"n", s.context_ids.size()},
      {"vocabulary", vocab},
      {"context_ids", s.context_ids},
      {"global_weights", s.global_weights},
      {"sigma", sigma},
      {"u", detail::flatten_row_major(s.factors.u)},
      {"context_vectors", detail::flatten_row_major(s.context_vectors)},
  };
}

inline StoredModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) throw Error(ErrorKind::Parse, "not a poselsa model");
    if (j.at("version").get<int>() != kModelVersion) {
      throw Error(ErrorKind::Parse, "unsupported model version " + j.at("version").dump());
    }
    StoredModel out;
    auto& m = out.model;
    m.config = detail::config_from_json(j.at("config"));
    out.granularity = parse_granularity(j.at("granularity").get<std::string>());
    m.aggregation = parse_aggregation(j.at("aggregation").get<std::string>());
    m.grade_min = j.at("grade_min").get<int>();
    m.grade_max = j.at("grade_max").get<int>();
    m.cutpoints = j.at("cutpoints").get<std::vector<double>>();
    m.warnings = j.at("warnings").get<std::vector<std::string>>();

    auto& s = m.space;
    s.k = j.at("k").get<Eigen::Index>();
    const auto rows = j.at("m").get<Eigen::Index>();
    const auto cols = j.at("n").get<Eigen::Index>();
    for (const auto& e : j.at("vocabulary")) {
      EntryKey key{detail::optional_from_json(e.at(0)), e.at(1).get<std::string>(),
                   detail::optional_from_json(e.at(2)), detail::optional_from_json(e.at(3))};
      s.vocabulary.intern(key);
    }
    if (static_cast<Eigen::Index>(s.vocabulary.size()) != rows) {
      throw Error(ErrorKind::Parse, "model vocabulary size does not match m");
    }
    s.context_ids = j.at("context_ids").get<std::vector<std::string>>();
    if (static_cast<Eigen::Index>(s.context_ids.size()) != cols) {
      throw Error(ErrorKind::Parse, "model context count does not match n");
    }
    s.global_weights = j.at("global_weights").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(s.global_weights.size()) != rows) {
      throw Error(ErrorKind::Parse, "model global weights do not match m");
    }
    s.weighting = m.config.weighting;
    const auto sigma = j.at("sigma").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(sigma.size()) != s.k) throw Error(ErrorKind::Parse, "model sigma length != k");
    s.factors.sigma = Eigen::Map<const Eigen::VectorXd>(sigma.data(), s.k);
    s.factors.u = detail::unflatten_row_major(j.at("u").get<std::vector<double>>(), rows, s.k);
    s.context_vectors = detail::unflatten_row_major(j.at("context_vectors").get<std::vector<double>>(), cols, s.k);
    // V is not stored; recover it from the context vectors where sigma > 0.
    s.factors.v = Eigen::MatrixXd::Zero(cols, s.k);
    for (Eigen::Index c = 0; c < s.k; ++c) {
      if (s.factors.sigma(c) > 0.0) s.factors.v.col(c) = s.context_vectors.col(c) / s.factors.sigma(c);
    }

    out.fingerprint = j.at("fingerprint").get<std::string>();
    out.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    if (out.fingerprint != model_fingerprint(m.config, out.granularity, m.aggregation, s.vocabulary)) {
      throw Error(ErrorKind::ConfigMismatch, "model fingerprint does not match its contents");
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const std::filesystem::path& path, const ScoringModel& model, Granularity granularity) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << model_to_json(model, granularity).dump(1) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

inline StoredModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

}  // namespace poselsa
