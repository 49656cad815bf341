#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "poselsa/corpus.hpp"
#include "poselsa/entrygen.hpp"
#include "poselsa/error.hpp"

namespace poselsa {

/// Dense 0-based index over entry keys, in insertion order.
class Vocabulary {
 public:
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }

  const EntryKey& at(std::size_t i) const { return keys_.at(i); }
  const std::vector<EntryKey>& keys() const { return keys_; }

  std::optional<std::size_t> find(const EntryKey& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Returns the row of `key`, assigning the next index on first sight.
  std::size_t intern(const EntryKey& key) {
    auto [it, inserted] = index_.try_emplace(key, keys_.size());
    if (inserted) keys_.push_back(key);
    return it->second;
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.keys_ == b.keys_; }

 private:
  std::vector<EntryKey> keys_;
  std::unordered_map<EntryKey, std::size_t, EntryKeyHash> index_;
};

template <typename T>
struct Cell {
  std::size_t col;
  T value;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Row-major sparse matrix; cells within a row are sorted by column.
template <typename T>
struct SparseRows {
  std::size_t cols = 0;
  std::vector<std::vector<Cell<T>>> rows;

  std::size_t row_count() const { return rows.size(); }

  std::size_t nonzeros() const {
    std::size_t nnz = 0;
    for (const auto& r : rows) nnz += r.size();
    return nnz;
  }

  T row_sum(std::size_t i) const {
    T s{};
    for (const auto& c : rows[i]) s += c.value;
    return s;
  }

  T get(std::size_t i, std::size_t j) const {
    for (const auto& c : rows[i]) {
      if (c.col == j) return c.value;
      if (c.col > j) break;
    }
    return T{};
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                              static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (const auto& c : rows[i]) {
        d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c.col)) = static_cast<double>(c.value);
      }
    }
    return d;
  }

  friend bool operator==(const SparseRows&, const SparseRows&) = default;
};

struct Wcm {
  SparseRows<long> counts;
  Vocabulary vocabulary;
  std::vector<std::string> context_ids;

  std::size_t rows() const { return counts.row_count(); }
  std::size_t cols() const { return counts.cols; }
};

struct WeightedWcm {
  SparseRows<double> cells;
  std::vector<double> global_weights;
  Weighting weighting = Weighting::LogEntropy;
  Vocabulary vocabulary;
  std::vector<std::string> context_ids;

  std::size_t rows() const { return cells.row_count(); }
  std::size_t cols() const { return cells.cols; }
  Eigen::MatrixXd dense() const { return cells.to_dense(); }
};

/// Counts entry keys per context. Entries whose lemma is a stopword are skipped.
inline Wcm build_wcm(const Corpus& corpus, const ModelConfig& config, const StopwordSet& stopwords) {
  config.validate();
  const auto contexts = corpus.contexts();
  if (contexts.size() < 2) {
    throw Error(ErrorKind::Validation,
                "corpus needs at least 2 contexts, has " + std::to_string(contexts.size()));
  }
  Wcm w;
  w.counts.cols = contexts.size();
  for (std::size_t j = 0; j < contexts.size(); ++j) {
    w.context_ids.push_back(contexts[j].id);
    for (const Sentence* s : contexts[j].sentences) {
      for (const auto& key : generate_entries(*s, config)) {
        if (stopwords.contains(key.lemma)) continue;
        const std::size_t i = w.vocabulary.intern(key);
        if (i == w.counts.rows.size()) w.counts.rows.emplace_back();
        auto& row = w.counts.rows[i];
        if (!row.empty() && row.back().col == j) {
          ++row.back().value;
        } else {
          row.push_back({j, 1});
        }
      }
    }
  }
  if (w.vocabulary.empty()) throw Error(ErrorKind::EmptyModel, "no entries survived entry generation");
  return w;
}

/// Drops rows whose total count is 1. Surviving rows keep their relative order.
inline Wcm prune_singletons(const Wcm& in) {
  Wcm out;
  out.counts.cols = in.counts.cols;
  out.context_ids = in.context_ids;
  for (std::size_t i = 0; i < in.rows(); ++i) {
    if (in.counts.row_sum(i) == 1) continue;
    out.vocabulary.intern(in.vocabulary.at(i));
    out.counts.rows.push_back(in.counts.rows[i]);
  }
  if (out.vocabulary.empty()) {
    throw Error(ErrorKind::EmptyModel, "every entry occurs only once; nothing left after pruning");
  }
  return out;
}

/// Entropy-based global weight of one row of counts over n contexts, in [0, 1].
inline double entropy_global_weight(const std::vector<Cell<long>>& row, std::size_t n) {
  double gf = 0.0;
  for (const auto& c : row) gf += static_cast<double>(c.value);
  if (gf <= 0.0) return 0.0;
  double plogp = 0.0;
  for (const auto& c : row) {
    const double p = static_cast<double>(c.value) / gf;
    plogp += p * std::log(p);
  }
  const double g = 1.0 + plogp / std::log(static_cast<double>(n));
  return std::clamp(g, 0.0, 1.0);
}

/// Local weight of a raw count under `scheme`.
inline double local_weight(Weighting scheme, double count) {
  return scheme == Weighting::LogEntropy ? std::log1p(count) : count;
}

/// LogEntropy: cell = ln(1 + tf) * g. RawCount: cell = tf, g = 1.
inline WeightedWcm apply_weighting(const Wcm& w, Weighting scheme) {
  const std::size_t n = w.cols();
  if (scheme == Weighting::LogEntropy && n < 2) {
    throw Error(ErrorKind::Validation, "log-entropy weighting needs at least 2 contexts");
  }
  WeightedWcm out;
  out.weighting = scheme;
  out.vocabulary = w.vocabulary;
  out.context_ids = w.context_ids;
  out.cells.cols = n;
  out.cells.rows.resize(w.rows());
  out.global_weights.resize(w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const auto& row = w.counts.rows[i];
    const double g = scheme == Weighting::LogEntropy ? entropy_global_weight(row, n) : 1.0;
    out.global_weights[i] = g;
    auto& dst = out.cells.rows[i];
    dst.reserve(row.size());
    for (const auto& c : row) dst.push_back({c.col, local_weight(scheme, static_cast<double>(c.value)) * g});
  }
  return out;
}

inline WeightedWcm apply_log_entropy(const Wcm& w) { return apply_weighting(w, Weighting::LogEntropy); }

/// build_wcm, then pruning when configured, then weighting.
inline WeightedWcm build_weighted_wcm(const Corpus& corpus, const ModelConfig& config,
                                      const StopwordSet& stopwords) {
  Wcm w = build_wcm(corpus, config, stopwords);
  if (config.prune_singletons) w = prune_singletons(w);
  return apply_weighting(w, config.weighting);
}

// Debug dumps: MatrixMarket coordinate file plus a vocabulary sidecar.

template <typename T>
void write_matrix_market(std::ostream& out, const SparseRows<T>& m) {
  out << "%%MatrixMarket matrix coordinate " << (std::is_integral_v<T> ? "integer" : "real")
      << " general\n";
  out << m.row_count() << ' ' << m.cols << ' ' << m.nonzeros() << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < m.row_count(); ++i) {
    for (const auto& c : m.rows[i]) out << (i + 1) << ' ' << (c.col + 1) << ' ' << c.value << '\n';
  }
}

/// One line per row: `<index>\t<prev>\t<lemma>\t<cur>\t<next>`, absent tags left empty.
inline void write_vocabulary(std::ostream& out, const Vocabulary& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& k = v.at(i);
    out << i << '\t' << k.prev_tag.value_or("") << '\t' << k.lemma << '\t' << k.cur_tag.value_or("")
        << '\t' << k.next_tag.value_or("") << '\n';
  }
}

}  // namespace poselsa
