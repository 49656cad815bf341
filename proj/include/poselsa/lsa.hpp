#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "poselsa/corpus.hpp"
#include "poselsa/entrygen.hpp"
#include "poselsa/error.hpp"
#include "poselsa/log.hpp"
#include "poselsa/svd.hpp"
#include "poselsa/wcm.hpp"

namespace poselsa {

/// Reduced semantic space. Contexts are stored as sigma-scaled rows of V;
/// queries are projected as U_k^T q.
struct LsaSpace {
  SvdFactors factors;
  Eigen::Index k = 0;
  Eigen::MatrixXd context_vectors;  // n x k, row j = sigma .* v_j
  std::vector<double> global_weights;
  Weighting weighting = Weighting::LogEntropy;
  Vocabulary vocabulary;
  std::vector<std::string> context_ids;

  std::size_t context_count() const { return static_cast<std::size_t>(context_vectors.rows()); }
  Eigen::VectorXd context_vector(std::size_t j) const {
    return context_vectors.row(static_cast<Eigen::Index>(j)).transpose();
  }
};

/// Leading k singular triplets of the weighted matrix.
inline SvdFactors truncated_svd(const Eigen::MatrixXd& a, Eigen::Index k) {
  const Eigen::Index limit = std::min(a.rows(), a.cols());
  if (k < 1 || k > limit) {
    throw Error(ErrorKind::Validation, "k=" + std::to_string(k) + " outside [1, " + std::to_string(limit) + "]");
  }
  if (a.cols() > a.rows()) {
    log::warn("matrix has more contexts (" + std::to_string(a.cols()) + ") than entries (" +
              std::to_string(a.rows()) + "); computing the SVD anyway");
  }
  return full_svd(a).truncated(k);
}

inline SvdFactors truncated_svd(const WeightedWcm& matrix, Eigen::Index k) {
  return truncated_svd(matrix.dense(), k);
}

/// Assembles a space from precomputed full factors, keeping k dimensions.
inline LsaSpace space_from_factors(const SvdFactors& full, const WeightedWcm& matrix, Eigen::Index k) {
  const Eigen::Index limit = std::min<Eigen::Index>(static_cast<Eigen::Index>(matrix.rows()),
                                                    static_cast<Eigen::Index>(matrix.cols()));
  if (k < 2 || k > limit) {
    throw Error(ErrorKind::Validation,
                "space dimension k=" + std::to_string(k) + " outside [2, " + std::to_string(limit) + "]");
  }
  LsaSpace s;
  s.factors = full.truncated(k);
  s.k = k;
  s.context_vectors = s.factors.v * s.factors.sigma.asDiagonal();
  s.global_weights = matrix.global_weights;
  s.weighting = matrix.weighting;
  s.vocabulary = matrix.vocabulary;
  s.context_ids = matrix.context_ids;
  return s;
}

inline LsaSpace build_space(const WeightedWcm& matrix, Eigen::Index k) {
  const Eigen::Index limit = std::min<Eigen::Index>(static_cast<Eigen::Index>(matrix.rows()),
                                                    static_cast<Eigen::Index>(matrix.cols()));
  if (k < 2 || k > limit) {
    throw Error(ErrorKind::Validation,
                "space dimension k=" + std::to_string(k) + " outside [2, " + std::to_string(limit) + "]");
  }
  const Eigen::MatrixXd a = matrix.dense();
  if (a.cols() > a.rows()) {
    log::warn("matrix has more contexts (" + std::to_string(a.cols()) + ") than entries (" +
              std::to_string(a.rows()) + "); computing the SVD anyway");
  }
  return space_from_factors(full_svd(a), matrix, k);
}

struct QueryVector {
  Eigen::VectorXd vec;  // length k
  bool zero = false;    // no in-vocabulary weight reached the query
};

/// Weighted raw-space query: local weight of the in-vocabulary counts times
/// the stored global weights. Out-of-vocabulary keys are dropped.
inline Eigen::VectorXd weighted_query(const Vocabulary& vocabulary, const std::vector<double>& global_weights,
                                      Weighting weighting, const TaggedDocument& essay,
                                      const ModelConfig& config, const StopwordSet& stopwords) {
  std::unordered_map<std::size_t, double> counts;
  for (const auto& key : generate_entries(essay, config)) {
    if (stopwords.contains(key.lemma)) continue;
    if (auto i = vocabulary.find(key)) counts[*i] += 1.0;
  }
  Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocabulary.size()));
  for (const auto& [i, c] : counts) {
    q(static_cast<Eigen::Index>(i)) = local_weight(weighting, c) * global_weights[i];
  }
  return q;
}

inline Eigen::VectorXd weighted_query(const LsaSpace& space, const TaggedDocument& essay,
                                      const ModelConfig& config, const StopwordSet& stopwords) {
  return weighted_query(space.vocabulary, space.global_weights, space.weighting, essay, config, stopwords);
}

inline QueryVector project_query(const LsaSpace& space, const Eigen::VectorXd& q) {
  QueryVector out;
  out.zero = q.isZero(0.0);
  out.vec = space.factors.u.transpose() * q;
  return out;
}

inline QueryVector fold_in(const LsaSpace& space, const TaggedDocument& essay, const ModelConfig& config,
                           const StopwordSet& stopwords) {
  return project_query(space, weighted_query(space, essay, config, stopwords));
}

/// Cosine similarity; 0 when either vector is zero.
template <typename A, typename B>
double cosine(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

}  // namespace poselsa
