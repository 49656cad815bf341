#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "poselsa/corpus.hpp"
#include "poselsa/entrygen.hpp"
#include "poselsa/error.hpp"
#include "poselsa/log.hpp"
#include "poselsa/lsa.hpp"

namespace poselsa {

/// How per-context cosines combine into an essay score.
enum class Aggregation { Sum, Mean };

inline std::string_view to_string(Aggregation a) { return a == Aggregation::Sum ? "sum" : "mean"; }

inline Aggregation parse_aggregation(std::string_view s) {
  if (s == "sum") return Aggregation::Sum;
  if (s == "mean") return Aggregation::Mean;
  throw Error(ErrorKind::Validation, "unknown score aggregation '" + std::string(s) + "'");
}

struct EssayScore {
  std::string essay_id;
  double score = 0.0;
  bool zero_query = false;
};

/// Sum (or mean) of cosines between a folded-in query and every context vector.
inline double score_query(const LsaSpace& space, const QueryVector& q, Aggregation agg = Aggregation::Sum) {
  if (q.zero) return 0.0;
  double total = 0.0;
  for (Eigen::Index j = 0; j < space.context_vectors.rows(); ++j) {
    total += cosine(q.vec, space.context_vectors.row(j).transpose());
  }
  if (agg == Aggregation::Mean && space.context_vectors.rows() > 0) {
    total /= static_cast<double>(space.context_vectors.rows());
  }
  return total;
}

inline EssayScore essay_score(const LsaSpace& space, const TaggedDocument& essay, const ModelConfig& config,
                              const StopwordSet& stopwords, Aggregation agg = Aggregation::Sum) {
  const auto q = fold_in(space, essay, config, stopwords);
  return {essay.id, score_query(space, q, agg), q.zero};
}

struct GradeStat {
  double mean = 0.0;
  std::size_t count = 0;
};

struct Calibration {
  std::vector<double> adjusted_means;  // one per grade on the scale, after pooling and interpolation
  std::vector<double> cutpoints;       // G - 1, strictly increasing
  std::vector<std::string> warnings;
};

/// Turns per-grade mean scores into cutpoints:
///  1. pool adjacent violators (count-weighted) so means are non-decreasing;
///  2. interpolate absent grades linearly, flat beyond the observed ends;
///  3. cut at midpoints of consecutive means;
///  4. nudge ties up by one ulp so cutpoints increase strictly.
inline Calibration cutpoints_from_means(const std::map<int, GradeStat>& observed, int grade_min, int grade_max) {
  if (grade_min >= grade_max) throw Error(ErrorKind::Calibration, "grade scale needs grade_min < grade_max");
  if (observed.size() < 2) {
    throw Error(ErrorKind::Calibration,
                "calibration needs at least 2 distinct grades, got " + std::to_string(observed.size()));
  }
  for (const auto& [g, st] : observed) {
    if (g < grade_min || g > grade_max) {
      throw Error(ErrorKind::Calibration, "grade " + std::to_string(g) + " outside the scale");
    }
    if (st.count == 0 || !std::isfinite(st.mean)) {
      throw Error(ErrorKind::Calibration, "grade " + std::to_string(g) + " has no usable scores");
    }
  }
  Calibration out;

  struct Block {
    double sum_w_mean;
    double weight;
    std::vector<int> grades;
    double value() const { return sum_w_mean / weight; }
  };
  std::vector<Block> blocks;
  for (const auto& [g, st] : observed) {
    const double w = static_cast<double>(st.count);
    blocks.push_back({st.mean * w, w, {g}});
    while (blocks.size() >= 2 && blocks[blocks.size() - 2].value() > blocks.back().value()) {
      Block last = std::move(blocks.back());
      blocks.pop_back();
      auto& prev = blocks.back();
      prev.sum_w_mean += last.sum_w_mean;
      prev.weight += last.weight;
      prev.grades.insert(prev.grades.end(), last.grades.begin(), last.grades.end());
    }
  }
  std::map<int, double> pooled;
  for (const auto& b : blocks) {
    if (b.grades.size() > 1) {
      std::string gs;
      for (int g : b.grades) gs += (gs.empty() ? "" : ",") + std::to_string(g);
      out.warnings.push_back("non-monotone grade means pooled over grades {" + gs + "}");
    }
    for (int g : b.grades) pooled[g] = b.value();
  }

  const auto lo = pooled.begin();
  const auto hi = std::prev(pooled.end());
  for (int g = grade_min; g <= grade_max; ++g) {
    double m;
    if (g <= lo->first) {
      m = lo->second;
    } else if (g >= hi->first) {
      m = hi->second;
    } else {
      auto above = pooled.lower_bound(g);
      if (above->first == g) {
        m = above->second;
      } else {
        auto below = std::prev(above);
        const double t = static_cast<double>(g - below->first) / static_cast<double>(above->first - below->first);
        m = below->second + t * (above->second - below->second);
      }
    }
    out.adjusted_means.push_back(m);
  }

  for (std::size_t i = 1; i < out.adjusted_means.size(); ++i) {
    double c = 0.5 * (out.adjusted_means[i - 1] + out.adjusted_means[i]);
    if (!out.cutpoints.empty() && c <= out.cutpoints.back()) {
      c = std::nextafter(out.cutpoints.back(), std::numeric_limits<double>::infinity());
      out.warnings.push_back("cutpoint " + std::to_string(i) + " tied with its predecessor; separated by epsilon");
    }
    out.cutpoints.push_back(c);
  }
  return out;
}

/// Per-grade means of (grade, score) pairs.
inline std::map<int, GradeStat> grade_means(std::span<const int> grades, std::span<const double> scores) {
  if (grades.size() != scores.size()) throw Error(ErrorKind::Calibration, "grade/score length mismatch");
  std::map<int, GradeStat> stats;
  for (std::size_t i = 0; i < grades.size(); ++i) {
    auto& st = stats[grades[i]];
    st.mean += scores[i];
    ++st.count;
  }
  for (auto& [g, st] : stats) st.mean /= static_cast<double>(st.count);
  return stats;
}

struct ScoringModel {
  LsaSpace space;
  std::vector<double> cutpoints;
  int grade_min = 0;
  int grade_max = 0;
  ModelConfig config;
  Aggregation aggregation = Aggregation::Sum;
  std::vector<std::string> warnings;
};

/// grade_min plus the number of cutpoints at or below the score.
inline int assign_grade(std::span<const double> cutpoints, int grade_min, double score) {
  const auto passed = std::upper_bound(cutpoints.begin(), cutpoints.end(), score) - cutpoints.begin();
  return grade_min + static_cast<int>(passed);
}

inline int assign_grade(const ScoringModel& model, double score) {
  return assign_grade(model.cutpoints, model.grade_min, score);
}

inline ScoringModel calibrate_thresholds(LsaSpace space, const GradedEssaySet& train, const ModelConfig& config,
                                         const StopwordSet& stopwords, Aggregation agg = Aggregation::Sum) {
  if (train.essays.empty()) throw Error(ErrorKind::Calibration, "no training essays");
  std::vector<int> grades;
  std::vector<double> scores;
  for (const auto& e : train.essays) {
    grades.push_back(e.grade);
    scores.push_back(essay_score(space, e.essay, config, stopwords, agg).score);
  }
  auto cal = cutpoints_from_means(grade_means(grades, scores), train.grade_min, train.grade_max);
  ScoringModel model;
  model.space = std::move(space);
  model.cutpoints = std::move(cal.cutpoints);
  model.grade_min = train.grade_min;
  model.grade_max = train.grade_max;
  model.config = config;
  model.aggregation = agg;
  model.warnings = std::move(cal.warnings);
  return model;
}

struct GradedResult {
  std::string essay_id;
  double score = 0.0;
  int assigned = 0;
  std::optional<int> human;
};

inline std::vector<GradedResult> grade_essays(const ScoringModel& model, const std::vector<EssayRecord>& essays,
                                              const StopwordSet& stopwords) {
  std::vector<GradedResult> out;
  out.reserve(essays.size());
  for (const auto& e : essays) {
    const auto s = essay_score(model.space, e.essay, model.config, stopwords, model.aggregation);
    out.push_back({e.essay.id, s.score, assign_grade(model, s.score), e.grade});
  }
  return out;
}

inline std::vector<GradedResult> grade_essays(const ScoringModel& model, const GradedEssaySet& essays,
                                              const StopwordSet& stopwords) {
  std::vector<EssayRecord> recs;
  recs.reserve(essays.size());
  for (const auto& e : essays.essays) recs.push_back({e.essay, e.grade});
  return grade_essays(model, recs, stopwords);
}

}  // namespace poselsa
