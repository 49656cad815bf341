#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <ranges>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "poselsa/corpus.hpp"
#include "poselsa/entrygen.hpp"
#include "poselsa/error.hpp"
#include "poselsa/grader.hpp"
#include "poselsa/log.hpp"
#include "poselsa/lsa.hpp"
#include "poselsa/wcm.hpp"

namespace poselsa {

// ---------------------------------------------------------------------------
// Rank correlation

/// 1-based ranks; tied values share the mean of the positions they occupy.
template <std::ranges::random_access_range R>
std::vector<double> average_ranks(const R& values) {
  const std::size_t n = std::ranges::size(values);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return static_cast<double>(values[a]) < static_cast<double>(values[b]);
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && static_cast<double>(values[order[j]]) == static_cast<double>(values[order[i]])) ++j;
    // positions i..j-1 hold equal values; their 1-based ranks average to (i + j + 1) / 2
    const double rank = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = rank;
    i = j;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::UndefinedCorrelation, "correlation of a constant list");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Spearman's rho with average ranks for ties.
template <std::ranges::random_access_range X, std::ranges::random_access_range Y>
double spearman(const X& human, const Y& machine) {
  const std::size_t n = std::ranges::size(human);
  if (n != std::ranges::size(machine)) {
    throw Error(ErrorKind::Validation, "spearman: length mismatch (" + std::to_string(n) + " vs " +
                                           std::to_string(std::ranges::size(machine)) + ")");
  }
  if (n < 2) throw Error(ErrorKind::UndefinedCorrelation, "spearman needs at least 2 pairs");
  return pearson(average_ranks(human), average_ranks(machine));
}

inline double weighted_average(const std::vector<double>& values, const std::vector<double>& weights) {
  if (values.empty()) throw Error(ErrorKind::Validation, "weighted average of nothing");
  if (values.size() != weights.size()) throw Error(ErrorKind::Validation, "weighted average: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] > 0.0)) throw Error(ErrorKind::Validation, "weighted average: weights must be positive");
    num += weights[i] * values[i];
    den += weights[i];
  }
  return num / den;
}

/// (model / baseline - 1) * 100.
inline double percent_diff(double model_rho, double baseline_rho) {
  if (baseline_rho == 0.0) throw Error(ErrorKind::Validation, "percent difference against a zero baseline");
  return (model_rho / baseline_rho - 1.0) * 100.0;
}

inline double round2(double x) { return std::round(x * 100.0) / 100.0; }

// ---------------------------------------------------------------------------
// Dimension sweep

enum class SelectOn { Test, Validation };

struct SweepOptions {
  std::optional<std::pair<int, int>> k_range;  // inclusive; default [2, n]
  Aggregation aggregation = Aggregation::Sum;
  SelectOn select_on = SelectOn::Test;
  const GradedEssaySet* validation = nullptr;  // required for SelectOn::Validation
};

struct SweepResult {
  std::map<int, double> per_k;            // test Spearman of assigned grades; NaN when undefined
  std::map<int, double> per_k_score_rho;  // diagnostic: test Spearman of raw scores
  std::map<int, double> per_k_validation; // only with SelectOn::Validation
  int best_k = 0;
  double best_rho = std::numeric_limits<double>::quiet_NaN();
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t calibration_warnings = 0;  // k values whose calibration reported degeneracy
};

namespace detail {

inline double rho_or_nan(const std::vector<int>& a, const std::vector<double>& b) {
  try {
    return spearman(a, b);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UndefinedCorrelation) throw;
    return std::numeric_limits<double>::quiet_NaN();
  }
}

inline std::vector<Eigen::VectorXd> essay_queries(const WeightedWcm& w, const GradedEssaySet& set,
                                                  const ModelConfig& config, const StopwordSet& stopwords) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(set.size());
  for (const auto& e : set.essays) {
    out.push_back(weighted_query(w.vocabulary, w.global_weights, w.weighting, e.essay, config, stopwords));
  }
  return out;
}

inline std::vector<double> score_all(const LsaSpace& space, const std::vector<Eigen::VectorXd>& queries,
                                     Aggregation agg) {
  std::vector<double> s;
  s.reserve(queries.size());
  for (const auto& q : queries) s.push_back(score_query(space, project_query(space, q), agg));
  return s;
}

inline std::pair<int, double> pick_best(const std::map<int, double>& curve) {
  int best_k = 0;
  double best = std::numeric_limits<double>::quiet_NaN();
  for (const auto& [k, rho] : curve) {
    if (std::isnan(rho)) continue;
    if (std::isnan(best) || rho > best) {
      best = rho;
      best_k = k;
    }
  }
  return {best_k, best};
}

}  // namespace detail

/// Grades the test set at every dimension in range and keeps the best.
/// Ties go to the smaller k.
inline SweepResult sweep_dimensions(const Corpus& corpus, const GradedEssaySet& train, const GradedEssaySet& test,
                                    const ModelConfig& config, const StopwordSet& stopwords,
                                    const SweepOptions& opts = {}) {
  if (opts.select_on == SelectOn::Validation && opts.validation == nullptr) {
    throw Error(ErrorKind::Validation, "validation selection needs a validation essay set");
  }
  const WeightedWcm w = build_weighted_wcm(corpus, config, stopwords);
  SweepResult res;
  res.m = w.rows();
  res.n = w.cols();
  const int cap = static_cast<int>(std::min(res.m, res.n));
  int k_lo = 2;
  int k_hi = static_cast<int>(res.n);
  if (opts.k_range) std::tie(k_lo, k_hi) = *opts.k_range;
  k_lo = std::max(k_lo, 2);
  k_hi = std::min(k_hi, cap);
  if (k_lo > k_hi) {
    throw Error(ErrorKind::Validation, "no dimension to sweep: range [" + std::to_string(k_lo) + ", " +
                                           std::to_string(k_hi) + "] with m=" + std::to_string(res.m) +
                                           ", n=" + std::to_string(res.n));
  }

  const Eigen::MatrixXd a = w.dense();
  if (a.cols() > a.rows()) {
    log::warn("matrix has more contexts (" + std::to_string(a.cols()) + ") than entries (" +
              std::to_string(a.rows()) + "); computing the SVD anyway");
  }
  const SvdFactors full = full_svd(a);

  const auto train_q = detail::essay_queries(w, train, config, stopwords);
  const auto test_q = detail::essay_queries(w, test, config, stopwords);
  std::vector<Eigen::VectorXd> valid_q;
  if (opts.validation) valid_q = detail::essay_queries(w, *opts.validation, config, stopwords);
  const auto train_grades = train.grades();
  const auto test_grades = test.grades();

  for (int k = k_lo; k <= k_hi; ++k) {
    try {
      const LsaSpace space = space_from_factors(full, w, k);
      const auto cal = cutpoints_from_means(grade_means(train_grades, detail::score_all(space, train_q, opts.aggregation)),
                                            train.grade_min, train.grade_max);
      if (!cal.warnings.empty()) ++res.calibration_warnings;
      const auto test_scores = detail::score_all(space, test_q, opts.aggregation);
      std::vector<double> assigned;
      assigned.reserve(test_scores.size());
      for (double s : test_scores) assigned.push_back(assign_grade(cal.cutpoints, train.grade_min, s));
      res.per_k[k] = detail::rho_or_nan(test_grades, assigned);
      res.per_k_score_rho[k] = detail::rho_or_nan(test_grades, test_scores);
      if (opts.validation) {
        std::vector<double> va;
        for (double s : detail::score_all(space, valid_q, opts.aggregation)) {
          va.push_back(assign_grade(cal.cutpoints, train.grade_min, s));
        }
        res.per_k_validation[k] = detail::rho_or_nan(opts.validation->grades(), va);
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "k=" + std::to_string(k) + ": " + e.what());
    }
  }

  if (opts.select_on == SelectOn::Test) {
    std::tie(res.best_k, res.best_rho) = detail::pick_best(res.per_k);
  } else {
    res.best_k = detail::pick_best(res.per_k_validation).first;
    if (res.best_k != 0) res.best_rho = res.per_k.at(res.best_k);
  }
  if (res.best_k == 0) {
    throw Error(ErrorKind::UndefinedCorrelation,
                "grading correlation undefined at every k (constant human or assigned grades)");
  }
  return res;
}

inline void write_sweep_tsv(std::ostream& out, const SweepResult& r) {
  out << "k\trho\tscore_rho";
  if (!r.per_k_validation.empty()) out << "\tvalidation_rho";
  out << '\n';
  out << std::fixed << std::setprecision(6);
  for (const auto& [k, rho] : r.per_k) {
    out << k << '\t' << rho << '\t' << r.per_k_score_rho.at(k);
    if (!r.per_k_validation.empty()) out << '\t' << r.per_k_validation.at(k);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Model comparison

struct EvalSet {
  std::string name;
  Corpus corpus;
  GradedEssaySet train;
  GradedEssaySet test;
  StopwordSet stopwords;
};

struct Variant {
  std::string name;
  ModelConfig config;
};

/// Variant names look like `<preset>[+amb][+cont]`, e.g. `next+amb+cont`.
inline Variant make_variant(std::string_view spec, const ModelConfig& base = {}) {
  const auto parts = text::split(spec, '+');
  Variant v{"", base};
  v.config.kinds = preset_kinds(parts.front());
  v.config.include_ambiguous = false;
  v.config.content_words_only = false;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i] == "amb") {
      v.config.include_ambiguous = true;
    } else if (parts[i] == "cont") {
      v.config.content_words_only = true;
    } else {
      throw Error(ErrorKind::Validation, "unknown variant modifier '" + std::string(parts[i]) + "' in '" +
                                             std::string(spec) + "'");
    }
  }
  v.name = std::string(parts.front());
  if (v.config.include_ambiguous) v.name += "+amb";
  if (v.config.content_words_only) v.name += "+cont";
  v.config.validate();
  return v;
}

/// Every preset crossed with {plain, amb} x {all words, content words}: 24 variants.
inline std::vector<Variant> variant_grid(const ModelConfig& base = {}) {
  std::vector<Variant> out;
  for (const char* mode : {"", "+amb", "+cont", "+amb+cont"}) {
    for (const auto& p : preset_names()) out.push_back(make_variant(p + mode, base));
  }
  return out;
}

struct SetOutcome {
  std::string set;
  std::optional<double> rho;  // nullopt when the set could not be evaluated
  int best_k = 0;
  std::string error;
};

struct VariantOutcome {
  std::string name;
  std::vector<SetOutcome> sets;
};

struct ReportRow {
  std::string name;
  double weighted_rho = std::numeric_limits<double>::quiet_NaN();
  double diff_pct = std::numeric_limits<double>::quiet_NaN();
  std::size_t sets_used = 0;
  bool partial = false;  // some set failed; rho is over the remaining sets only
  std::vector<SetOutcome> sets;
};

struct ComparisonReport {
  std::string baseline_name;
  std::vector<std::string> set_names;
  std::vector<ReportRow> rows;
};

/// Weighted average of per-set best rho (weights = test-set sizes) and the
/// difference against the baseline over the sets both could evaluate.
inline ComparisonReport assemble_report(const std::vector<VariantOutcome>& outcomes,
                                        const std::vector<double>& set_weights, const std::string& baseline) {
  const auto base_it = std::find_if(outcomes.begin(), outcomes.end(),
                                    [&](const VariantOutcome& o) { return o.name == baseline; });
  if (base_it == outcomes.end()) throw Error(ErrorKind::Validation, "baseline '" + baseline + "' is not a variant");
  if (std::count_if(outcomes.begin(), outcomes.end(), [&](const VariantOutcome& o) { return o.name == baseline; }) > 1) {
    throw Error(ErrorKind::Validation, "baseline '" + baseline + "' listed more than once");
  }
  for (const auto& o : outcomes) {
    if (o.sets.size() != set_weights.size()) throw Error(ErrorKind::Validation, "outcome/set count mismatch");
  }

  const auto weighted_over = [&](const VariantOutcome& o, const std::vector<bool>& use) -> std::optional<double> {
    std::vector<double> rhos, ws;
    for (std::size_t s = 0; s < o.sets.size(); ++s) {
      if (use[s] && o.sets[s].rho) {
        rhos.push_back(*o.sets[s].rho);
        ws.push_back(set_weights[s]);
      }
    }
    if (rhos.empty()) return std::nullopt;
    return weighted_average(rhos, ws);
  };

  ComparisonReport rep;
  rep.baseline_name = baseline;
  for (const auto& s : base_it->sets) rep.set_names.push_back(s.set);
  const std::vector<bool> all(set_weights.size(), true);
  for (const auto& o : outcomes) {
    ReportRow row;
    row.name = o.name;
    row.sets = o.sets;
    std::vector<bool> common(o.sets.size());
    for (std::size_t s = 0; s < o.sets.size(); ++s) {
      if (o.sets[s].rho) ++row.sets_used;
      common[s] = o.sets[s].rho.has_value() && base_it->sets[s].rho.has_value();
    }
    row.partial = row.sets_used < o.sets.size();
    if (auto r = weighted_over(o, all)) row.weighted_rho = *r;
    const auto mine = weighted_over(o, common);
    const auto theirs = weighted_over(*base_it, common);
    if (mine && theirs) row.diff_pct = o.name == baseline ? 0.0 : percent_diff(*mine, *theirs);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

inline ComparisonReport compare_models(const std::vector<EvalSet>& sets, const std::vector<Variant>& variants,
                                       const std::string& baseline, const SweepOptions& opts = {}) {
  if (variants.empty()) throw Error(ErrorKind::Validation, "no variants to compare");
  if (sets.empty()) throw Error(ErrorKind::Validation, "no evaluation sets");
  std::set<std::string> names;
  for (const auto& v : variants) {
    if (!names.insert(v.name).second) throw Error(ErrorKind::Validation, "duplicate variant '" + v.name + "'");
  }
  std::vector<double> weights;
  for (const auto& s : sets) {
    if (s.test.essays.empty()) throw Error(ErrorKind::Validation, "set '" + s.name + "' has no test essays");
    weights.push_back(static_cast<double>(s.test.size()));
  }
  std::vector<VariantOutcome> outcomes;
  for (const auto& v : variants) {
    VariantOutcome o{v.name, {}};
    for (const auto& s : sets) {
      SetOutcome so{s.name, std::nullopt, 0, ""};
      try {
        const auto r = sweep_dimensions(s.corpus, s.train, s.test, v.config, s.stopwords, opts);
        so.rho = r.best_rho;
        so.best_k = r.best_k;
      } catch (const Error& e) {
        so.error = std::string(to_string(e.kind())) + ": " + e.what();
        log::warn("variant " + v.name + " on set " + s.name + " skipped: " + so.error);
      }
      o.sets.push_back(std::move(so));
    }
    outcomes.push_back(std::move(o));
  }
  auto rep = assemble_report(outcomes, weights, baseline);
  const auto& base = *std::find_if(rep.rows.begin(), rep.rows.end(),
                                   [&](const ReportRow& r) { return r.name == baseline; });
  if (base.sets_used == 0) throw Error(ErrorKind::UndefinedCorrelation, "baseline could not be evaluated on any set");
  return rep;
}

// ---------------------------------------------------------------------------
// Report rendering

namespace detail {

inline std::string fmt_fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  auto s = os.str();
  if (s == "-0.00" || s == "-0.0000") s.erase(0, 1);
  return s;
}

struct GridPos {
  std::string preset;
  int mode;  // 0 All, 1 All + Amb., 2 Cont. words, 3 Cont. words + Amb.
};

inline std::optional<GridPos> grid_pos(const std::string& name) {
  const auto parts = text::split(name, '+');
  const auto& presets = preset_names();
  if (std::find(presets.begin(), presets.end(), parts.front()) == presets.end()) return std::nullopt;
  bool amb = false, cont = false;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i] == "amb") amb = true;
    else if (parts[i] == "cont") cont = true;
    else return std::nullopt;
  }
  return GridPos{std::string(parts.front()), (cont ? 2 : 0) + (amb ? 1 : 0)};
}

inline std::string preset_label(const std::string& p) {
  if (p == "lemma") return "Lemma";
  if (p == "pos") return "POS";
  if (p == "prev") return "Prev. POS";
  if (p == "next") return "Next POS";
  if (p == "cn") return "C+N";
  if (p == "pcn") return "P+C+N";
  return p;
}

inline void write_aligned(std::ostream& out, const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width;
  for (const auto& row : cells) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      const auto pad = width[c] - row[c].size();
      line += c == 0 ? row[c] + std::string(pad, ' ') : std::string(pad, ' ') + row[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
}

}  // namespace detail

inline void write_report_tsv(std::ostream& out, const ComparisonReport& rep) {
  out << "model\tweighted_rho\tdiff_pct\tsets_used";
  for (const auto& s : rep.set_names) out << '\t' << s << "_rho\t" << s << "_k";
  out << '\n';
  for (const auto& r : rep.rows) {
    out << r.name << (r.name == rep.baseline_name ? "#" : "") << '\t' << detail::fmt_fixed(r.weighted_rho, 4) << '\t'
        << detail::fmt_fixed(r.diff_pct, 2) << '\t' << r.sets_used;
    for (const auto& s : r.sets) {
      out << '\t' << (s.rho ? detail::fmt_fixed(*s.rho, 4) : "nan") << '\t' << s.best_k;
    }
    out << '\n';
  }
}

/// Aligned text. Grid-named variants are pivoted into `Model, rho, Diff. %`
/// column groups per preset with one row per word-filter mode; any other
/// naming falls back to one row per variant. The baseline is marked `#`;
/// `*` marks a rho computed over only some of the sets.
inline void write_report_table(std::ostream& out, const ComparisonReport& rep) {
  const auto cell_rho = [&](const ReportRow& r) {
    std::string s = r.sets_used == 0 ? "*" : detail::fmt_fixed(r.weighted_rho, 4) + (r.partial ? "*" : "");
    if (r.name == rep.baseline_name) s += " #";
    return s;
  };
  const auto cell_diff = [&](const ReportRow& r) {
    return r.name == rep.baseline_name ? std::string("-") : detail::fmt_fixed(r.diff_pct, 2);
  };

  bool grid = true;
  std::vector<std::string> presets;
  std::set<int> modes;
  std::map<std::pair<std::string, int>, const ReportRow*> at;
  for (const auto& r : rep.rows) {
    auto pos = detail::grid_pos(r.name);
    if (!pos || at.contains({pos->preset, pos->mode})) {
      grid = false;
      break;
    }
    at[{pos->preset, pos->mode}] = &r;
    modes.insert(pos->mode);
    if (std::find(presets.begin(), presets.end(), pos->preset) == presets.end()) presets.push_back(pos->preset);
  }

  std::vector<std::vector<std::string>> cells;
  bool any_partial = false;
  for (const auto& r : rep.rows) any_partial = any_partial || r.partial;
  if (grid) {
    std::vector<std::string> ordered;
    for (const auto& p : preset_names()) {
      if (std::find(presets.begin(), presets.end(), p) != presets.end()) ordered.push_back(p);
    }
    std::vector<std::string> header{"Model"};
    for (const auto& p : ordered) {
      header.push_back(detail::preset_label(p));
      header.push_back("Diff. %");
    }
    cells.push_back(header);
    static const char* mode_label[] = {"All", "All + Amb.", "Cont. words", "Cont. words + Amb."};
    for (int mode : modes) {
      std::vector<std::string> line{mode_label[mode]};
      for (const auto& p : ordered) {
        auto it = at.find({p, mode});
        if (it == at.end()) {
          line.insert(line.end(), {"", ""});
        } else {
          line.push_back(cell_rho(*it->second));
          line.push_back(cell_diff(*it->second));
        }
      }
      cells.push_back(std::move(line));
    }
  } else {
    cells.push_back({"Model", "rho", "Diff. %"});
    for (const auto& r : rep.rows) cells.push_back({r.name, cell_rho(r), cell_diff(r)});
  }
  detail::write_aligned(out, cells);
  out << "# baseline; weighted by test-set size over " << rep.set_names.size() << " set(s)\n";
  if (any_partial) out << "* not every set could be evaluated; Diff. % uses only the sets shared with the baseline\n";
}

}  // namespace poselsa
