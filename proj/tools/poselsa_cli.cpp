// poselsa: build, grade, sweep, compare and gen-synthetic.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "poselsa/poselsa.hpp"

namespace fs = std::filesystem;
using namespace poselsa;

namespace {

enum ExitCode : int {
  kOk = 0,
  kIo = 2,
  kParse = 3,
  kValidation = 4,
  kCalibration = 5,
  kNumeric = 6,
  kEmptyModel = 7,
  kUndefinedCorrelation = 8,
  kConfigMismatch = 9,
  kInternal = 70,
  kUsage = 64,
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return kIo;
    case ErrorKind::Parse: return kParse;
    case ErrorKind::Validation: return kValidation;
    case ErrorKind::Calibration: return kCalibration;
    case ErrorKind::Numeric: return kNumeric;
    case ErrorKind::EmptyModel: return kEmptyModel;
    case ErrorKind::UndefinedCorrelation: return kUndefinedCorrelation;
    case ErrorKind::ConfigMismatch: return kConfigMismatch;
  }
  return kInternal;
}

struct ModelFlags {
  std::string variant;
  std::string kinds;
  bool ambiguous = false;
  bool content_words = false;
  std::string content_tags = "N,V,A";
  std::string boundary_tag = "PUNCT";
  std::string granularity = "document";
  std::string weighting = "log-entropy";
  std::string aggregation = "sum";
  bool no_prune = false;
  std::vector<CLI::Option*> options;

  void attach(CLI::App* app, bool single_variant = true) {
    options.clear();
    if (single_variant) {
      options.push_back(app->add_option("--variant", variant,
                                        "Preset: lemma|pos|prev|next|cn|pcn, optionally +amb and/or +cont"));
      options.push_back(app->add_option("--kinds", kinds, "Explicit entry kinds, comma separated: lemma,cur,prev,next"));
    }
    const std::vector<CLI::Option*> shared{
        app->add_flag("--ambiguous", ambiguous, "Add every reading of ambiguous tokens"),
        app->add_flag("--content-words", content_words, "Key only content words"),
        app->add_option("--content-tags", content_tags, "Content word tags")->capture_default_str(),
        app->add_option("--boundary-tag", boundary_tag, "Sentence boundary / punctuation tag")->capture_default_str(),
        app->add_option("--granularity", granularity, "Context unit: document|sentence")->capture_default_str(),
        app->add_option("--weighting", weighting, "Term weighting: log-entropy|raw")->capture_default_str(),
        app->add_option("--aggregation", aggregation, "Essay score: sum|mean of cosines")->capture_default_str(),
        app->add_flag("--no-prune", no_prune, "Keep entries that occur only once"),
    };
    options.insert(options.end(), shared.begin(), shared.end());
  }

  bool any_given() const {
    for (auto* o : options) {
      if (o->count() > 0) return true;
    }
    return false;
  }

  ModelConfig config() const {
    ModelConfig c;
    if (!variant.empty()) c = make_variant(variant).config;
    if (!kinds.empty()) {
      c.kinds.clear();
      for (auto k : text::split(kinds, ',')) c.kinds.push_back(parse_entry_kind(text::trim(k)));
    }
    c.include_ambiguous = c.include_ambiguous || ambiguous;
    c.content_words_only = c.content_words_only || content_words;
    c.content_tags.clear();
    for (auto t : text::split(content_tags, ',')) {
      if (!text::trim(t).empty()) c.content_tags.insert(std::string(text::trim(t)));
    }
    c.boundary_tag = boundary_tag;
    c.prune_singletons = !no_prune;
    c.weighting = parse_weighting(weighting);
    c.validate();
    return c;
  }

  Granularity gran() const { return parse_granularity(granularity); }
  Aggregation agg() const { return parse_aggregation(aggregation); }
};

std::pair<int, int> parse_scale(const std::string& s) {
  const auto dash = s.find('-', 1);
  if (dash == std::string::npos) throw Error(ErrorKind::Validation, "scale must look like MIN-MAX, got '" + s + "'");
  try {
    const int lo = std::stoi(s.substr(0, dash));
    const int hi = std::stoi(s.substr(dash + 1));
    if (lo >= hi) throw Error(ErrorKind::Validation, "scale needs MIN < MAX");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::Validation, "scale must look like MIN-MAX, got '" + s + "'");
  }
}

std::pair<int, int> parse_k_range(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::Validation, "k range must look like LO:HI");
  try {
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::Validation, "k range must look like LO:HI, got '" + s + "'");
  }
}

/// Writes to the file when a path is given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void log_config(const ModelConfig& c, Granularity g, Aggregation a) {
  log::info("config " + config_fingerprint(c, g, a) + " " + pipeline_canonical(c, g, a));
}

StopwordSet stopwords_or_empty(const std::string& path) {
  return path.empty() ? StopwordSet{} : load_stopwords(path);
}

// --- build -----------------------------------------------------------------

struct BuildArgs {
  ModelFlags model;
  std::string corpus, train, stopwords, scale, out, dump_wcm;
  int k = 0;
};

int run_build(const BuildArgs& a) {
  const auto config = a.model.config();
  const auto gran = a.model.gran();
  const auto agg = a.model.agg();
  const auto [lo, hi] = parse_scale(a.scale);
  log_config(config, gran, agg);

  const auto corpus = parse_corpus(a.corpus, gran);
  const auto train = parse_essay_set(a.train, lo, hi);
  const auto stop = stopwords_or_empty(a.stopwords);

  Wcm w = build_wcm(corpus, config, stop);
  if (config.prune_singletons) w = prune_singletons(w);
  const auto weighted = apply_weighting(w, config.weighting);
  if (!a.dump_wcm.empty()) {
    std::ofstream mm(a.dump_wcm + ".mtx"), voc(a.dump_wcm + ".vocab");
    if (!mm || !voc) throw Error(ErrorKind::Io, "cannot write WCM dump at '" + a.dump_wcm + "'");
    write_matrix_market(mm, w.counts);
    write_vocabulary(voc, w.vocabulary);
  }
  auto space = build_space(weighted, a.k);
  const auto model = calibrate_thresholds(std::move(space), train, config, stop, agg);
  for (const auto& msg : model.warnings) log::warn("calibration: " + msg);
  save_model(a.out, model, gran);

  std::cout << "model\t" << a.out << "\nentries\t" << weighted.rows() << "\ncontexts\t" << weighted.cols()
            << "\nk\t" << a.k << "\ncutpoints";
  for (double c : model.cutpoints) std::cout << '\t' << fmt17(c);
  std::cout << '\n';
  return kOk;
}

// --- grade -----------------------------------------------------------------

struct GradeArgs {
  ModelFlags model;
  std::string model_path, essays, stopwords, output, format = "tsv";
};

int run_grade(const GradeArgs& a) {
  const auto stored = load_model(a.model_path);
  const auto& m = stored.model;
  if (a.model.any_given()) {
    const auto requested = config_fingerprint(a.model.config(), a.model.gran(), a.model.agg());
    if (requested != stored.config_fingerprint) {
      throw Error(ErrorKind::ConfigMismatch,
                  "flags describe pipeline " + requested + " (" +
                      pipeline_canonical(a.model.config(), a.model.gran(), a.model.agg()) + ") but the model was built with " +
                      stored.config_fingerprint + " (" + pipeline_canonical(m.config, stored.granularity, m.aggregation) + ")");
    }
  }
  log_config(m.config, stored.granularity, m.aggregation);
  log::info("model fingerprint " + stored.fingerprint);

  const auto essays = parse_essays(a.essays);
  const auto results = grade_essays(m, essays, stopwords_or_empty(a.stopwords));
  bool any_human = false;
  for (const auto& r : results) any_human = any_human || r.human.has_value();

  Output out(a.output);
  auto& os = out.stream();
  if (a.format == "tsv") {
    os << "essay_id\traw_score\tassigned_grade" << (any_human ? "\thuman_grade" : "") << '\n';
    for (const auto& r : results) {
      os << r.essay_id << '\t' << fmt17(r.score) << '\t' << r.assigned;
      if (any_human) os << '\t' << (r.human ? std::to_string(*r.human) : "");
      os << '\n';
    }
  } else {
    std::vector<std::vector<std::string>> cells{{"Essay", "Score", "Grade"}};
    if (any_human) cells[0].push_back("Human");
    for (const auto& r : results) {
      std::ostringstream s;
      s << std::fixed << std::setprecision(4) << r.score;
      cells.push_back({r.essay_id, s.str(), std::to_string(r.assigned)});
      if (any_human) cells.back().push_back(r.human ? std::to_string(*r.human) : "");
    }
    detail::write_aligned(os, cells);
  }
  return kOk;
}

// --- sweep -----------------------------------------------------------------

struct SetArgs {
  std::string set_dir, corpus, train, test, stopwords, scale;
};

EvalSet load_single_set(const SetArgs& a, Granularity gran) {
  std::optional<std::pair<int, int>> scale;
  if (!a.scale.empty()) scale = parse_scale(a.scale);
  if (!a.set_dir.empty()) {
    auto s = load_eval_set(a.set_dir, gran, scale);
    if (!a.stopwords.empty()) s.stopwords = load_stopwords(a.stopwords);
    return s;
  }
  if (a.corpus.empty() || a.train.empty() || a.test.empty() || !scale) {
    throw Error(ErrorKind::Validation, "give --set DIR, or --corpus, --train, --test and --scale");
  }
  EvalSet s;
  s.name = fs::path(a.test).stem().string();
  s.corpus = parse_corpus(a.corpus, gran);
  s.train = parse_essay_set(a.train, scale->first, scale->second);
  s.test = parse_essay_set(a.test, scale->first, scale->second);
  s.stopwords = stopwords_or_empty(a.stopwords);
  return s;
}

struct SweepArgs {
  ModelFlags model;
  SetArgs set;
  std::string k_range, output, select_on = "test", validation;
};

int run_sweep(const SweepArgs& a) {
  const auto config = a.model.config();
  const auto gran = a.model.gran();
  SweepOptions opts;
  opts.aggregation = a.model.agg();
  if (!a.k_range.empty()) opts.k_range = parse_k_range(a.k_range);
  log_config(config, gran, opts.aggregation);

  const auto set = load_single_set(a.set, gran);
  std::optional<GradedEssaySet> validation;
  if (a.select_on == "validation") {
    if (a.validation.empty()) throw Error(ErrorKind::Validation, "--select-on validation needs --validation FILE");
    validation = parse_essay_set(a.validation, set.train.grade_min, set.train.grade_max);
    opts.select_on = SelectOn::Validation;
    opts.validation = &*validation;
  }
  const auto r = sweep_dimensions(set.corpus, set.train, set.test, config, set.stopwords, opts);
  if (r.calibration_warnings > 0) {
    log::warn("calibration was degenerate at " + std::to_string(r.calibration_warnings) + " of " +
              std::to_string(r.per_k.size()) + " dimensions");
  }
  Output out(a.output);
  write_sweep_tsv(out.stream(), r);
  out.stream() << "# best_k=" << r.best_k << " best_rho=" << std::fixed << std::setprecision(6) << r.best_rho
               << " m=" << r.m << " n=" << r.n << " selected_on=" << a.select_on << '\n';
  return kOk;
}

// --- compare ---------------------------------------------------------------

struct CompareArgs {
  ModelFlags model;
  SetArgs single;
  std::vector<std::string> sets, variants;
  bool grid = false;
  std::string baseline = "lemma", output, format = "table", k_range;
};

int run_compare(const CompareArgs& a) {
  const auto base = a.model.config();
  const auto gran = a.model.gran();
  SweepOptions opts;
  opts.aggregation = a.model.agg();
  if (!a.k_range.empty()) opts.k_range = parse_k_range(a.k_range);

  std::vector<EvalSet> sets;
  for (const auto& dir : a.sets) {
    SetArgs s = a.single;
    s.set_dir = dir;
    sets.push_back(load_single_set(s, gran));
  }
  if (sets.empty()) sets.push_back(load_single_set(a.single, gran));

  std::vector<Variant> variants;
  if (a.grid) {
    variants = variant_grid(base);
  } else if (a.variants.empty()) {
    for (const auto& p : preset_names()) variants.push_back(make_variant(p, base));
  } else {
    for (const auto& v : a.variants) variants.push_back(make_variant(v, base));
  }
  for (const auto& v : variants) log_config(v.config, gran, opts.aggregation);

  const auto rep = compare_models(sets, variants, a.baseline, opts);
  Output out(a.output);
  if (a.format == "tsv") {
    write_report_tsv(out.stream(), rep);
  } else {
    write_report_table(out.stream(), rep);
  }
  return kOk;
}

// --- gen-synthetic -----------------------------------------------------------

struct GenArgs {
  SynthSpec spec;
  std::string out, overlap;
};

int run_gen(GenArgs a) {
  if (!a.overlap.empty()) {
    a.spec.overlap_profile.clear();
    for (auto f : text::split(a.overlap, ',')) {
      try {
        a.spec.overlap_profile.push_back(std::stod(std::string(text::trim(f))));
      } catch (const std::logic_error&) {
        throw Error(ErrorKind::Validation, "bad overlap value '" + std::string(f) + "'");
      }
    }
  }
  const auto data = generate(a.spec);
  write_synthetic(a.out, data);
  std::cout << "wrote " << data.corpus.documents.size() << " contexts, " << data.train.size() << " train and "
            << data.test.size() << " test essays to " << a.out << '\n';
  return kOk;
}

void add_set_options(CLI::App* app, SetArgs& s, bool allow_dir = true) {
  if (allow_dir) app->add_option("--set", s.set_dir, "Directory with corpus.tagged, train.tagged, test.tagged");
  app->add_option("--corpus", s.corpus, "Tagged course corpus");
  app->add_option("--train", s.train, "Graded training essays");
  app->add_option("--test", s.test, "Graded test essays");
  app->add_option("--stopwords", s.stopwords, "Stopword lemmas, one per line");
  app->add_option("--scale", s.scale, "Grade scale MIN-MAX (default: <set>/scale)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Part-of-speech enhanced LSA essay grading"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress info logging");

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Build and persist a scoring model");
  build.model.attach(build_cmd);
  build_cmd->add_option("--corpus", build.corpus, "Tagged course corpus")->required();
  build_cmd->add_option("--train", build.train, "Graded training essays")->required();
  build_cmd->add_option("--scale", build.scale, "Grade scale MIN-MAX")->required();
  build_cmd->add_option("--stopwords", build.stopwords, "Stopword lemmas, one per line");
  build_cmd->add_option("--k", build.k, "Retained dimensions")->required()->check(CLI::PositiveNumber);
  build_cmd->add_option("--model", build.out, "Output model file")->required();
  build_cmd->add_option("--dump-wcm", build.dump_wcm, "Write PREFIX.mtx and PREFIX.vocab");

  GradeArgs grade;
  auto* grade_cmd = app.add_subcommand("grade", "Grade essays with a persisted model");
  grade.model.attach(grade_cmd);
  grade_cmd->add_option("--model", grade.model_path, "Model file")->required()->check(CLI::ExistingFile);
  grade_cmd->add_option("--essays,--test", grade.essays, "Essays to grade")->required();
  grade_cmd->add_option("--stopwords", grade.stopwords, "Stopword lemmas, one per line");
  grade_cmd->add_option("--output", grade.output, "Output file (default stdout)");
  grade_cmd->add_option("--format", grade.format, "tsv|table")->check(CLI::IsMember({"tsv", "table"}))->capture_default_str();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grade at every dimension and report the curve");
  sweep.model.attach(sweep_cmd);
  add_set_options(sweep_cmd, sweep.set);
  sweep_cmd->add_option("--k-range", sweep.k_range, "LO:HI, default 2:n");
  sweep_cmd->add_option("--output", sweep.output, "Output file (default stdout)");
  sweep_cmd->add_option("--select-on", sweep.select_on, "test|validation")
      ->check(CLI::IsMember({"test", "validation"}))
      ->capture_default_str();
  sweep_cmd->add_option("--validation", sweep.validation, "Graded essays used to pick k with --select-on validation");
  std::string sweep_format = "tsv";
  sweep_cmd->add_option("--format", sweep_format, "tsv")->check(CLI::IsMember({"tsv"}));

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "Compare model variants over one or more essay sets");
  compare.model.attach(compare_cmd, false);
  add_set_options(compare_cmd, compare.single, false);
  compare_cmd->add_option("--set", compare.sets, "Set directory; repeat for several sets");
  compare_cmd->add_option("--variant", compare.variants, "Variant to compare; repeat or comma-separate (default: the six presets)")
      ->delimiter(',');
  compare_cmd->add_flag("--grid", compare.grid, "All presets x {plain,+amb} x {all,+cont}");
  compare_cmd->add_option("--baseline", compare.baseline, "Baseline variant")->capture_default_str();
  compare_cmd->add_option("--k-range", compare.k_range, "LO:HI, default 2:n");
  compare_cmd->add_option("--output", compare.output, "Output file (default stdout)");
  compare_cmd->add_option("--format", compare.format, "tsv|table")
      ->check(CLI::IsMember({"tsv", "table"}))
      ->capture_default_str();

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Write a seeded synthetic corpus and graded essay sets");
  gen_cmd->add_option("--seed", gen.spec.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--n-contexts", gen.spec.n_contexts)->capture_default_str();
  gen_cmd->add_option("--vocab-size", gen.spec.vocab_size)->capture_default_str();
  gen_cmd->add_option("--n-train", gen.spec.n_train)->capture_default_str();
  gen_cmd->add_option("--n-test", gen.spec.n_test)->capture_default_str();
  gen_cmd->add_option("--grade-min", gen.spec.grade_min)->capture_default_str();
  gen_cmd->add_option("--grade-max", gen.spec.grade_max)->capture_default_str();
  gen_cmd->add_option("--ambiguity-rate", gen.spec.ambiguity_rate)->capture_default_str();
  gen_cmd->add_option("--digressions", gen.spec.digression_contexts, "Off-topic corpus contexts")->capture_default_str();
  gen_cmd->add_option("--sentences-per-context", gen.spec.sentences_per_context)->capture_default_str();
  gen_cmd->add_option("--sentences-per-essay", gen.spec.sentences_per_essay)->capture_default_str();
  gen_cmd->add_option("--overlap", gen.overlap, "Comma-separated on-topic fraction per grade");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (quiet) {
    log::set_sink([](log::Level level, const std::string& msg) {
      if (level == log::Level::Warn) std::clog << "[warn] " << msg << '\n';
    });
  }

  try {
    if (*build_cmd) return run_build(build);
    if (*grade_cmd) return run_grade(grade);
    if (*sweep_cmd) return run_sweep(sweep);
    if (*compare_cmd) return run_compare(compare);
    if (*gen_cmd) return run_gen(gen);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
