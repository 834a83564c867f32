#ifndef EMOSHOT_PIPELINE_HPP
#define EMOSHOT_PIPELINE_HPP

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "baseline.hpp"
#include "classifier.hpp"
#include "corpus.hpp"
#include "detail/io.hpp"
#include "embeddings.hpp"
#include "error.hpp"
#include "labelspace.hpp"
#include "metrics.hpp"

namespace emoshot {

enum class Method { WordnetDefinition, LabeledSentences, WordEmbedding, LogregBaseline };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::WordnetDefinition: return "wordnet_definition";
    case Method::LabeledSentences: return "labeled_sentences";
    case Method::WordEmbedding: return "word_embedding";
    case Method::LogregBaseline: return "logreg_baseline";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  if (s == "logreg_baseline") return Method::LogregBaseline;
  if (const auto p = parse_projection_method(s)) return static_cast<Method>(static_cast<int>(*p));
  return std::nullopt;
}

inline ProjectionMethod projection_of(Method m) {
  if (m == Method::LogregBaseline) throw Error(ErrorKind::Config, "logreg_baseline is not a projection method");
  return static_cast<ProjectionMethod>(static_cast<int>(m));
}

inline std::optional<Source> parse_source(std::string_view s) {
  if (s == "goemotions") return Source::GoEmotions;
  if (s == "semeval") return Source::SemEval;
  return std::nullopt;
}

struct RunConfig {
  Source dataset = Source::SemEval;
  std::string train_file, dev_file, test_file;
  std::string taxonomy_file;  // GoEmotions label list
  std::string corpus_file;    // unified export, used instead of the three split files
  Method method = Method::WordnetDefinition;
  std::string embeddings_path;  // EMBTSV
  std::string glove_path;
  std::string provider;
  std::string definitions_path;
  std::size_t dev_size = 0;  // 0: whole dev split
  std::uint64_t seed = 0;
  std::string out_dir;
  bool include_neutral = false;
  TieRule tie_rule = TieRule::Largest;
  double grid_step = 0.01;
  LogRegOptions logreg;
  std::string transfer_source_taxonomy;  // non-empty: also write the unseen-label report

  /// Stable key=value rendering; the digest is computed over it.
  std::string canonical() const {
    std::map<std::string, std::string> kv{
        {"dataset", to_string(dataset)},
        {"train", train_file},
        {"dev", dev_file},
        {"test", test_file},
        {"taxonomy", taxonomy_file},
        {"corpus", corpus_file},
        {"method", to_string(method)},
        {"embeddings", embeddings_path},
        {"glove", glove_path},
        {"provider", provider},
        {"definitions", definitions_path},
        {"dev_size", std::to_string(dev_size)},
        {"seed", std::to_string(seed)},
        {"include_neutral", include_neutral ? "true" : "false"},
        {"tie_rule", to_string(tie_rule)},
        {"grid_step", detail::format_double(grid_step)},
        {"l2", detail::format_double(logreg.l2)},
        {"max_epochs", std::to_string(logreg.max_epochs)},
        {"tolerance", detail::format_double(logreg.tolerance)},
        {"transfer_source_taxonomy", transfer_source_taxonomy},
    };
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
  }

  std::string digest() const {
    detail::Fnv1a h;
    h.update(canonical());
    return h.hex();
  }
};

/// Rejects incompatible settings before any file is touched.
inline void validate(const RunConfig& c) {
  const bool has_corpus = !c.corpus_file.empty();
  const bool has_splits = !c.train_file.empty() || !c.dev_file.empty() || !c.test_file.empty();
  if (has_corpus == has_splits)
    throw Error(ErrorKind::Config, "give either a unified corpus file or the train/dev/test files");
  if (has_splits && (c.train_file.empty() || c.dev_file.empty() || c.test_file.empty()))
    throw Error(ErrorKind::Config, "train, dev and test files are all required");
  if (c.dataset == Source::GoEmotions && c.taxonomy_file.empty())
    throw Error(ErrorKind::Config, "goemotions needs a taxonomy file");
  grid_intervals(c.grid_step);

  const bool glove = !c.glove_path.empty();
  const bool embtsv = !c.embeddings_path.empty();
  switch (c.method) {
    case Method::WordEmbedding:
      if (!glove) throw Error(ErrorKind::Config, "word_embedding needs a word-vector table (--glove); EMBTSV is not accepted");
      if (embtsv) throw Error(ErrorKind::Config, "word_embedding takes --glove only, not --embeddings");
      break;
    case Method::WordnetDefinition:
      if (c.definitions_path.empty()) throw Error(ErrorKind::Config, "wordnet_definition needs a definitions file");
      [[fallthrough]];
    case Method::LabeledSentences:
      if (glove == embtsv) throw Error(ErrorKind::Config, "give exactly one of --glove or --embeddings");
      break;
    case Method::LogregBaseline:
      if (glove || embtsv) throw Error(ErrorKind::Config, "logreg_baseline uses bag-of-ngrams features, not embeddings");
      break;
  }
}

inline Corpus load_corpus(const RunConfig& c) {
  if (!c.corpus_file.empty()) {
    auto taxonomy = c.dataset == Source::SemEval ? EmotionTaxonomy::semeval() : load_taxonomy(c.taxonomy_file);
    return read_corpus_export(c.corpus_file, std::move(taxonomy), c.dataset);
  }
  if (c.dataset == Source::GoEmotions) return parse_goemotions(c.train_file, c.dev_file, c.test_file, c.taxonomy_file);
  return parse_semeval(c.train_file, c.dev_file, c.test_file);
}

inline std::vector<Document> dev_subsample(const Corpus& corpus, const RunConfig& c) {
  const auto n = c.dev_size == 0 ? corpus.split_size(Split::Dev) : c.dev_size;
  return subsample_dev(corpus, n, c.seed);
}

inline std::string dev_set_id(const Corpus& corpus, std::size_t n, std::uint64_t seed) {
  return std::string(to_string(corpus.source())) + ":dev:n=" + std::to_string(n) + ":seed=" + std::to_string(seed);
}

// ---------------------------------------------------------------------------------------------
// Embeddings for a run

struct PreparedEmbeddings {
  std::optional<WordVectorTable> words;
  EmbeddingTable documents{1, "none"};  // dev and test documents, plus label keys on the EMBTSV route
  std::vector<std::string> unembeddable;
};

/// Loads the embedding source and covers every dev and test document. On the GloVe route only
/// the vocabulary of those documents, the labels and the definition sentences is kept.
inline PreparedEmbeddings prepare_embeddings(const RunConfig& c, const Corpus& corpus,
                                             std::span<const LabelDefinition> definitions) {
  std::vector<Document> docs = corpus.split(Split::Dev);
  for (auto& d : corpus.split(Split::Test)) docs.push_back(std::move(d));

  PreparedEmbeddings prepared;
  if (!c.glove_path.empty()) {
    std::vector<std::string> texts;
    for (const auto& d : docs) texts.push_back(d.text);
    for (const auto& l : corpus.taxonomy().labels()) texts.push_back(l);
    for (const auto& d : definitions) texts.push_back(definition_sentence(d));
    const auto vocab = vocabulary_of(texts);
    prepared.words = load_glove(c.glove_path, &vocab);
    auto embedded = embed_documents(docs, *prepared.words, c.provider.empty() ? "glove-avg" : c.provider);
    prepared.documents = std::move(embedded.table);
    prepared.unembeddable = std::move(embedded.unembeddable);
  } else {
    prepared.documents = read_embeddings(c.embeddings_path, c.provider);
    for (const auto& d : docs)
      if (!prepared.documents.find(d.id)) prepared.unembeddable.push_back(d.id);
  }
  return prepared;
}

// ---------------------------------------------------------------------------------------------
// Projection-method run

struct MethodRun {
  LabelRepresentation labels;
  ThresholdProfile thresholds;
  ScoreMatrix test_scores;
  PredictionSet predictions;
  EvaluationReport report;
  std::size_t dev_masked = 0;
};

inline LabelRepresentation build_labels(ProjectionMethod method, const EmotionTaxonomy& taxonomy,
                                        std::span<const Document> dev, const PreparedEmbeddings& emb,
                                        std::span<const LabelDefinition> definitions) {
  switch (method) {
    case ProjectionMethod::WordnetDefinition:
      if (emb.words) return build_labels_definition(taxonomy, definitions, embed_definitions(taxonomy, definitions, *emb.words));
      return build_labels_definition(taxonomy, definitions, emb.documents);
    case ProjectionMethod::LabeledSentences:
      return build_labels_centroid(taxonomy, dev, emb.documents);
    case ProjectionMethod::WordEmbedding:
      if (!emb.words) throw Error(ErrorKind::Config, "word_embedding needs a word-vector table");
      return build_labels_word(taxonomy, *emb.words);
  }
  throw Error(ErrorKind::Config, "unknown projection method");
}

/// Labels left out of macro averages: unrepresentable ones and, unless included, neutral.
inline std::vector<ExcludedLabel> excluded_labels(const EmotionTaxonomy& taxonomy, const LabelRepresentation* labels,
                                                  bool include_neutral) {
  std::vector<ExcludedLabel> out;
  if (labels)
    for (const auto& [index, reason] : labels->unrepresentable) out.push_back({index, "unrepresentable: " + reason});
  if (!include_neutral)
    if (const auto n = taxonomy.index_of(kNeutralLabel)) out.push_back({*n, "neutral excluded by default"});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  return out;
}

/// Label construction, calibration on `dev`, prediction and evaluation on the test split.
inline MethodRun run_projection(const Corpus& corpus, ProjectionMethod method, std::span<const Document> dev,
                                const PreparedEmbeddings& emb, std::span<const LabelDefinition> definitions,
                                const CalibrationOptions& calibration, bool include_neutral) {
  const auto& taxonomy = corpus.taxonomy();
  auto labels = build_labels(method, taxonomy, dev, emb, definitions);
  const auto dev_scores = score(dev, emb.documents, labels);
  auto thresholds = calibrate_thresholds(dev_scores, dev, calibration);
  const auto test = corpus.split(Split::Test);
  auto test_scores = score(test, emb.documents, labels);
  auto predictions = predict(test_scores, thresholds);
  const auto excluded = excluded_labels(taxonomy, &labels, include_neutral);
  auto report = evaluate(predictions, test, taxonomy, excluded);
  return {std::move(labels), std::move(thresholds), std::move(test_scores), std::move(predictions), std::move(report),
          dev_scores.masked_rows()};
}

struct BaselineRun {
  NgramFeatureSpace space;
  LinearModel model;
  PredictionSet predictions;
  EvaluationReport report;
};

/// Bag-of-ngrams + linearly balanced one-vs-rest logistic regression, trained on train and
/// evaluated on test.
inline BaselineRun run_logreg(const Corpus& corpus, const LogRegOptions& options, bool include_neutral) {
  const auto train = corpus.split(Split::Train);
  const auto test = corpus.split(Split::Test);
  std::vector<std::string> train_texts;
  for (const auto& d : train) train_texts.push_back(d.text);
  auto space = featurize(train_texts);

  std::vector<SparseVector> x_train, x_test;
  for (const auto& d : train) x_train.push_back(vectorize(d.text, space));
  for (const auto& d : test) x_test.push_back(vectorize(d.text, space));
  const auto weights = class_weights_linear(corpus);
  auto model = train_logreg(x_train, gold_sets(train), weights, space, options);

  std::vector<std::string> ids;
  for (const auto& d : test) ids.push_back(d.id);
  auto predictions = predict_baseline(model, ids, x_test);

  auto excluded = excluded_labels(corpus.taxonomy(), nullptr, include_neutral);
  for (std::size_t e = 0; e < weights.weights.size(); ++e)
    if (!weights.weights[e]) excluded.push_back({e, "no positive training example"});
  auto report = evaluate(predictions, test, corpus.taxonomy(), excluded);
  return {std::move(space), std::move(model), std::move(predictions), std::move(report)};
}

// ---------------------------------------------------------------------------------------------
// Reports and artifact files

/// Per-class rows for target labels absent from the source taxonomy.
inline std::vector<ClassPRF> emit_unseen_label_report(const EvaluationReport& report, const TaxonomyOverlap& overlap,
                                                      const EmotionTaxonomy& target) {
  std::vector<ClassPRF> rows;
  for (auto t : overlap.novel_in_target)
    if (const auto* row = report.find(target.label(t))) rows.push_back(*row);
  return rows;
}

inline void write_class_rows(std::span<const ClassPRF> rows, std::ostream& out, std::string_view config_digest = {}) {
  if (!config_digest.empty()) out << "# config_digest=" << config_digest << '\n';
  out << "label\tsupport\tprecision\trecall\tf1\n";
  for (const auto& r : rows)
    out << r.label << '\t' << r.support << '\t' << detail::format_double(r.precision) << '\t'
        << detail::format_double(r.recall) << '\t' << detail::format_double(r.f1) << '\n';
}

inline void write_predictions(const PredictionSet& p, const EmotionTaxonomy& taxonomy, std::ostream& out,
                              std::string_view config_digest = {}) {
  out << "# emoshot predictions v1\n# taxonomy=" << taxonomy.name() << '\n';
  if (!config_digest.empty()) out << "# config_digest=" << config_digest << '\n';
  for (std::size_t i = 0; i < p.doc_ids.size(); ++i) {
    out << p.doc_ids[i] << '\t';
    for (std::size_t k = 0; k < p.labels[i].size(); ++k) out << (k ? "|" : "") << taxonomy.label(p.labels[i][k]);
    out << '\n';
  }
}

inline PredictionSet read_predictions(const std::string& path, const EmotionTaxonomy& taxonomy) {
  auto in = detail::open_input(path);
  PredictionSet p;
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 2) throw FileError(ErrorKind::Format, path, line_no, "expected '<doc id>\\t<labels>'");
    std::vector<std::size_t> labels;
    if (!fields[1].empty())
      for (auto name : detail::split(fields[1], '|')) {
        const auto idx = taxonomy.index_of(name);
        if (!idx) throw FileError(ErrorKind::Format, path, line_no, "unknown label '" + std::string(name) + "'");
        labels.push_back(*idx);
      }
    p.doc_ids.emplace_back(fields[0]);
    p.labels.push_back(std::move(labels));
  }
  return p;
}

/// Per-label score statistics over present rows.
inline void write_score_summary(const ScoreMatrix& m, std::ostream& out, std::string_view config_digest = {}) {
  out << "# emoshot score summary v1\n# taxonomy=" << m.taxonomy().name() << "\n# documents=" << m.rows()
      << "\n# masked_rows=" << m.masked_rows() << '\n';
  if (!config_digest.empty()) out << "# config_digest=" << config_digest << '\n';
  out << "label\trepresentable\tmean\tmin\tmax\n";
  for (std::size_t e = 0; e < m.cols(); ++e) {
    out << m.taxonomy().label(e) << '\t' << (m.label_present(e) ? "yes" : "no");
    double sum = 0.0, lo = 1.0, hi = -1.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
      if (const auto s = m.at(i, e)) {
        sum += *s;
        lo = std::min(lo, *s);
        hi = std::max(hi, *s);
        ++n;
      }
    if (n > 0)
      out << '\t' << detail::format_double(sum / static_cast<double>(n)) << '\t' << detail::format_double(lo) << '\t'
          << detail::format_double(hi);
    else
      out << "\t-\t-\t-";
    out << '\n';
  }
}

/// Label vectors as EMBTSV records keyed label::<taxonomy>::<label>.
inline EmbeddingTable label_table(const LabelRepresentation& rep, std::string provider) {
  EmbeddingTable t(rep.dim, std::move(provider));
  for (std::size_t e = 0; e < rep.taxonomy.size(); ++e)
    if (rep.vectors[e]) t.add(label_key(rep.taxonomy, rep.taxonomy.label(e)), *rep.vectors[e]);
  return t;
}

/// Inverse of label_table; labels without a record are unrepresentable.
inline LabelRepresentation labels_from_table(const EmbeddingTable& t, const EmotionTaxonomy& taxonomy,
                                             ProjectionMethod method) {
  LabelRepresentation rep{method, taxonomy, t.dim(), std::vector<std::optional<Vector>>(taxonomy.size()), {},
                          "provider=" + t.provider(), 0};
  for (std::size_t e = 0; e < taxonomy.size(); ++e) {
    if (const auto v = t.find(label_key(taxonomy, taxonomy.label(e))))
      rep.vectors[e] = Vector(v->begin(), v->end());
    else
      rep.unrepresentable.emplace_back(e, "no label record");
  }
  return rep;
}

/// Holds an exclusive lock on an output directory and removes every file it wrote unless
/// commit() is called.
class OutputDirectory {
 public:
  explicit OutputDirectory(std::string dir) : dir_(std::move(dir)) {
    if (dir_.empty()) throw Error(ErrorKind::Config, "no output directory given");
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir_ + "': " + ec.message());
    lock_path_ = (std::filesystem::path(dir_) / ".emoshot.lock").string();
    lock_fd_ = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (lock_fd_ < 0) throw Error(ErrorKind::Io, "output directory '" + dir_ + "' is locked by another run");
  }

  OutputDirectory(const OutputDirectory&) = delete;
  OutputDirectory& operator=(const OutputDirectory&) = delete;

  ~OutputDirectory() {
    if (!committed_)
      for (const auto& f : written_) std::filesystem::remove(f);
    ::close(lock_fd_);
    std::filesystem::remove(lock_path_);
  }

  std::string path(const std::string& name) const { return (std::filesystem::path(dir_) / name).string(); }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const auto p = path(name);
    written_.push_back(p);
    auto out = detail::open_output(p);
    body(out);
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "failed writing '" + p + "'");
  }

  void commit() { committed_ = true; }

 private:
  std::string dir_;
  std::string lock_path_;
  int lock_fd_ = -1;
  std::vector<std::string> written_;
  bool committed_ = false;
};

struct RunSummary {
  EvaluationReport report;
  std::vector<ClassPRF> unseen;
  std::size_t unembeddable = 0;
};

/// Full pipeline for one configuration: ingest, embed, build labels, calibrate, predict,
/// evaluate. Writes score_summary.tsv, thresholds.tsv, predictions.tsv and report.json (or
/// model.tsv for the baseline) plus unseen_labels.tsv on transfer runs.
inline RunSummary run_pipeline(const RunConfig& c) {
  validate(c);
  const auto digest = c.digest();
  OutputDirectory out(c.out_dir);
  const auto corpus = load_corpus(c);
  RunSummary summary;

  if (c.method == Method::LogregBaseline) {
    auto run = run_logreg(corpus, c.logreg, c.include_neutral);
    out.write("model.tsv", [&](std::ostream& o) { write_linear_model(run.model, o, digest); });
    out.write("vocabulary.txt", [&](std::ostream& o) { write_vocabulary(run.space, o); });
    out.write("predictions.tsv", [&](std::ostream& o) { write_predictions(run.predictions, corpus.taxonomy(), o, digest); });
    summary.report = std::move(run.report);
  } else {
    std::vector<LabelDefinition> definitions;
    if (!c.definitions_path.empty()) definitions = load_definitions(c.definitions_path, corpus.taxonomy());
    const auto emb = prepare_embeddings(c, corpus, definitions);
    const auto dev = dev_subsample(corpus, c);
    const CalibrationOptions calibration{c.grid_step, c.tie_rule, dev_set_id(corpus, dev.size(), c.seed)};
    auto run = run_projection(corpus, projection_of(c.method), dev, emb, definitions, calibration, c.include_neutral);
    out.write("score_summary.tsv", [&](std::ostream& o) { write_score_summary(run.test_scores, o, digest); });
    out.write("thresholds.tsv", [&](std::ostream& o) { write_threshold_profile(run.thresholds, o, digest); });
    out.write("predictions.tsv", [&](std::ostream& o) { write_predictions(run.predictions, corpus.taxonomy(), o, digest); });
    summary.report = std::move(run.report);
    summary.unembeddable = emb.unembeddable.size();
  }

  auto report_json = to_json(summary.report, digest);
  report_json["method"] = to_string(c.method);
  report_json["unembeddable_documents"] = summary.unembeddable;
  out.write("report.json", [&](std::ostream& o) { o << report_json.dump(2) << '\n'; });

  if (!c.transfer_source_taxonomy.empty()) {
    const auto source = c.transfer_source_taxonomy == "goemotions" ? EmotionTaxonomy::goemotions()
                                                                   : load_taxonomy(c.transfer_source_taxonomy);
    const auto overlap = taxonomy_overlap(source, corpus.taxonomy());
    summary.unseen = emit_unseen_label_report(summary.report, overlap, corpus.taxonomy());
    out.write("unseen_labels.tsv", [&](std::ostream& o) { write_class_rows(summary.unseen, o, digest); });
  }
  out.commit();
  return summary;
}

/// Process exit code for an error family: 2 configuration, 3 data, 4 runtime.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Bounds:
      return 2;
    case ErrorKind::Parse:
    case ErrorKind::Format:
    case ErrorKind::Completeness:
    case ErrorKind::Alignment:
    case ErrorKind::Shape:
    case ErrorKind::Domain:
    case ErrorKind::Io:
      return 3;
    case ErrorKind::Training:
      return 4;
  }
  return 4;
}

}  // namespace emoshot

#endif  // EMOSHOT_PIPELINE_HPP
