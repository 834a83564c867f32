// emoshot command-line driver.
//
//   emoshot <subcommand> [options]
//
// Subcommands: ingest, embed-glove, build-labels, calibrate, predict, evaluate, curve, transfer, run.
// Options may also come from a flat key=value file given with --config; flags win over the file.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <emoshot/pipeline.hpp>

#ifndef EMOSHOT_DATA_DIR
#define EMOSHOT_DATA_DIR "data"
#endif

namespace {

using namespace emoshot;

struct Options {
  std::string dataset = "semeval";
  std::string method = "wordnet_definition";
  std::string tie_rule = "largest";
  RunConfig config;
  std::string labels_path;
  std::string thresholds_path;
  std::string predictions_path;
  std::vector<std::size_t> sizes;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> methods;
  std::string source_taxonomy = "goemotions";
};

std::string data_file(const std::string& rel) { return std::string(EMOSHOT_DATA_DIR) + "/" + rel; }

/// Turns parsed strings into the typed config and fills data-directory defaults.
RunConfig resolve(const Options& o) {
  RunConfig c = o.config;
  const auto source = parse_source(o.dataset);
  if (!source) throw Error(ErrorKind::Config, "unknown dataset '" + o.dataset + "'");
  c.dataset = *source;
  const auto method = parse_method(o.method);
  if (!method) throw Error(ErrorKind::Config, "unknown method '" + o.method + "'");
  c.method = *method;
  const auto tie = parse_tie_rule(o.tie_rule);
  if (!tie) throw Error(ErrorKind::Config, "unknown tie rule '" + o.tie_rule + "'");
  c.tie_rule = *tie;
  if (c.dataset == Source::GoEmotions && c.taxonomy_file.empty()) c.taxonomy_file = data_file("taxonomy/goemotions.txt");
  if (c.method == Method::WordnetDefinition && c.definitions_path.empty())
    c.definitions_path = data_file("definitions/" + std::string(to_string(c.dataset)) + ".tsv");
  return c;
}

void require_projection(const RunConfig& c) {
  if (c.method == Method::LogregBaseline) throw Error(ErrorKind::Config, "this subcommand needs a projection method");
  validate(c);
}

void print_report(const EvaluationReport& r) {
  std::cout << "macro precision " << detail::format_double(r.macro_p, 4) << "  recall "
            << detail::format_double(r.macro_r, 4) << "  f1 " << detail::format_double(r.macro_f1, 4) << "  ("
            << r.per_class.size() << " labels, " << r.doc_count << " documents)\n";
}

std::vector<LabelDefinition> definitions_for(const RunConfig& c, const Corpus& corpus) {
  if (c.definitions_path.empty()) return {};
  return load_definitions(c.definitions_path, corpus.taxonomy());
}

/// Label vectors from --labels when given, otherwise rebuilt from the embedding source.
LabelRepresentation labels_for(const Options& o, const RunConfig& c, const Corpus& corpus,
                               const PreparedEmbeddings& emb, std::span<const LabelDefinition> defs,
                               std::span<const Document> dev) {
  const auto method = projection_of(c.method);
  if (!o.labels_path.empty()) return labels_from_table(read_embeddings(o.labels_path), corpus.taxonomy(), method);
  return build_labels(method, corpus.taxonomy(), dev, emb, defs);
}

int cmd_ingest(const RunConfig& c) {
  OutputDirectory out(c.out_dir);
  const auto corpus = load_corpus(c);
  const auto digest = c.digest();
  out.write("corpus.tsv", [&](std::ostream& o) { write_corpus_export(corpus, o); });
  out.write("label_counts.tsv", [&](std::ostream& o) {
    o << "# config_digest=" << digest << "\nlabel\ttrain\tdev\ttest\n";
    const auto tr = label_frequencies(corpus, Split::Train);
    const auto dv = label_frequencies(corpus, Split::Dev);
    const auto te = label_frequencies(corpus, Split::Test);
    for (std::size_t e = 0; e < corpus.taxonomy().size(); ++e)
      o << corpus.taxonomy().label(e) << '\t' << tr[e] << '\t' << dv[e] << '\t' << te[e] << '\n';
  });
  out.commit();
  std::cout << corpus.documents().size() << " documents (" << corpus.split_size(Split::Train) << " train, "
            << corpus.split_size(Split::Dev) << " dev, " << corpus.split_size(Split::Test) << " test), "
            << corpus.taxonomy().size() << " labels\n";
  return 0;
}

int cmd_embed_glove(const RunConfig& c) {
  if (c.glove_path.empty()) throw Error(ErrorKind::Config, "embed-glove needs --glove");
  OutputDirectory out(c.out_dir);
  const auto corpus = load_corpus(c);
  const auto defs = definitions_for(c, corpus);
  std::vector<std::string> texts;
  for (const auto& d : corpus.documents()) texts.push_back(d.text);
  for (const auto& d : defs) texts.push_back(definition_sentence(d));
  const auto vocab = vocabulary_of(texts);
  const auto words = load_glove(c.glove_path, &vocab);
  auto embedded = embed_documents(corpus.documents(), words, c.provider.empty() ? "glove-avg" : c.provider);
  const auto label_vectors = embed_definitions(corpus.taxonomy(), defs, words);
  for (std::size_t i = 0; i < label_vectors.size(); ++i)
    embedded.table.add(label_vectors.keys()[i], label_vectors.row(i));
  out.write("embeddings.embtsv", [&](std::ostream& o) { write_embeddings(embedded.table, o); });
  out.write("unembeddable.txt", [&](std::ostream& o) {
    o << "# config_digest=" << c.digest() << '\n';
    for (const auto& id : embedded.unembeddable) o << id << '\n';
  });
  out.commit();
  std::cout << embedded.table.size() << " vectors written, " << embedded.unembeddable.size()
            << " unembeddable documents\n";
  return 0;
}

int cmd_build_labels(const Options& o, const RunConfig& c) {
  require_projection(c);
  OutputDirectory out(c.out_dir);
  const auto corpus = load_corpus(c);
  const auto defs = definitions_for(c, corpus);
  const auto emb = prepare_embeddings(c, corpus, defs);
  const auto dev = dev_subsample(corpus, c);
  const auto rep = labels_for(o, c, corpus, emb, defs, dev);
  out.write("labels.embtsv", [&](std::ostream& s) {
    write_embeddings(label_table(rep, std::string(to_string(rep.method))), s);
  });
  out.write("unrepresentable.tsv", [&](std::ostream& s) {
    s << "# config_digest=" << c.digest() << "\n# provenance=" << rep.provenance << '\n';
    for (const auto& [index, reason] : rep.unrepresentable) s << corpus.taxonomy().label(index) << '\t' << reason << '\n';
  });
  out.commit();
  std::cout << rep.representable_count() << " of " << corpus.taxonomy().size() << " labels represented\n";
  return 0;
}

int cmd_calibrate(const Options& o, const RunConfig& c) {
  require_projection(c);
  OutputDirectory out(c.out_dir);
  const auto corpus = load_corpus(c);
  const auto defs = definitions_for(c, corpus);
  const auto emb = prepare_embeddings(c, corpus, defs);
  const auto dev = dev_subsample(corpus, c);
  const auto rep = labels_for(o, c, corpus, emb, defs, dev);
  const auto dev_scores = score(dev, emb.documents, rep);
  const auto profile =
      calibrate_thresholds(dev_scores, dev, {c.grid_step, c.tie_rule, dev_set_id(corpus, dev.size(), c.seed)});
  out.write("thresholds.tsv", [&](std::ostream& s) { write_threshold_profile(profile, s, c.digest()); });
  out.write("dev_score_summary.tsv", [&](std::ostream& s) { write_score_summary(dev_scores, s, c.digest()); });
  out.commit();
  std::cout << "calibrated on " << dev.size() << " dev documents\n";
  return 0;
}

int cmd_predict(const Options& o, const RunConfig& c) {
  require_projection(c);
  if (o.thresholds_path.empty()) throw Error(ErrorKind::Config, "predict needs --thresholds");
  OutputDirectory out(c.out_dir);
  const auto corpus = load_corpus(c);
  const auto defs = definitions_for(c, corpus);
  const auto emb = prepare_embeddings(c, corpus, defs);
  const auto dev = dev_subsample(corpus, c);
  const auto rep = labels_for(o, c, corpus, emb, defs, dev);
  const auto profile = read_threshold_profile(o.thresholds_path, corpus.taxonomy());
  const auto test = corpus.split(Split::Test);
  const auto scores = score(test, emb.documents, rep);
  const auto predictions = predict(scores, profile);
  out.write("predictions.tsv", [&](std::ostream& s) { write_predictions(predictions, corpus.taxonomy(), s, c.digest()); });
  out.write("score_summary.tsv", [&](std::ostream& s) { write_score_summary(scores, s, c.digest()); });
  out.commit();
  std::cout << predictions.doc_ids.size() << " test documents predicted\n";
  return 0;
}

int cmd_evaluate(const Options& o, const RunConfig& c) {
  if (o.predictions_path.empty()) throw Error(ErrorKind::Config, "evaluate needs --predictions");
  OutputDirectory out(c.out_dir);
  const auto corpus = load_corpus(c);
  const auto predictions = read_predictions(o.predictions_path, corpus.taxonomy());
  const auto test = corpus.split(Split::Test);
  const auto excluded = excluded_labels(corpus.taxonomy(), nullptr, c.include_neutral);
  const auto report = evaluate(predictions, test, corpus.taxonomy(), excluded);
  out.write("report.json", [&](std::ostream& s) { s << to_json(report, c.digest()).dump(2) << '\n'; });
  out.commit();
  print_report(report);
  return 0;
}

int cmd_curve(const Options& o, const RunConfig& base) {
  if (o.sizes.empty() || o.seeds.empty()) throw Error(ErrorKind::Config, "curve needs --sizes and --seeds");
  std::vector<Method> methods;
  for (const auto& name : o.methods.empty() ? std::vector<std::string>{o.method} : o.methods) {
    const auto m = parse_method(name);
    if (!m || *m == Method::LogregBaseline) throw Error(ErrorKind::Config, "curve method '" + name + "' is not a projection method");
    methods.push_back(*m);
  }
  RunConfig c = base;
  if (c.definitions_path.empty()) c.definitions_path = data_file("definitions/" + std::string(to_string(c.dataset)) + ".tsv");
  for (auto m : methods) {
    c.method = m;
    validate(c);
  }

  OutputDirectory out(c.out_dir);
  const auto corpus = load_corpus(c);
  const auto defs = definitions_for(c, corpus);
  const auto emb = prepare_embeddings(c, corpus, defs);
  std::vector<CurvePoint> points;
  for (auto m : methods) {
    auto run = [&](std::span<const Document> dev) {
      const CalibrationOptions cal{c.grid_step, c.tie_rule, dev_set_id(corpus, dev.size(), 0)};
      return run_projection(corpus, projection_of(m), dev, emb, defs, cal, c.include_neutral).report.macro_f1;
    };
    auto part = dev_size_curve(corpus, o.sizes, o.seeds, to_string(m), run);
    points.insert(points.end(), part.begin(), part.end());
  }
  out.write("curve.tsv", [&](std::ostream& s) { write_curve(points, s); });
  out.write("curve_mean.tsv", [&](std::ostream& s) {
    s << "# config_digest=" << c.digest() << '\n';
    for (const auto& [key, mean] : curve_means(points))
      s << key.first << '\t' << key.second << '\t' << detail::format_double(mean) << '\n';
  });
  out.commit();
  for (const auto& [key, mean] : curve_means(points))
    std::cout << key.first << "\t" << key.second << "\t" << detail::format_double(mean, 4) << '\n';
  return 0;
}

int cmd_run(const RunConfig& c) {
  const auto summary = run_pipeline(c);
  print_report(summary.report);
  if (summary.unembeddable > 0) std::cout << summary.unembeddable << " unembeddable documents scored as no emotion\n";
  for (const auto& row : summary.unseen)
    std::cout << "unseen label " << row.label << ": f1 " << detail::format_double(row.f1, 4) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Few-shot multi-label emotion classification by label embedding similarity"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key=value configuration file");

  Options o;
  auto& c = o.config;
  app.add_option("--dataset", o.dataset, "goemotions | semeval")->check(CLI::IsMember({"goemotions", "semeval"}));
  app.add_option("--train", c.train_file, "training split file");
  app.add_option("--dev", c.dev_file, "development split file");
  app.add_option("--test", c.test_file, "test split file");
  app.add_option("--taxonomy", c.taxonomy_file, "GoEmotions label list (one per line)");
  app.add_option("--corpus", c.corpus_file, "unified corpus export instead of split files");
  app.add_option("--method", o.method, "wordnet_definition | labeled_sentences | word_embedding | logreg_baseline");
  app.add_option("--embeddings", c.embeddings_path, "EMBTSV embedding file");
  app.add_option("--glove", c.glove_path, "GloVe text file");
  app.add_option("--provider", c.provider, "provider tag for the embedding source");
  app.add_option("--definitions", c.definitions_path, "label definitions file");
  app.add_option("--dev-size", c.dev_size, "dev subsample size (0 = whole dev split)");
  app.add_option("--seed", c.seed, "seed for dev subsampling");
  app.add_option("--out", c.out_dir, "output directory")->required();
  app.add_flag("--include-neutral", c.include_neutral, "count neutral in macro averages");
  app.add_option("--tie-rule", o.tie_rule, "largest | smallest")->check(CLI::IsMember({"largest", "smallest"}));
  app.add_option("--grid-step", c.grid_step, "threshold grid step over [-1, 1]");
  app.add_option("--l2", c.logreg.l2, "logistic regression L2 strength");
  app.add_option("--max-epochs", c.logreg.max_epochs, "logistic regression epoch cap");
  app.add_option("--labels", o.labels_path, "label vectors written by build-labels");
  app.add_option("--thresholds", o.thresholds_path, "threshold profile written by calibrate");
  app.add_option("--predictions", o.predictions_path, "predictions written by predict");
  app.add_option("--sizes", o.sizes, "curve dev sizes, ascending")->delimiter(',');
  app.add_option("--seeds", o.seeds, "curve seeds")->delimiter(',');
  app.add_option("--methods", o.methods, "curve methods")->delimiter(',');
  app.add_option("--source-taxonomy", o.source_taxonomy, "transfer source taxonomy: goemotions or a label file");

  auto* ingest = app.add_subcommand("ingest", "parse a dataset and write the unified corpus export");
  auto* embed = app.add_subcommand("embed-glove", "word-average GloVe embeddings as EMBTSV");
  auto* build = app.add_subcommand("build-labels", "label vectors for one projection method");
  auto* calibrate = app.add_subcommand("calibrate", "per-label thresholds on the dev subsample");
  auto* predict_cmd = app.add_subcommand("predict", "apply thresholds to the test split");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "macro precision/recall/F1 of predictions");
  auto* curve = app.add_subcommand("curve", "macro F1 against dev subsample size");
  auto* transfer = app.add_subcommand("transfer", "full run plus the unseen-label report");
  auto* run = app.add_subcommand("run", "full pipeline");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto config = resolve(o);
    if (*ingest) return cmd_ingest(config);
    if (*embed) return cmd_embed_glove(config);
    if (*build) return cmd_build_labels(o, config);
    if (*calibrate) return cmd_calibrate(o, config);
    if (*predict_cmd) return cmd_predict(o, config);
    if (*evaluate_cmd) return cmd_evaluate(o, config);
    if (*curve) return cmd_curve(o, config);
    if (*transfer) {
      config.transfer_source_taxonomy = o.source_taxonomy;
      return cmd_run(config);
    }
    if (*run) return cmd_run(config);
  } catch (const Error& e) {
    std::cerr << "emoshot: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "emoshot: " << e.what() << '\n';
    return 4;
  }
  return 4;
}
