#ifndef EMOSHOT_CORPUS_HPP
#define EMOSHOT_CORPUS_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "detail/io.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace emoshot {

enum class Split { Train, Dev, Test };

inline const char* to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "?";
}

inline std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "dev") return Split::Dev;
  if (s == "test") return Split::Test;
  return std::nullopt;
}

enum class Source { GoEmotions, SemEval };

inline const char* to_string(Source source) {
  return source == Source::GoEmotions ? "goemotions" : "semeval";
}

/// Ordered set of emotion labels. A label's index never changes once constructed.
class EmotionTaxonomy {
 public:
  EmotionTaxonomy() = default;

  EmotionTaxonomy(std::string name, std::vector<std::string> labels)
      : name_(std::move(name)), labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      const auto& label = labels_[i];
      if (label.empty()) throw Error(ErrorKind::Format, "taxonomy '" + name_ + "' has an empty label");
      if (std::any_of(label.begin(), label.end(), [](char c) { return c >= 'A' && c <= 'Z'; }))
        throw Error(ErrorKind::Format, "taxonomy label '" + label + "' is not lowercase");
      if (!index_.emplace(label, i).second)
        throw Error(ErrorKind::Format, "taxonomy '" + name_ + "' repeats label '" + label + "'");
    }
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t index) const { return labels_.at(index); }

  std::optional<std::size_t> index_of(std::string_view label) const {
    const auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const EmotionTaxonomy& other) const {
    return name_ == other.name_ && labels_ == other.labels_;
  }

  /// GoEmotions release order: 27 emotions followed by "neutral" (id 27).
  static EmotionTaxonomy goemotions() {
    return {"goemotions",
            {"admiration", "amusement",  "anger",       "annoyance",      "approval",
             "caring",     "confusion",  "curiosity",   "desire",         "disappointment",
             "disapproval", "disgust",   "embarrassment", "excitement",   "fear",
             "gratitude",  "grief",      "joy",         "love",           "nervousness",
             "optimism",   "pride",      "realization", "relief",         "remorse",
             "sadness",    "surprise",   "neutral"}};
  }

  /// SemEval 2018 E-c column order.
  static EmotionTaxonomy semeval() {
    return {"semeval",
            {"anger", "anticipation", "disgust", "fear", "joy", "love", "optimism", "pessimism",
             "sadness", "surprise", "trust"}};
  }

 private:
  std::string name_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::string_view kNeutralLabel = "neutral";
inline constexpr std::size_t kSemEvalLabelCount = 11;

struct Document {
  std::string id;
  std::string text;
  std::vector<std::size_t> gold;  // ascending, unique taxonomy indices
  Split split = Split::Train;

  bool has_label(std::size_t index) const {
    return std::binary_search(gold.begin(), gold.end(), index);
  }

  bool operator==(const Document&) const = default;
};

/// Immutable multi-label corpus. Document ids are unique; every gold index is valid.
class Corpus {
 public:
  Corpus(EmotionTaxonomy taxonomy, std::vector<Document> documents, Source source)
      : taxonomy_(std::move(taxonomy)), documents_(std::move(documents)), source_(source) {
    std::unordered_set<std::string> seen;
    seen.reserve(documents_.size());
    for (auto& doc : documents_) {
      if (!seen.insert(doc.id).second)
        throw Error(ErrorKind::Format, "duplicate document id '" + doc.id + "'");
      std::sort(doc.gold.begin(), doc.gold.end());
      doc.gold.erase(std::unique(doc.gold.begin(), doc.gold.end()), doc.gold.end());
      for (auto g : doc.gold)
        if (g >= taxonomy_.size())
          throw Error(ErrorKind::Bounds, "document '" + doc.id + "' has label index " +
                                             std::to_string(g) + " outside taxonomy");
    }
  }

  const EmotionTaxonomy& taxonomy() const { return taxonomy_; }
  const std::vector<Document>& documents() const { return documents_; }
  Source source() const { return source_; }

  std::vector<Document> split(Split which) const {
    std::vector<Document> out;
    for (const auto& doc : documents_)
      if (doc.split == which) out.push_back(doc);
    return out;
  }

  std::size_t split_size(Split which) const {
    return static_cast<std::size_t>(std::count_if(
        documents_.begin(), documents_.end(), [which](const Document& d) { return d.split == which; }));
  }

  bool operator==(const Corpus& other) const {
    return taxonomy_ == other.taxonomy_ && documents_ == other.documents_ && source_ == other.source_;
  }

 private:
  EmotionTaxonomy taxonomy_;
  std::vector<Document> documents_;
  Source source_;
};

// ---------------------------------------------------------------------------------------------
// GoEmotions

/// One label per line; the line number (0-based) is the label id.
inline EmotionTaxonomy load_taxonomy(const std::string& path, std::string name = "goemotions") {
  auto in = detail::open_input(path);
  std::vector<std::string> labels;
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    const auto label = detail::trim(line);
    if (label.empty()) {
      // trailing blank lines are tolerated, interior ones are not
      std::string rest;
      while (detail::read_line(in, rest))
        if (!detail::trim(rest).empty())
          throw FileError(ErrorKind::Format, path, line_no, "blank line inside taxonomy");
      break;
    }
    labels.emplace_back(label);
  }
  try {
    return EmotionTaxonomy(std::move(name), std::move(labels));
  } catch (const Error& e) {
    throw Error(ErrorKind::Format, path + ": " + e.what());
  }
}

namespace detail {

inline void parse_goemotions_file(const std::string& path, Split which,
                                  const EmotionTaxonomy& taxonomy, std::vector<Document>& out) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3)
      throw FileError(ErrorKind::Parse, path, line_no,
                      "expected 3 tab-separated columns, found " + std::to_string(fields.size()));
    Document doc;
    doc.text = std::string(fields[0]);
    doc.id = std::string(fields[2]);
    doc.split = which;
    if (doc.id.empty()) throw FileError(ErrorKind::Parse, path, line_no, "empty example id");
    if (!fields[1].empty()) {
      for (auto token : detail::split(fields[1], ',')) {
        const auto id = parse_int<long long>(trim(token));
        if (!id)
          throw FileError(ErrorKind::Parse, path, line_no,
                          "label id '" + std::string(token) + "' is not an integer");
        if (*id < 0 || static_cast<unsigned long long>(*id) >= taxonomy.size())
          throw FileError(ErrorKind::Parse, path, line_no,
                          "label id " + std::to_string(*id) + " out of range for " +
                              std::to_string(taxonomy.size()) + "-label taxonomy");
        doc.gold.push_back(static_cast<std::size_t>(*id));
      }
    }
    out.push_back(std::move(doc));
  }
}

}  // namespace detail

/// Official pre-aggregated GoEmotions release: text, comma-joined label ids, example id.
inline Corpus parse_goemotions(const std::string& train_file, const std::string& dev_file,
                               const std::string& test_file, const std::string& taxonomy_file) {
  auto taxonomy = load_taxonomy(taxonomy_file, "goemotions");
  std::vector<Document> docs;
  detail::parse_goemotions_file(train_file, Split::Train, taxonomy, docs);
  detail::parse_goemotions_file(dev_file, Split::Dev, taxonomy, docs);
  detail::parse_goemotions_file(test_file, Split::Test, taxonomy, docs);
  return Corpus(std::move(taxonomy), std::move(docs), Source::GoEmotions);
}

/// Writes the documents of one split back in GoEmotions TSV form.
inline void write_goemotions(const Corpus& corpus, Split split, const std::string& path) {
  auto out = detail::open_output(path);
  for (const auto& doc : corpus.documents()) {
    if (doc.split != split) continue;
    out << doc.text << '\t';
    for (std::size_t i = 0; i < doc.gold.size(); ++i) out << (i ? "," : "") << doc.gold[i];
    out << '\t' << doc.id << '\n';
  }
}

// ---------------------------------------------------------------------------------------------
// SemEval 2018 E-c

namespace detail {

// Everything after the Tweet column is read as whitespace-separated indicators, so both the
// official tab layout and space-joined indicator columns are accepted.
inline std::vector<std::string_view> semeval_tail(const std::vector<std::string_view>& fields) {
  std::vector<std::string_view> tail;
  for (std::size_t i = 2; i < fields.size(); ++i)
    for (auto tok : split_ws(fields[i])) tail.push_back(tok);
  return tail;
}

inline EmotionTaxonomy parse_semeval_file(const std::string& path, Split which,
                                          std::vector<Document>& out) {
  auto in = open_input(path);
  std::string line;
  if (!read_line(in, line)) throw FileError(ErrorKind::Format, path, 1, "missing header");
  const auto header = split(line, '\t');
  if (header.size() < 2) throw FileError(ErrorKind::Format, path, 1, "header needs ID and Tweet columns");
  const auto header_labels = semeval_tail(header);
  if (header_labels.size() != kSemEvalLabelCount)
    throw FileError(ErrorKind::Format, path, 1,
                    "header lists " + std::to_string(header_labels.size()) + " labels, expected 11");
  std::vector<std::string> labels;
  for (auto l : header_labels) {
    std::string s(l);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
      return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    });
    labels.push_back(std::move(s));
  }
  EmotionTaxonomy taxonomy("semeval", std::move(labels));

  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() < 3)
      throw FileError(ErrorKind::Parse, path, line_no, "expected ID, Tweet and 11 indicator columns");
    const auto indicators = semeval_tail(fields);
    if (indicators.size() != kSemEvalLabelCount)
      throw FileError(ErrorKind::Parse, path, line_no,
                      "found " + std::to_string(indicators.size()) + " indicators, expected 11");
    Document doc;
    doc.id = std::string(fields[0]);
    doc.text = std::string(fields[1]);
    doc.split = which;
    for (std::size_t k = 0; k < indicators.size(); ++k) {
      if (indicators[k] == "1") {
        doc.gold.push_back(k);
      } else if (indicators[k] != "0") {
        throw FileError(ErrorKind::Parse, path, line_no,
                        "indicator '" + std::string(indicators[k]) + "' is not 0 or 1");
      }
    }
    out.push_back(std::move(doc));
  }
  return taxonomy;
}

}  // namespace detail

/// Parses one E-c file; every row is assigned to `split`.
inline Corpus parse_semeval(const std::string& ec_file, Split split) {
  std::vector<Document> docs;
  auto taxonomy = detail::parse_semeval_file(ec_file, split, docs);
  return Corpus(std::move(taxonomy), std::move(docs), Source::SemEval);
}

/// Parses the three official E-c files. Header label order must agree across files.
inline Corpus parse_semeval(const std::string& train_file, const std::string& dev_file,
                            const std::string& test_file) {
  std::vector<Document> docs;
  auto taxonomy = detail::parse_semeval_file(train_file, Split::Train, docs);
  for (auto [file, which] : {std::pair{dev_file, Split::Dev}, std::pair{test_file, Split::Test}}) {
    if (!(detail::parse_semeval_file(file, which, docs) == taxonomy))
      throw Error(ErrorKind::Format, file + ": header label order differs from " + train_file);
  }
  return Corpus(std::move(taxonomy), std::move(docs), Source::SemEval);
}

inline void write_semeval(const Corpus& corpus, Split split, const std::string& path) {
  auto out = detail::open_output(path);
  out << "ID\tTweet";
  for (const auto& label : corpus.taxonomy().labels()) out << '\t' << label;
  out << '\n';
  for (const auto& doc : corpus.documents()) {
    if (doc.split != split) continue;
    out << doc.id << '\t' << doc.text;
    for (std::size_t k = 0; k < corpus.taxonomy().size(); ++k) out << '\t' << (doc.has_label(k) ? 1 : 0);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------------------------
// Unified export: id \t split \t text \t pipe-joined label names

inline void write_corpus_export(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus.documents()) {
    if (doc.text.find_first_of("\t\n") != std::string::npos)
      throw Error(ErrorKind::Format, "document '" + doc.id + "' text contains a tab or newline");
    out << doc.id << '\t' << to_string(doc.split) << '\t' << doc.text << '\t';
    for (std::size_t i = 0; i < doc.gold.size(); ++i)
      out << (i ? "|" : "") << corpus.taxonomy().label(doc.gold[i]);
    out << '\n';
  }
}

inline void write_corpus_export(const Corpus& corpus, const std::string& path) {
  auto out = detail::open_output(path);
  write_corpus_export(corpus, out);
}

inline Corpus read_corpus_export(const std::string& path, EmotionTaxonomy taxonomy, Source source) {
  auto in = detail::open_input(path);
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 4)
      throw FileError(ErrorKind::Parse, path, line_no, "expected 4 tab-separated columns");
    Document doc;
    doc.id = std::string(fields[0]);
    const auto which = parse_split(fields[1]);
    if (!which) throw FileError(ErrorKind::Parse, path, line_no, "unknown split '" + std::string(fields[1]) + "'");
    doc.split = *which;
    doc.text = std::string(fields[2]);
    if (!fields[3].empty()) {
      for (auto name : detail::split(fields[3], '|')) {
        const auto idx = taxonomy.index_of(name);
        if (!idx) throw FileError(ErrorKind::Parse, path, line_no, "unknown label '" + std::string(name) + "'");
        doc.gold.push_back(*idx);
      }
    }
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(taxonomy), std::move(docs), source);
}

// ---------------------------------------------------------------------------------------------

/// Uniform sample of n dev documents without replacement, returned in corpus order.
inline std::vector<Document> subsample_dev(const Corpus& corpus, std::size_t n, std::uint64_t seed) {
  auto dev = corpus.split(Split::Dev);
  if (n > dev.size())
    throw Error(ErrorKind::Bounds, "requested " + std::to_string(n) + " dev documents but the dev split has " +
                                       std::to_string(dev.size()));
  std::vector<Document> out;
  out.reserve(n);
  for (auto i : sample_without_replacement(dev.size(), n, seed)) out.push_back(std::move(dev[i]));
  return out;
}

/// Gold-positive count per label, optionally restricted to one split.
inline std::vector<std::size_t> label_frequencies(const Corpus& corpus, std::optional<Split> split = {}) {
  std::vector<std::size_t> counts(corpus.taxonomy().size(), 0);
  for (const auto& doc : corpus.documents())
    if (!split || doc.split == *split)
      for (auto g : doc.gold) ++counts[g];
  return counts;
}

struct TaxonomyOverlap {
  std::vector<std::pair<std::size_t, std::size_t>> shared;  // (source index, target index)
  std::vector<std::size_t> novel_in_target;
};

inline TaxonomyOverlap taxonomy_overlap(const EmotionTaxonomy& source, const EmotionTaxonomy& target) {
  TaxonomyOverlap overlap;
  for (std::size_t t = 0; t < target.size(); ++t) {
    if (const auto s = source.index_of(target.label(t)))
      overlap.shared.emplace_back(*s, t);
    else
      overlap.novel_in_target.push_back(t);
  }
  return overlap;
}

}  // namespace emoshot

#endif  // EMOSHOT_CORPUS_HPP
