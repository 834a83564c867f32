#ifndef EMOSHOT_CLASSIFIER_HPP
#define EMOSHOT_CLASSIFIER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpus.hpp"
#include "detail/io.hpp"
#include "embeddings.hpp"
#include "error.hpp"
#include "labelspace.hpp"

namespace emoshot {

/// Cosine scores of documents (rows) against labels (columns). A row is masked when the
/// document has no embedding; a column is masked when the label has no representation.
class ScoreMatrix {
 public:
  ScoreMatrix(std::vector<std::string> doc_ids, EmotionTaxonomy taxonomy, std::vector<char> row_present,
              std::vector<char> label_present)
      : doc_ids_(std::move(doc_ids)),
        taxonomy_(std::move(taxonomy)),
        row_present_(std::move(row_present)),
        label_present_(std::move(label_present)),
        scores_(doc_ids_.size() * taxonomy_.size(), 0.0) {}

  std::size_t rows() const { return doc_ids_.size(); }
  std::size_t cols() const { return taxonomy_.size(); }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const EmotionTaxonomy& taxonomy() const { return taxonomy_; }

  bool row_present(std::size_t i) const { return row_present_[i] != 0; }
  bool label_present(std::size_t e) const { return label_present_[e] != 0; }

  std::optional<double> at(std::size_t i, std::size_t e) const {
    if (!row_present(i) || !label_present(e)) return std::nullopt;
    return scores_[i * cols() + e];
  }

  void set(std::size_t i, std::size_t e, double value) { scores_[i * cols() + e] = value; }

  std::size_t masked_rows() const {
    return static_cast<std::size_t>(std::count(row_present_.begin(), row_present_.end(), 0));
  }

 private:
  std::vector<std::string> doc_ids_;
  EmotionTaxonomy taxonomy_;
  std::vector<char> row_present_;
  std::vector<char> label_present_;
  std::vector<double> scores_;
};

/// Scores each listed document against every representable label. Documents absent from
/// doc_embeddings, or with a zero vector, get a masked row.
inline ScoreMatrix score(std::span<const std::string> doc_ids, const EmbeddingTable& doc_embeddings,
                         const LabelRepresentation& labels) {
  if (doc_embeddings.dim() != labels.dim)
    throw Error(ErrorKind::Shape, "document embeddings have dimension " + std::to_string(doc_embeddings.dim()) +
                                      " but label vectors have dimension " + std::to_string(labels.dim));
  if (labels.representable_count() == 0) throw Error(ErrorKind::Config, "no representable label to score against");

  const auto& taxonomy = labels.taxonomy;
  std::vector<char> label_present(taxonomy.size());
  std::vector<double> label_norms(taxonomy.size(), 0.0);
  for (std::size_t e = 0; e < taxonomy.size(); ++e) {
    label_present[e] = labels.representable(e);
    if (!label_present[e]) continue;
    label_norms[e] = norm(*labels.vectors[e]);
    if (label_norms[e] == 0.0) throw Error(ErrorKind::Domain, "label '" + taxonomy.label(e) + "' has a zero vector");
  }

  std::vector<std::optional<std::span<const double>>> rows;
  std::vector<char> row_present;
  rows.reserve(doc_ids.size());
  for (const auto& id : doc_ids) {
    auto v = doc_embeddings.find(id);
    if (v && norm(*v) == 0.0) v.reset();
    row_present.push_back(v.has_value());
    rows.push_back(v);
  }

  ScoreMatrix matrix({doc_ids.begin(), doc_ids.end()}, taxonomy, std::move(row_present), std::move(label_present));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i]) continue;
    for (std::size_t e = 0; e < taxonomy.size(); ++e)
      if (matrix.label_present(e)) matrix.set(i, e, cosine(*rows[i], *labels.vectors[e]).value());
  }
  return matrix;
}

inline ScoreMatrix score(std::span<const Document> docs, const EmbeddingTable& doc_embeddings,
                         const LabelRepresentation& labels) {
  std::vector<std::string> ids;
  ids.reserve(docs.size());
  for (const auto& d : docs) ids.push_back(d.id);
  return score(ids, doc_embeddings, labels);
}

// ---------------------------------------------------------------------------------------------
// Threshold calibration

enum class TieRule { Largest, Smallest };

inline const char* to_string(TieRule rule) { return rule == TieRule::Largest ? "largest" : "smallest"; }

inline std::optional<TieRule> parse_tie_rule(std::string_view s) {
  if (s == "largest") return TieRule::Largest;
  if (s == "smallest") return TieRule::Smallest;
  return std::nullopt;
}

struct CalibrationOptions {
  double grid_step = 0.01;
  TieRule tie_rule = TieRule::Largest;
  std::string dev_set_id = "dev";
};

/// Number of grid intervals over [-1, 1]; the step must divide 2.
inline std::size_t grid_intervals(double step) {
  if (!(step > 0.0) || step > 2.0) throw Error(ErrorKind::Config, "grid step must be in (0, 2]");
  const double n = std::round(2.0 / step);
  if (std::abs(n * step - 2.0) > 1e-9) throw Error(ErrorKind::Config, "grid step must divide 2 evenly");
  return static_cast<std::size_t>(n);
}

/// k-th grid threshold, k in [0, n]. Computed as (2k - n) / n so that e.g. k=169, n=200 gives the
/// double nearest 0.69.
inline double grid_threshold(std::size_t k, std::size_t n) {
  return static_cast<double>(2 * static_cast<long long>(k) - static_cast<long long>(n)) / static_cast<double>(n);
}

/// Per-label decision thresholds with the dev F1 each achieved.
struct ThresholdProfile {
  EmotionTaxonomy taxonomy;
  std::vector<std::optional<double>> thresholds;  // nullopt for unrepresentable labels
  std::vector<double> dev_f1;
  std::vector<char> no_dev_positives;  // threshold forced to +1.0
  double grid_step = 0.01;
  TieRule tie_rule = TieRule::Largest;
  std::string dev_set_id;
};

namespace detail {

struct LabelSweep {
  std::vector<double> sorted_scores;      // ascending, present rows only
  std::vector<std::size_t> suffix_pos;    // positives among sorted_scores[j..]
  std::size_t total_positives = 0;        // includes positives on masked rows
};

inline LabelSweep build_sweep(const ScoreMatrix& m, std::span<const std::vector<std::size_t>> gold, std::size_t e) {
  std::vector<std::pair<double, bool>> pairs;
  LabelSweep sweep;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const bool positive = std::binary_search(gold[i].begin(), gold[i].end(), e);
    sweep.total_positives += positive;
    if (const auto s = m.at(i, e)) pairs.emplace_back(*s, positive);
  }
  std::sort(pairs.begin(), pairs.end());
  sweep.sorted_scores.reserve(pairs.size());
  sweep.suffix_pos.assign(pairs.size() + 1, 0);
  for (const auto& p : pairs) sweep.sorted_scores.push_back(p.first);
  for (std::size_t j = pairs.size(); j-- > 0;) sweep.suffix_pos[j] = sweep.suffix_pos[j + 1] + pairs[j].second;
  return sweep;
}

}  // namespace detail

/// For each representable label, picks the grid threshold maximizing dev F1 of the rule
/// "score > t". Ties go to the largest (or smallest) maximizer. Labels with no dev positive
/// get t = +1.0 and are flagged. dev_gold[i] must be the sorted gold set of row i.
inline ThresholdProfile calibrate_thresholds(const ScoreMatrix& dev_scores,
                                             std::span<const std::vector<std::size_t>> dev_gold,
                                             const CalibrationOptions& options = {}) {
  if (dev_gold.size() != dev_scores.rows())
    throw Error(ErrorKind::Alignment, "dev gold has " + std::to_string(dev_gold.size()) + " rows, scores have " +
                                          std::to_string(dev_scores.rows()));
  const std::size_t n = grid_intervals(options.grid_step);
  const auto& taxonomy = dev_scores.taxonomy();
  ThresholdProfile profile{taxonomy,
                           std::vector<std::optional<double>>(taxonomy.size()),
                           std::vector<double>(taxonomy.size(), 0.0),
                           std::vector<char>(taxonomy.size(), 0),
                           options.grid_step,
                           options.tie_rule,
                           options.dev_set_id};

  for (std::size_t e = 0; e < taxonomy.size(); ++e) {
    if (!dev_scores.label_present(e)) continue;
    const auto sweep = detail::build_sweep(dev_scores, dev_gold, e);
    if (sweep.total_positives == 0) {
      profile.thresholds[e] = 1.0;
      profile.no_dev_positives[e] = 1;
      continue;
    }
    // F1 = 2tp / (2tp + fp + fn) = 2tp / (predicted + P), compared as exact fractions.
    std::size_t best_num = 0, best_den = 1, best_k = 0;
    bool have_best = false;
    for (std::size_t step = 0; step <= n; ++step) {
      const std::size_t k = options.tie_rule == TieRule::Largest ? n - step : step;
      const double t = grid_threshold(k, n);
      const auto first_above = static_cast<std::size_t>(
          std::upper_bound(sweep.sorted_scores.begin(), sweep.sorted_scores.end(), t) - sweep.sorted_scores.begin());
      const std::size_t predicted = sweep.sorted_scores.size() - first_above;
      const std::size_t tp = sweep.suffix_pos[first_above];
      const std::size_t num = 2 * tp;
      const std::size_t den = predicted + sweep.total_positives;
      if (!have_best || static_cast<unsigned __int128>(num) * best_den > static_cast<unsigned __int128>(best_num) * den) {
        best_num = num;
        best_den = den;
        best_k = k;
        have_best = true;
      }
    }
    profile.thresholds[e] = grid_threshold(best_k, n);
    profile.dev_f1[e] = best_num == 0 ? 0.0 : static_cast<double>(best_num) / static_cast<double>(best_den);
  }
  return profile;
}

inline std::vector<std::vector<std::size_t>> gold_sets(std::span<const Document> docs) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(d.gold);
  return out;
}

/// Calibration against documents; their ids must match the score rows in order.
inline ThresholdProfile calibrate_thresholds(const ScoreMatrix& dev_scores, std::span<const Document> dev_docs,
                                             const CalibrationOptions& options = {}) {
  if (dev_docs.size() != dev_scores.rows())
    throw Error(ErrorKind::Alignment, "dev documents and score rows differ in count");
  for (std::size_t i = 0; i < dev_docs.size(); ++i)
    if (dev_docs[i].id != dev_scores.doc_ids()[i])
      throw Error(ErrorKind::Alignment, "score row " + std::to_string(i) + " is '" + dev_scores.doc_ids()[i] +
                                            "' but dev document is '" + dev_docs[i].id + "'");
  const auto gold = gold_sets(dev_docs);
  return calibrate_thresholds(dev_scores, gold, options);
}

// ---------------------------------------------------------------------------------------------
// Prediction

struct PredictionSet {
  std::vector<std::string> doc_ids;
  std::vector<std::vector<std::size_t>> labels;  // ascending label indices per document
};

/// Label e fires for document i iff score(i, e) > t_e. Masked cells never fire.
inline PredictionSet predict(const ScoreMatrix& scores, const ThresholdProfile& profile) {
  if (!(scores.taxonomy() == profile.taxonomy))
    throw Error(ErrorKind::Alignment, "score matrix taxonomy '" + scores.taxonomy().name() +
                                          "' does not match threshold taxonomy '" + profile.taxonomy.name() + "'");
  PredictionSet out{scores.doc_ids(), std::vector<std::vector<std::size_t>>(scores.rows())};
  for (std::size_t i = 0; i < scores.rows(); ++i)
    for (std::size_t e = 0; e < scores.cols(); ++e) {
      const auto s = scores.at(i, e);
      if (s && profile.thresholds[e] && *s > *profile.thresholds[e]) out.labels[i].push_back(e);
    }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Serialization

inline void write_threshold_profile(const ThresholdProfile& p, std::ostream& out, std::string_view config_digest = {}) {
  out << "# emoshot thresholds v1\n";
  out << "# taxonomy=" << p.taxonomy.name() << '\n';
  out << "# grid_step=" << detail::format_double(p.grid_step, 9) << '\n';
  out << "# tie_rule=" << to_string(p.tie_rule) << '\n';
  out << "# dev_set=" << p.dev_set_id << '\n';
  if (!config_digest.empty()) out << "# config_digest=" << config_digest << '\n';
  out << "# no_dev_positives=";
  bool first = true;
  for (std::size_t e = 0; e < p.taxonomy.size(); ++e)
    if (p.no_dev_positives[e]) {
      out << (first ? "" : ",") << p.taxonomy.label(e);
      first = false;
    }
  out << '\n';
  for (std::size_t e = 0; e < p.taxonomy.size(); ++e)
    if (p.thresholds[e])
      out << p.taxonomy.label(e) << '\t' << detail::format_double(*p.thresholds[e], 9) << '\t'
          << detail::format_double(p.dev_f1[e], 9) << '\n';
}

inline ThresholdProfile read_threshold_profile(const std::string& path, const EmotionTaxonomy& taxonomy) {
  auto in = detail::open_input(path);
  ThresholdProfile p{taxonomy,
                     std::vector<std::optional<double>>(taxonomy.size()),
                     std::vector<double>(taxonomy.size(), 0.0),
                     std::vector<char>(taxonomy.size(), 0),
                     0.01,
                     TieRule::Largest,
                     ""};
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = detail::trim(std::string_view(line).substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = body.substr(0, eq);
      const auto value = body.substr(eq + 1);
      if (key == "taxonomy" && value != taxonomy.name())
        throw FileError(ErrorKind::Alignment, path, line_no, "profile is for taxonomy '" + std::string(value) + "'");
      if (key == "grid_step") {
        if (auto v = detail::parse_double(value)) p.grid_step = *v;
      } else if (key == "tie_rule") {
        if (auto r = parse_tie_rule(value)) p.tie_rule = *r;
      } else if (key == "dev_set") {
        p.dev_set_id = std::string(value);
      } else if (key == "no_dev_positives" && !value.empty()) {
        for (auto name : detail::split(value, ','))
          if (auto idx = taxonomy.index_of(name)) p.no_dev_positives[*idx] = 1;
      }
      continue;
    }
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 3) throw FileError(ErrorKind::Format, path, line_no, "expected '<label>\\t<threshold>\\t<dev_f1>'");
    const auto idx = taxonomy.index_of(fields[0]);
    const auto t = detail::parse_double(fields[1]);
    const auto f = detail::parse_double(fields[2]);
    if (!idx) throw FileError(ErrorKind::Format, path, line_no, "unknown label '" + std::string(fields[0]) + "'");
    if (!t || !f || *t < -1.0 || *t > 1.0 || *f < 0.0 || *f > 1.0)
      throw FileError(ErrorKind::Format, path, line_no, "threshold or dev F1 out of range");
    p.thresholds[*idx] = *t;
    p.dev_f1[*idx] = *f;
  }
  return p;
}

}  // namespace emoshot

#endif  // EMOSHOT_CLASSIFIER_HPP
