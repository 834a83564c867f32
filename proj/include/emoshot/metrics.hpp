#ifndef EMOSHOT_METRICS_HPP
#define EMOSHOT_METRICS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "classifier.hpp"
#include "corpus.hpp"
#include "error.hpp"

namespace emoshot {

struct ClassPRF {
  std::string label;
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::size_t support = 0;
};

/// Precision, recall and F1 from counts; each undefined ratio is 0.
inline ClassPRF class_prf(std::string label, std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassPRF c{std::move(label), tp, fp, fn, 0.0, 0.0, 0.0, tp + fn};
  if (tp + fp > 0) c.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) c.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (c.precision + c.recall > 0) c.f1 = 2.0 * c.precision * c.recall / (c.precision + c.recall);
  return c;
}

struct ExcludedLabel {
  std::size_t index;
  std::string reason;
};

struct EvaluationReport {
  std::string taxonomy;
  std::vector<ClassPRF> per_class;  // included labels, taxonomy order
  double macro_p = 0.0, macro_r = 0.0, macro_f1 = 0.0;
  std::vector<std::pair<std::string, std::string>> excluded_labels;  // (label, reason)
  std::size_t doc_count = 0;

  const ClassPRF* find(std::string_view label) const {
    for (const auto& c : per_class)
      if (c.label == label) return &c;
    return nullptr;
  }
};

/// Per-class counts over documents; macro = unweighted mean over labels not in `excluded`.
/// Documents are matched by id, so the two sides may be in any order.
inline EvaluationReport evaluate(const PredictionSet& predictions, std::span<const Document> gold,
                                 const EmotionTaxonomy& taxonomy, std::span<const ExcludedLabel> excluded = {}) {
  if (predictions.doc_ids.size() != gold.size() || predictions.labels.size() != gold.size())
    throw Error(ErrorKind::Alignment, std::to_string(predictions.doc_ids.size()) + " predictions for " +
                                          std::to_string(gold.size()) + " gold documents");
  std::unordered_map<std::string, std::size_t> row_of;
  row_of.reserve(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (!row_of.emplace(gold[i].id, i).second)
      throw Error(ErrorKind::Alignment, "gold document '" + gold[i].id + "' appears twice");

  const std::size_t L = taxonomy.size();
  std::vector<std::size_t> tp(L, 0), fp(L, 0), fn(L, 0);
  std::vector<char> matched(gold.size(), 0);
  for (std::size_t p = 0; p < predictions.doc_ids.size(); ++p) {
    const auto it = row_of.find(predictions.doc_ids[p]);
    if (it == row_of.end() || matched[it->second])
      throw Error(ErrorKind::Alignment, "prediction for unknown or repeated document '" + predictions.doc_ids[p] + "'");
    matched[it->second] = 1;
    auto pred = predictions.labels[p];
    std::sort(pred.begin(), pred.end());
    const auto& g = gold[it->second].gold;
    for (auto e : pred) {
      if (e >= L) throw Error(ErrorKind::Bounds, "predicted label index " + std::to_string(e) + " outside taxonomy");
      (std::binary_search(g.begin(), g.end(), e) ? tp : fp)[e]++;
    }
    for (auto e : g)
      if (!std::binary_search(pred.begin(), pred.end(), e)) ++fn[e];
  }

  std::vector<char> skip(L, 0);
  EvaluationReport report;
  report.taxonomy = taxonomy.name();
  report.doc_count = gold.size();
  for (const auto& x : excluded) {
    if (x.index >= L || skip[x.index]) continue;
    skip[x.index] = 1;
    report.excluded_labels.emplace_back(taxonomy.label(x.index), x.reason);
  }
  for (std::size_t e = 0; e < L; ++e) {
    if (skip[e]) continue;
    report.per_class.push_back(class_prf(taxonomy.label(e), tp[e], fp[e], fn[e]));
  }
  if (!report.per_class.empty()) {
    for (const auto& c : report.per_class) {
      report.macro_p += c.precision;
      report.macro_r += c.recall;
      report.macro_f1 += c.f1;
    }
    const auto n = static_cast<double>(report.per_class.size());
    report.macro_p /= n;
    report.macro_r /= n;
    report.macro_f1 /= n;
  }
  return report;
}

inline nlohmann::ordered_json to_json(const EvaluationReport& r, std::string_view config_digest = {}) {
  nlohmann::ordered_json j;
  j["taxonomy"] = r.taxonomy;
  if (!config_digest.empty()) j["config_digest"] = std::string(config_digest);
  j["documents"] = r.doc_count;
  j["macro"] = {{"precision", r.macro_p}, {"recall", r.macro_r}, {"f1", r.macro_f1}};
  auto rows = nlohmann::ordered_json::array();
  for (const auto& c : r.per_class)
    rows.push_back({{"label", c.label},
                    {"support", c.support},
                    {"tp", c.tp},
                    {"fp", c.fp},
                    {"fn", c.fn},
                    {"precision", c.precision},
                    {"recall", c.recall},
                    {"f1", c.f1}});
  j["per_class"] = std::move(rows);
  auto excluded = nlohmann::ordered_json::array();
  for (const auto& [label, reason] : r.excluded_labels) excluded.push_back({{"label", label}, {"reason", reason}});
  j["excluded"] = std::move(excluded);
  return j;
}

// ---------------------------------------------------------------------------------------------
// Dev-size curve

struct CurvePoint {
  std::string method;
  std::size_t dev_size = 0;
  std::uint64_t seed = 0;
  double macro_f1 = 0.0;
};

/// For every (size, seed): draw a dev subsample and hand it to `pipeline`, which rebuilds
/// whatever depends on the dev set and returns the test-set macro F1.
template <typename Pipeline>
std::vector<CurvePoint> dev_size_curve(const Corpus& corpus, std::span<const std::size_t> sizes,
                                       std::span<const std::uint64_t> seeds, const std::string& method,
                                       Pipeline&& pipeline) {
  if (!std::is_sorted(sizes.begin(), sizes.end()))
    throw Error(ErrorKind::Config, "curve sizes must be ascending");
  const auto dev_total = corpus.split_size(Split::Dev);
  for (auto size : sizes) {
    if (size == 0) throw Error(ErrorKind::Config, "curve sizes must be positive");
    if (size > dev_total)
      throw Error(ErrorKind::Bounds, "curve size " + std::to_string(size) + " exceeds dev split of " +
                                         std::to_string(dev_total));
  }
  std::vector<CurvePoint> points;
  for (auto size : sizes)
    for (auto seed : seeds) {
      const auto dev = subsample_dev(corpus, size, seed);
      points.push_back({method, size, seed, static_cast<double>(pipeline(std::span<const Document>(dev)))});
    }
  return points;
}

/// Mean macro F1 per (method, size).
inline std::map<std::pair<std::string, std::size_t>, double> curve_means(std::span<const CurvePoint> points) {
  std::map<std::pair<std::string, std::size_t>, std::pair<double, std::size_t>> acc;
  for (const auto& p : points) {
    auto& a = acc[{p.method, p.dev_size}];
    a.first += p.macro_f1;
    ++a.second;
  }
  std::map<std::pair<std::string, std::size_t>, double> out;
  for (const auto& [key, a] : acc) out[key] = a.first / static_cast<double>(a.second);
  return out;
}

inline void write_curve(std::span<const CurvePoint> points, std::ostream& out) {
  for (const auto& p : points)
    out << p.method << '\t' << p.dev_size << '\t' << p.seed << '\t' << detail::format_double(p.macro_f1, 9) << '\n';
}

}  // namespace emoshot

#endif  // EMOSHOT_METRICS_HPP
