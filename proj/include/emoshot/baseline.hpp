#ifndef EMOSHOT_BASELINE_HPP
#define EMOSHOT_BASELINE_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "classifier.hpp"
#include "corpus.hpp"
#include "detail/io.hpp"
#include "error.hpp"
#include "text.hpp"

namespace emoshot {

// ---------------------------------------------------------------------------------------------
// Class weights

enum class WeightScheme { LinearBalanced, SqrtNegPos };

inline const char* to_string(WeightScheme s) {
  return s == WeightScheme::LinearBalanced ? "linear_balanced" : "sqrt_neg_pos";
}

struct ClassWeights {
  EmotionTaxonomy taxonomy;
  WeightScheme scheme{};
  std::vector<std::optional<double>> weights;  // nullopt: label has no positive training example
};

/// W_e = N / (|E| * N_e) from raw counts.
inline double linear_balanced_weight(std::size_t total, std::size_t labels, std::size_t positives) {
  return static_cast<double>(total) / (static_cast<double>(labels) * static_cast<double>(positives));
}

/// W_e = sqrt(neg_e / pos_e) from raw counts.
inline double sqrt_neg_pos_weight(std::size_t negatives, std::size_t positives) {
  return std::sqrt(static_cast<double>(negatives) / static_cast<double>(positives));
}

inline ClassWeights class_weights_linear(const Corpus& corpus) {
  const auto counts = label_frequencies(corpus, Split::Train);
  const auto total = corpus.split_size(Split::Train);
  ClassWeights w{corpus.taxonomy(), WeightScheme::LinearBalanced, std::vector<std::optional<double>>(counts.size())};
  for (std::size_t e = 0; e < counts.size(); ++e)
    if (counts[e] > 0) w.weights[e] = linear_balanced_weight(total, counts.size(), counts[e]);
  return w;
}

inline ClassWeights class_weights_sqrt(const Corpus& corpus) {
  const auto counts = label_frequencies(corpus, Split::Train);
  const auto total = corpus.split_size(Split::Train);
  ClassWeights w{corpus.taxonomy(), WeightScheme::SqrtNegPos, std::vector<std::optional<double>>(counts.size())};
  for (std::size_t e = 0; e < counts.size(); ++e)
    if (counts[e] > 0) w.weights[e] = sqrt_neg_pos_weight(total - counts[e], counts[e]);
  return w;
}

// ---------------------------------------------------------------------------------------------
// Bag of n-grams

using SparseVector = std::vector<std::pair<std::size_t, double>>;  // ascending feature index

struct NgramFeatureSpace {
  std::size_t n_max = 2;
  std::size_t min_frequency = 3;
  std::vector<std::string> ngrams;  // feature index -> ngram, lexicographic
  std::unordered_map<std::string, std::size_t> index;

  std::size_t size() const { return ngrams.size(); }

  std::string vocabulary_hash() const {
    detail::Fnv1a h;
    for (const auto& g : ngrams) {
      h.update(g);
      h.update("\n");
    }
    return h.hex();
  }
};

/// Unigrams and bigrams (space-joined) of the lowercase, punctuation-free token stream.
inline std::vector<std::string> extract_ngrams(std::string_view text) {
  const auto tokens = tokenize(text, false);
  std::vector<std::string> out(tokens.begin(), tokens.end());
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) out.push_back(tokens[i] + " " + tokens[i + 1]);
  return out;
}

/// Vocabulary of n-grams occurring at least min_frequency times over the training texts.
inline NgramFeatureSpace featurize(std::span<const std::string> train_texts, std::size_t min_frequency = 3) {
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& t : train_texts)
    for (auto& g : extract_ngrams(t)) ++freq[std::move(g)];
  NgramFeatureSpace space;
  space.min_frequency = min_frequency;
  for (auto& [g, c] : freq)
    if (c >= min_frequency) space.ngrams.push_back(g);
  std::sort(space.ngrams.begin(), space.ngrams.end());
  for (std::size_t i = 0; i < space.ngrams.size(); ++i) space.index.emplace(space.ngrams[i], i);
  return space;
}

/// Count vector over the frozen vocabulary; unseen n-grams are ignored.
inline SparseVector vectorize(std::string_view text, const NgramFeatureSpace& space) {
  std::map<std::size_t, double> counts;
  for (const auto& g : extract_ngrams(text))
    if (const auto it = space.index.find(g); it != space.index.end()) counts[it->second] += 1.0;
  return {counts.begin(), counts.end()};
}

// ---------------------------------------------------------------------------------------------
// One-vs-rest weighted logistic regression

struct LogRegOptions {
  double l2 = 1e-4;
  std::size_t max_epochs = 2000;
  double tolerance = 1e-8;  // stop when relative loss change falls below this
};

struct BinaryModel {
  std::vector<double> weights;
  double bias = 0.0;
  double step = 0.0;
  std::vector<double> loss_history;  // loss before the first update, then after each epoch
};

struct LinearModel {
  EmotionTaxonomy taxonomy;
  WeightScheme scheme{};
  LogRegOptions options;
  std::size_t feature_count = 0;
  std::string vocabulary_hash;
  std::vector<std::optional<BinaryModel>> per_label;  // nullopt: label excluded from training
};

namespace detail {

inline double sparse_dot(const SparseVector& x, std::span<const double> w) {
  double s = 0.0;
  for (const auto& [j, v] : x) s += w[j] * v;
  return s;
}

/// log(1 + exp(-m)) without overflow.
inline double log_loss_margin(double m) { return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)); }

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

/// Mean per-example weighted logistic loss plus (l2/2)|w|^2. targets are 0/1. When
/// sample_weights is empty every example has weight 1.
inline double logistic_loss(std::span<const SparseVector> features, std::span<const char> targets,
                            std::span<const double> sample_weights, std::span<const double> w, double bias, double l2) {
  double sum = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double z = detail::sparse_dot(features[i], w) + bias;
    const double loss = detail::log_loss_margin(targets[i] ? z : -z);
    sum += sample_weights.empty() ? loss : sample_weights[i] * loss;
  }
  double reg = 0.0;
  for (double x : w) reg += x * x;
  return sum / static_cast<double>(features.size()) + 0.5 * l2 * reg;
}

/// Full-batch gradient descent for one binary problem. Positive examples carry weight
/// positive_weight, negatives weight 1. The fixed step is 1/L for an upper bound L on the
/// loss curvature, so the loss never increases.
inline BinaryModel train_binary(std::span<const SparseVector> features, std::span<const char> targets,
                                double positive_weight, std::size_t feature_count, const LogRegOptions& options) {
  const std::size_t n = features.size();
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = targets[i] ? positive_weight : 1.0;

  // Curvature bound: sigma' <= 1/4 times the largest eigenvalue of X^T C X / n (bias column
  // included), bounded by both max_i c_i |x_i|^2 and the Gershgorin row-sum bound.
  double max_row = 0.0;
  std::vector<double> col_bound(feature_count + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 1.0, row_sum = 1.0;
    for (const auto& [j, v] : features[i]) {
      sq += v * v;
      row_sum += std::abs(v);
    }
    max_row = std::max(max_row, c[i] * sq);
    for (const auto& [j, v] : features[i]) col_bound[j] += c[i] * std::abs(v) * row_sum;
    col_bound[feature_count] += c[i] * row_sum;
  }
  const double gershgorin = *std::max_element(col_bound.begin(), col_bound.end()) / static_cast<double>(n);
  const double lipschitz = 0.25 * std::min(max_row, gershgorin) + options.l2;

  BinaryModel model;
  model.weights.assign(feature_count, 0.0);
  model.step = 1.0 / lipschitz;

  std::vector<double> grad(feature_count);
  double loss = logistic_loss(features, targets, c, model.weights, model.bias, options.l2);
  model.loss_history.push_back(loss);
  for (std::size_t epoch = 0; epoch < options.max_epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = detail::sparse_dot(features[i], model.weights) + model.bias;
      const double r = c[i] * (detail::sigmoid(z) - (targets[i] ? 1.0 : 0.0));
      for (const auto& [j, v] : features[i]) grad[j] += r * v;
      grad_bias += r;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < feature_count; ++j)
      model.weights[j] -= model.step * (grad[j] * inv_n + options.l2 * model.weights[j]);
    model.bias -= model.step * grad_bias * inv_n;

    const double next = logistic_loss(features, targets, c, model.weights, model.bias, options.l2);
    if (!std::isfinite(next))
      throw Error(ErrorKind::Training, "non-finite loss at epoch " + std::to_string(epoch + 1) +
                                           " (step " + detail::format_double(model.step) + ")");
    model.loss_history.push_back(next);
    const bool converged = std::abs(loss - next) <= options.tolerance * std::max(std::abs(loss), 1e-300);
    loss = next;
    if (converged) break;
  }
  return model;
}

/// One weighted binary classifier per label with a weight; gold[i] is the sorted label set of
/// features[i].
inline LinearModel train_logreg(std::span<const SparseVector> features, std::span<const std::vector<std::size_t>> gold,
                                const ClassWeights& weights, const NgramFeatureSpace& space,
                                const LogRegOptions& options = {}) {
  if (features.size() != gold.size())
    throw Error(ErrorKind::Alignment, "feature rows and gold sets differ in count");
  if (features.empty()) throw Error(ErrorKind::Training, "no training documents");
  LinearModel model{weights.taxonomy, weights.scheme, options, space.size(), space.vocabulary_hash(),
                    std::vector<std::optional<BinaryModel>>(weights.taxonomy.size())};
  std::vector<char> targets(features.size());
  for (std::size_t e = 0; e < weights.taxonomy.size(); ++e) {
    if (!weights.weights[e]) continue;
    for (std::size_t i = 0; i < gold.size(); ++i)
      targets[i] = std::binary_search(gold[i].begin(), gold[i].end(), e);
    model.per_label[e] = train_binary(features, targets, *weights.weights[e], space.size(), options);
  }
  return model;
}

/// Label e fires iff sigmoid(w_e . x + b_e) > 0.5.
inline PredictionSet predict_baseline(const LinearModel& model, std::span<const std::string> doc_ids,
                                      std::span<const SparseVector> features) {
  if (doc_ids.size() != features.size()) throw Error(ErrorKind::Alignment, "document ids and feature rows differ in count");
  PredictionSet out{{doc_ids.begin(), doc_ids.end()}, std::vector<std::vector<std::size_t>>(features.size())};
  for (std::size_t i = 0; i < features.size(); ++i)
    for (std::size_t e = 0; e < model.per_label.size(); ++e) {
      const auto& m = model.per_label[e];
      if (m && detail::sigmoid(detail::sparse_dot(features[i], m->weights) + m->bias) > 0.5) out.labels[i].push_back(e);
    }
  return out;
}

inline void write_linear_model(const LinearModel& model, std::ostream& out, std::string_view config_digest = {}) {
  out << "# emoshot logreg v1\n";
  out << "# taxonomy=" << model.taxonomy.name() << '\n';
  out << "# scheme=" << to_string(model.scheme) << '\n';
  out << "# l2=" << detail::format_double(model.options.l2) << '\n';
  out << "# max_epochs=" << model.options.max_epochs << '\n';
  out << "# tolerance=" << detail::format_double(model.options.tolerance) << '\n';
  out << "# features=" << model.feature_count << '\n';
  out << "# vocabulary_hash=" << model.vocabulary_hash << '\n';
  if (!config_digest.empty()) out << "# config_digest=" << config_digest << '\n';
  for (std::size_t e = 0; e < model.per_label.size(); ++e) {
    out << model.taxonomy.label(e) << '\t';
    const auto& m = model.per_label[e];
    if (!m) {
      out << "excluded\n";
      continue;
    }
    out << detail::format_scientific(m->bias) << '\t';
    for (std::size_t j = 0; j < m->weights.size(); ++j) out << (j ? " " : "") << detail::format_scientific(m->weights[j]);
    out << '\n';
  }
}

inline void write_vocabulary(const NgramFeatureSpace& space, std::ostream& out) {
  for (const auto& g : space.ngrams) out << g << '\n';
}

}  // namespace emoshot

#endif  // EMOSHOT_BASELINE_HPP
