#ifndef EMOSHOT_LABELSPACE_HPP
#define EMOSHOT_LABELSPACE_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpus.hpp"
#include "detail/io.hpp"
#include "embeddings.hpp"
#include "error.hpp"

namespace emoshot {

enum class ProjectionMethod { WordnetDefinition, LabeledSentences, WordEmbedding };

inline const char* to_string(ProjectionMethod method) {
  switch (method) {
    case ProjectionMethod::WordnetDefinition: return "wordnet_definition";
    case ProjectionMethod::LabeledSentences: return "labeled_sentences";
    case ProjectionMethod::WordEmbedding: return "word_embedding";
  }
  return "?";
}

inline std::optional<ProjectionMethod> parse_projection_method(std::string_view s) {
  if (s == "wordnet_definition") return ProjectionMethod::WordnetDefinition;
  if (s == "labeled_sentences") return ProjectionMethod::LabeledSentences;
  if (s == "word_embedding") return ProjectionMethod::WordEmbedding;
  return std::nullopt;
}

struct LabelDefinition {
  std::string label;
  std::string synset;  // e.g. "embarrassment.n.01"
  std::string gloss;
};

/// Key under which a label's embedded definition sentence is stored in an EmbeddingTable.
inline std::string label_key(const EmotionTaxonomy& taxonomy, std::string_view label) {
  return "label::" + taxonomy.name() + "::" + std::string(label);
}

/// Definitions file: "<label>\t<synset-id>\t<gloss>" per line. Every taxonomy label must appear
/// exactly once; the result is in taxonomy order.
inline std::vector<LabelDefinition> load_definitions(const std::string& path, const EmotionTaxonomy& taxonomy) {
  auto in = detail::open_input(path);
  std::vector<std::optional<LabelDefinition>> slots(taxonomy.size());
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 3)
      throw FileError(ErrorKind::Format, path, line_no, "expected '<label>\\t<synset-id>\\t<gloss>'");
    const auto index = taxonomy.index_of(fields[0]);
    if (!index)
      throw FileError(ErrorKind::Format, path, line_no,
                      "label '" + std::string(fields[0]) + "' is not in taxonomy '" + taxonomy.name() + "'");
    if (fields[2].empty())
      throw FileError(ErrorKind::Format, path, line_no, "empty gloss for '" + std::string(fields[0]) + "'");
    if (slots[*index])
      throw FileError(ErrorKind::Format, path, line_no, "second definition for '" + std::string(fields[0]) + "'");
    slots[*index] = LabelDefinition{std::string(fields[0]), std::string(fields[1]), std::string(fields[2])};
  }
  std::vector<LabelDefinition> out;
  out.reserve(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i])
      throw Error(ErrorKind::Completeness, path + ": no definition for label '" + taxonomy.label(i) + "'");
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

/// "<label>: <gloss>", verbatim.
inline std::string definition_sentence(const LabelDefinition& defn) { return defn.label + ": " + defn.gloss; }

/// One vector per representable label, produced by a single projection method.
struct LabelRepresentation {
  ProjectionMethod method{};
  EmotionTaxonomy taxonomy;
  std::size_t dim = 0;
  std::vector<std::optional<Vector>> vectors;  // indexed by taxonomy label
  std::vector<std::pair<std::size_t, std::string>> unrepresentable;  // (label index, reason)
  std::string provenance;
  std::size_t excluded_documents = 0;  // centroid method: dev documents without an embedding

  bool representable(std::size_t label) const { return vectors.at(label).has_value(); }

  std::size_t representable_count() const {
    std::size_t n = 0;
    for (const auto& v : vectors) n += v.has_value();
    return n;
  }
};

/// Embeds every definition sentence by word averaging (the GloVe route), keyed by label_key.
/// Sentences without any in-vocabulary token are left out.
inline EmbeddingTable embed_definitions(const EmotionTaxonomy& taxonomy, std::span<const LabelDefinition> definitions,
                                        const WordVectorTable& words, std::string provider = "glove-avg") {
  EmbeddingTable table(words.dim(), std::move(provider));
  for (const auto& defn : definitions)
    if (auto v = sentence_embedding_word_avg(definition_sentence(defn), words))
      table.add(label_key(taxonomy, defn.label), *v);
  return table;
}

inline LabelRepresentation build_labels_definition(const EmotionTaxonomy& taxonomy,
                                                   std::span<const LabelDefinition> definitions,
                                                   const EmbeddingTable& label_embeddings) {
  LabelRepresentation rep{ProjectionMethod::WordnetDefinition, taxonomy, label_embeddings.dim(),
                          std::vector<std::optional<Vector>>(taxonomy.size()), {}, {}, 0};
  for (std::size_t i = 0; i < taxonomy.size(); ++i) {
    const auto key = label_key(taxonomy, taxonomy.label(i));
    const auto v = label_embeddings.find(key);
    if (!v) throw Error(ErrorKind::Completeness, "no embedding for label '" + taxonomy.label(i) + "' (key " + key + ")");
    rep.vectors[i] = Vector(v->begin(), v->end());
  }
  rep.provenance = "provider=" + label_embeddings.provider() + ";synsets=";
  for (std::size_t i = 0; i < definitions.size(); ++i) rep.provenance += (i ? "," : "") + definitions[i].synset;
  return rep;
}

/// Centroid of the embeddings of the dev documents carrying each label. Documents missing from
/// doc_embeddings are skipped and counted; labels with no embedded example are unrepresentable.
inline LabelRepresentation build_labels_centroid(const EmotionTaxonomy& taxonomy, std::span<const Document> dev_documents,
                                                 const EmbeddingTable& doc_embeddings) {
  const std::size_t dim = doc_embeddings.dim();
  std::vector<Vector> sums(taxonomy.size(), Vector(dim, 0.0));
  std::vector<std::size_t> counts(taxonomy.size(), 0);
  LabelRepresentation rep{ProjectionMethod::LabeledSentences, taxonomy, dim,
                          std::vector<std::optional<Vector>>(taxonomy.size()), {}, {}, 0};
  for (const auto& doc : dev_documents) {
    const auto v = doc_embeddings.find(doc.id);
    if (!v) {
      ++rep.excluded_documents;
      continue;
    }
    for (auto label : doc.gold) {
      for (std::size_t k = 0; k < dim; ++k) sums[label][k] += (*v)[k];
      ++counts[label];
    }
  }
  for (std::size_t i = 0; i < taxonomy.size(); ++i) {
    if (counts[i] == 0) {
      rep.unrepresentable.emplace_back(i, "no labeled dev example");
      continue;
    }
    for (auto& x : sums[i]) x /= static_cast<double>(counts[i]);
    rep.vectors[i] = std::move(sums[i]);
  }
  if (rep.representable_count() == 0)
    throw Error(ErrorKind::Config, "no label has a labeled dev example; centroids cannot be built");
  rep.provenance = "provider=" + doc_embeddings.provider() + ";dev_documents=" + std::to_string(dev_documents.size()) +
                   ";excluded=" + std::to_string(rep.excluded_documents);
  return rep;
}

/// Word vector of each label string; out-of-vocabulary labels are unrepresentable.
inline LabelRepresentation build_labels_word(const EmotionTaxonomy& taxonomy, const WordVectorTable& words) {
  LabelRepresentation rep{ProjectionMethod::WordEmbedding, taxonomy, words.dim(),
                          std::vector<std::optional<Vector>>(taxonomy.size()), {}, "provider=glove", 0};
  for (std::size_t i = 0; i < taxonomy.size(); ++i) {
    if (const auto v = words.find(taxonomy.label(i)))
      rep.vectors[i] = Vector(v->begin(), v->end());
    else
      rep.unrepresentable.emplace_back(i, "label word not in vocabulary");
  }
  return rep;
}

}  // namespace emoshot

#endif  // EMOSHOT_LABELSPACE_HPP
