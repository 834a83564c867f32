#ifndef EMOSHOT_EMBEDDINGS_HPP
#define EMOSHOT_EMBEDDINGS_HPP

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "corpus.hpp"
#include "detail/io.hpp"
#include "error.hpp"
#include "text.hpp"

namespace emoshot {

using Vector = std::vector<double>;

namespace detail {

/// Row-major store of equal-length vectors addressed by string key, in insertion order.
class KeyedRows {
 public:
  KeyedRows() = default;
  explicit KeyedRows(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  const std::vector<std::string>& keys() const { return keys_; }

  std::optional<std::span<const double>> find(std::string_view key) const {
    const auto it = index_.find(std::string(key));
    if (it == index_.end()) return std::nullopt;
    return row(it->second);
  }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  /// Returns false when the key already exists (the row is then left unchanged).
  bool insert(std::string key, std::span<const double> values) {
    if (values.size() != dim_)
      throw Error(ErrorKind::Shape, "vector for '" + key + "' has " + std::to_string(values.size()) +
                                        " components, expected " + std::to_string(dim_));
    if (index_.count(key)) return false;
    index_.emplace(key, keys_.size());
    keys_.push_back(std::move(key));
    data_.insert(data_.end(), values.begin(), values.end());
    return true;
  }

  void overwrite(const std::string& key, std::span<const double> values) {
    const auto it = index_.find(key);
    std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_));
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> data_;
};

}  // namespace detail

/// Word vectors loaded from a GloVe text file.
class WordVectorTable {
 public:
  WordVectorTable() = default;
  explicit WordVectorTable(std::size_t dim) : rows_(dim) {
    if (dim == 0) throw Error(ErrorKind::Format, "word vector dimension must be positive");
  }

  std::size_t dim() const { return rows_.dim(); }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  std::optional<std::span<const double>> find(std::string_view token) const { return rows_.find(token); }
  const std::vector<std::string>& tokens() const { return rows_.keys(); }

  /// Later entries for the same token replace earlier ones.
  void set(std::string token, std::span<const double> values) {
    if (!rows_.insert(token, values)) rows_.overwrite(token, values);
  }

 private:
  detail::KeyedRows rows_;
};

/// Keyed vectors for documents or label strings, tagged with the provider that produced them.
class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t dim, std::string provider) : rows_(dim), provider_(std::move(provider)) {
    if (dim == 0) throw Error(ErrorKind::Format, "embedding dimension must be positive");
    if (provider_.empty()) throw Error(ErrorKind::Format, "embedding provider tag must be non-empty");
  }

  std::size_t dim() const { return rows_.dim(); }
  std::size_t size() const { return rows_.size(); }
  const std::string& provider() const { return provider_; }
  const std::vector<std::string>& keys() const { return rows_.keys(); }
  std::optional<std::span<const double>> find(std::string_view key) const { return rows_.find(key); }
  std::span<const double> row(std::size_t i) const { return rows_.row(i); }

  void add(std::string key, std::span<const double> values) {
    if (key.empty() || key.find_first_of("\t\n\r") != std::string::npos)
      throw Error(ErrorKind::Format, "embedding key '" + key + "' is empty or contains a tab/newline");
    if (!rows_.insert(key, values)) throw Error(ErrorKind::Format, "duplicate embedding key '" + key + "'");
  }

 private:
  detail::KeyedRows rows_;
  std::string provider_;
};

/// Cosine similarity, clamped to [-1, 1].
class CosineScore {
 public:
  constexpr explicit CosineScore(double value) : value_(std::clamp(value, -1.0, 1.0)) {}
  constexpr double value() const { return value_; }

 private:
  double value_;
};

inline double dot(std::span<const double> u, std::span<const double> v) {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * v[i];
  return sum;
}

inline double norm(std::span<const double> u) { return std::sqrt(dot(u, u)); }

inline CosineScore cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw Error(ErrorKind::Shape, "cosine of vectors with dimensions " + std::to_string(u.size()) + " and " +
                                      std::to_string(v.size()));
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw Error(ErrorKind::Domain, "cosine of a zero vector");
  return CosineScore(dot(u, v) / (nu * nv));
}

// ---------------------------------------------------------------------------------------------
// GloVe

/// Reads "token f1 ... fd" lines. When `keep` is given, only tokens in it are stored (the file
/// is still fully validated).
inline WordVectorTable load_glove(std::istream& in, const std::string& name,
                                  const std::unordered_set<std::string>* keep = nullptr) {
  std::optional<WordVectorTable> table;
  std::string line;
  std::size_t line_no = 0;
  Vector values;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_ws(line);
    if (fields.size() < 2) throw FileError(ErrorKind::Format, name, line_no, "expected a token and components");
    const std::size_t dim = fields.size() - 1;
    if (!table) table.emplace(dim);
    if (dim != table->dim())
      throw FileError(ErrorKind::Format, name, line_no,
                      "dimension mismatch: " + std::to_string(dim) + " components, expected " +
                          std::to_string(table->dim()));
    values.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const auto v = detail::parse_double(fields[k + 1]);
      if (!v)
        throw FileError(ErrorKind::Parse, name, line_no, "component '" + std::string(fields[k + 1]) + "' is not a number");
      values[k] = *v;
    }
    std::string token(fields[0]);
    if (!keep || keep->count(token)) table->set(std::move(token), values);
  }
  if (!table) throw Error(ErrorKind::Format, name + ": no word vectors");
  return std::move(*table);
}

inline WordVectorTable load_glove(const std::string& path, const std::unordered_set<std::string>* keep = nullptr) {
  auto in = detail::open_input(path);
  return load_glove(in, path, keep);
}

/// Mean of the word vectors of the in-vocabulary tokens of tokenize(text); nullopt when no token
/// is in vocabulary (the document is unembeddable).
inline std::optional<Vector> sentence_embedding_word_avg(std::string_view text, const WordVectorTable& table) {
  if (table.empty()) throw Error(ErrorKind::Domain, "word vector table is empty");
  Vector sum(table.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto& token : tokenize(text)) {
    const auto v = table.find(token);
    if (!v) continue;
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += (*v)[k];
    ++hits;
  }
  if (hits == 0) return std::nullopt;
  for (auto& x : sum) x /= static_cast<double>(hits);
  return sum;
}

struct DocumentEmbeddingResult {
  EmbeddingTable table;
  std::vector<std::string> unembeddable;  // ids with no in-vocabulary token
};

/// Word-average embeddings for each document, keyed by document id.
inline DocumentEmbeddingResult embed_documents(std::span<const Document> docs, const WordVectorTable& words,
                                               std::string provider = "glove-avg") {
  DocumentEmbeddingResult result{EmbeddingTable(words.dim(), std::move(provider)), {}};
  for (const auto& doc : docs) {
    if (auto v = sentence_embedding_word_avg(doc.text, words))
      result.table.add(doc.id, *v);
    else
      result.unembeddable.push_back(doc.id);
  }
  return result;
}

/// Every token (stop words kept) appearing in `texts`; used to restrict GloVe loading.
inline std::unordered_set<std::string> vocabulary_of(std::span<const std::string> texts) {
  std::unordered_set<std::string> vocab;
  for (const auto& t : texts)
    for (auto& tok : tokenize(t, false)) vocab.insert(std::move(tok));
  return vocab;
}

// ---------------------------------------------------------------------------------------------
// EMBTSV interchange: "EMBTSV 1 <count> <dim>" then <count> lines "<key>\t<f1> ... <fdim>".

inline EmbeddingTable read_embeddings(std::istream& in, const std::string& name, std::string provider) {
  std::string line;
  if (!detail::read_line(in, line)) throw FileError(ErrorKind::Format, name, 1, "missing EMBTSV header");
  const auto header = detail::split_ws(line);
  if (header.size() != 4 || header[0] != "EMBTSV" || header[1] != "1")
    throw FileError(ErrorKind::Format, name, 1, "bad header, expected 'EMBTSV 1 <count> <dim>'");
  const auto count = detail::parse_int<std::size_t>(header[2]);
  const auto dim = detail::parse_int<std::size_t>(header[3]);
  if (!count || !dim || *dim == 0) throw FileError(ErrorKind::Format, name, 1, "bad count or dimension in header");

  EmbeddingTable table(*dim, std::move(provider));
  Vector values(*dim);
  std::size_t line_no = 1;
  for (std::size_t r = 0; r < *count; ++r) {
    ++line_no;
    if (!detail::read_line(in, line))
      throw FileError(ErrorKind::Format, name, line_no,
                      "file ends after " + std::to_string(r) + " of " + std::to_string(*count) + " records");
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw FileError(ErrorKind::Format, name, line_no, "expected '<key>\\t<components>'");
    const auto comps = detail::split_ws(std::string_view(line).substr(tab + 1));
    if (comps.size() != *dim)
      throw FileError(ErrorKind::Format, name, line_no,
                      std::to_string(comps.size()) + " components, expected " + std::to_string(*dim));
    for (std::size_t k = 0; k < *dim; ++k) {
      const auto v = detail::parse_double(comps[k]);
      if (!v) throw FileError(ErrorKind::Format, name, line_no, "component '" + std::string(comps[k]) + "' is not a number");
      values[k] = *v;
    }
    std::string key = line.substr(0, tab);
    if (table.find(key)) throw FileError(ErrorKind::Format, name, line_no, "duplicate key '" + key + "'");
    table.add(std::move(key), values);
  }
  while (detail::read_line(in, line)) {
    ++line_no;
    if (!line.empty()) throw FileError(ErrorKind::Format, name, line_no, "records beyond the header count");
  }
  return table;
}

inline EmbeddingTable read_embeddings(const std::string& path, std::string provider = "") {
  auto in = detail::open_input(path);
  if (provider.empty()) {
    const auto slash = path.find_last_of('/');
    auto stem = path.substr(slash == std::string::npos ? 0 : slash + 1);
    if (const auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem.resize(dot);
    provider = "embtsv:" + stem;
  }
  return read_embeddings(in, path, std::move(provider));
}

inline void write_embeddings(const EmbeddingTable& table, std::ostream& out) {
  out << "EMBTSV 1 " << table.size() << ' ' << table.dim() << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.keys()[i] << '\t';
    const auto row = table.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? " " : "") << detail::format_scientific(row[k], 9);
    out << '\n';
  }
}

inline void write_embeddings(const EmbeddingTable& table, const std::string& path) {
  auto out = detail::open_output(path);
  write_embeddings(table, out);
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

}  // namespace emoshot

#endif  // EMOSHOT_EMBEDDINGS_HPP
