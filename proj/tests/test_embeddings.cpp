#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <emoshot/embeddings.hpp>

#include "support.hpp"

using namespace emoshot;

namespace {

WordVectorTable glove_from(const std::string& text) {
  std::istringstream in(text);
  return load_glove(in, "inline");
}

}  // namespace

TEST(Glove, TwoLineFixture) {
  const auto t = glove_from("a 1.0 0.0\nb 0.0 2.0\n");
  EXPECT_EQ(t.dim(), 2u);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ((*t.find("b"))[1], 2.0);
}

TEST(Glove, DimensionMismatchNamesLine) {
  try {
    glove_from("a 1.0\nb 1.0 2.0\n");
    FAIL();
  } catch (const FileError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Format);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Glove, LaterDuplicateOverwrites) {
  const auto t = glove_from("a 1 2\na 3 4\n");
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ((*t.find("a"))[0], 3.0);
}

TEST(Glove, NonNumberIsParseError) {
  try {
    glove_from("a 1 x\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
  }
}

TEST(Glove, KeepFilterStillValidates) {
  const std::unordered_set<std::string> keep{"b"};
  std::istringstream in("a 1 2\nb 3 4\n");
  const auto t = load_glove(in, "x", &keep);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_FALSE(t.find("a"));
  std::istringstream bad("a 1 2\nb 3\n");
  EXPECT_THROW(load_glove(bad, "x", &keep), FileError);
}

TEST(WordAverage, TwoVectorMean) {
  const auto t = glove_from("good 1 0\nmovie 0 1\n");
  EXPECT_EQ(*sentence_embedding_word_avg("Good movie!", t), (Vector{0.5, 0.5}));
}

TEST(WordAverage, SingleTokenIsExact) {
  const auto t = glove_from("joy 0.3 0.4\nx 1 1\n");
  EXPECT_EQ(*sentence_embedding_word_avg("the JOY", t), (Vector{0.3, 0.4}));
}

TEST(WordAverage, AllOovIsUnembeddable) {
  const auto t = glove_from("joy 0.3 0.4\n");
  EXPECT_FALSE(sentence_embedding_word_avg("qqq zzz", t).has_value());
  EXPECT_FALSE(sentence_embedding_word_avg("", t).has_value());
}

TEST(WordAverage, EmbedDocumentsReportsUnembeddable) {
  const auto t = glove_from("joy 1 0\n");
  const std::vector<Document> docs{{"d1", "joy!", {}, Split::Dev}, {"d2", "nothing", {}, Split::Dev}};
  const auto r = embed_documents(docs, t);
  EXPECT_EQ(r.table.size(), 1u);
  EXPECT_EQ(r.unembeddable, (std::vector<std::string>{"d2"}));
  EXPECT_EQ(r.table.provider(), "glove-avg");
}

TEST(Cosine, HandValues) {
  const Vector v{0.3, -2.0, 7.5};
  EXPECT_DOUBLE_EQ(cosine(v, v).value(), 1.0);
  EXPECT_EQ(cosine(Vector{1, 0}, Vector{0, 1}).value(), 0.0);
  EXPECT_NEAR(cosine(Vector{1, 2, 2}, Vector{2, 1, 2}).value(), 8.0 / 9.0, 1e-15);
  EXPECT_EQ(cosine(Vector{1, 0}, Vector{-3, 0}).value(), -1.0);
}

TEST(Cosine, ClampedAndErrors) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> n;
  for (int i = 0; i < 1000; ++i) {
    Vector v(5);
    for (auto& x : v) x = n(gen);
    const double c = cosine(v, v).value();
    EXPECT_LE(c, 1.0);
    EXPECT_GE(c, -1.0);
  }
  EXPECT_EQ(CosineScore(1.0000000001).value(), 1.0);
  try {
    cosine(Vector{1, 2}, Vector{1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Shape);
  }
  try {
    cosine(Vector{0, 0}, Vector{1, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Embtsv, ReadsHeaderAndRecords) {
  std::istringstream in("EMBTSV 1 2 3\nd1\t1 2 3\nlabel::semeval::joy\t4.0e-1 5 6\n");
  const auto t = read_embeddings(in, "x", "test");
  EXPECT_EQ(t.dim(), 3u);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ((*t.find("label::semeval::joy"))[0], 0.4);
}

TEST(Embtsv, ArityErrorNamesLine) {
  std::istringstream in("EMBTSV 1 2 3\nd1\t1 2 3\nd2\t1 2\n");
  try {
    read_embeddings(in, "x", "test");
    FAIL();
  } catch (const FileError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Format);
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Embtsv, StructuralErrors) {
  for (const char* body : {"EMBTSV 2 1 1\na\t1\n", "EMB 1 1 1\na\t1\n", "EMBTSV 1 2 1\na\t1\n",
                           "EMBTSV 1 1 1\na\t1\nb\t2\n", "EMBTSV 1 2 1\na\t1\na\t2\n", "EMBTSV 1 1 1\na 1\n",
                           "EMBTSV 1 1 0\n", "EMBTSV 1 1 1\na\tnan?\n"}) {
    std::istringstream in(body);
    EXPECT_THROW(read_embeddings(in, "x", "test"), FileError) << body;
  }
}

TEST(Embtsv, ProviderDefaultsToFileStem) {
  const auto t = read_embeddings(support::fixture("semeval_synthetic.embtsv"));
  EXPECT_EQ(t.provider(), "embtsv:semeval_synthetic");
  EXPECT_EQ(t.dim(), 8u);
}

TEST(Embtsv, WritesNineSignificantDigits) {
  EmbeddingTable t(2, "p");
  t.add("k", Vector{0.5, -1.0 / 3.0});
  std::ostringstream out;
  write_embeddings(t, out);
  EXPECT_EQ(out.str(), "EMBTSV 1 1 2\nk\t5.00000000e-01 -3.33333333e-01\n");
}

TEST(Embtsv, RandomRoundTrip) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 1 + trial % 9;
    EmbeddingTable t(dim, "p");
    for (int r = 0; r < 25; ++r) {
      Vector v(dim);
      for (auto& x : v) x = n(gen) * std::pow(10.0, -static_cast<int>(gen() % 4));
      t.add("doc" + std::to_string(r), v);
    }
    std::stringstream io;
    write_embeddings(t, io);
    const auto back = read_embeddings(io, "x", "p");
    ASSERT_EQ(back.keys(), t.keys());
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t k = 0; k < dim; ++k)
        EXPECT_NEAR(back.row(i)[k], t.row(i)[k], 1e-7);
  }
}

TEST(EmbeddingTable, RejectsDuplicateAndBadKeys) {
  EmbeddingTable t(1, "p");
  t.add("a", Vector{1});
  EXPECT_THROW(t.add("a", Vector{2}), Error);
  EXPECT_THROW(t.add("b\tc", Vector{2}), Error);
  EXPECT_THROW(t.add("d", Vector{1, 2}), Error);
  EXPECT_THROW(EmbeddingTable(1, ""), Error);
}
