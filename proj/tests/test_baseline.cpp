#include <gtest/gtest.h>

#include <emoshot/baseline.hpp>
#include <emoshot/metrics.hpp>

#include "support.hpp"

using namespace emoshot;

namespace {

const EmotionTaxonomy kTwo("two", {"joy", "anger"});

// Four documents, two labels, separable by the words "glad" and "mad".
std::vector<Document> separable_docs() {
  return {{"a", "glad glad day", {0}, Split::Train},
          {"b", "mad mad day", {1}, Split::Train},
          {"c", "glad mad glad", {0, 1}, Split::Train},
          {"d", "day day", {}, Split::Train}};
}

struct Fitted {
  NgramFeatureSpace space;
  std::vector<SparseVector> x;
  LinearModel model;
};

Fitted fit(const std::vector<Document>& docs, const LogRegOptions& opts = {}) {
  const Corpus c(kTwo, docs, Source::SemEval);
  std::vector<std::string> texts;
  for (const auto& d : docs) texts.push_back(d.text);
  Fitted f;
  f.space = featurize(texts, 1);
  for (const auto& t : texts) f.x.push_back(vectorize(t, f.space));
  f.model = train_logreg(f.x, gold_sets(docs), class_weights_linear(c), f.space, opts);
  return f;
}

}  // namespace

TEST(ClassWeights, LinearFormula) {
  EXPECT_EQ(linear_balanced_weight(100, 4, 5), 5.0);
  EXPECT_EQ(linear_balanced_weight(100, 4, 25), 1.0);
  EXPECT_DOUBLE_EQ(linear_balanced_weight(58009, 28, 96) / linear_balanced_weight(58009, 28, 5512), 5512.0 / 96.0);
}

TEST(ClassWeights, SqrtFormula) {
  EXPECT_EQ(sqrt_neg_pos_weight(90, 10), 3.0);
  EXPECT_EQ(sqrt_neg_pos_weight(40, 40), 1.0);
  EXPECT_EQ(sqrt_neg_pos_weight(1000, 10), 10.0);
}

TEST(ClassWeights, FromCorpusTrainSplit) {
  const Corpus c(kTwo,
                 {{"a", "", {0}, Split::Train}, {"b", "", {}, Split::Train}, {"c", "", {}, Split::Train},
                  {"d", "", {}, Split::Train}, {"e", "", {1}, Split::Test}},
                 Source::SemEval);
  const auto lin = class_weights_linear(c);
  EXPECT_EQ(*lin.weights[0], 2.0);  // 4 / (2 * 1)
  EXPECT_FALSE(lin.weights[1]);
  const auto sq = class_weights_sqrt(c);
  EXPECT_EQ(*sq.weights[0], std::sqrt(3.0));
}

TEST(Ngrams, UnigramsAndBigrams) {
  EXPECT_EQ(extract_ngrams("X y"), (std::vector<std::string>{"x", "y", "x y"}));
}

TEST(Ngrams, MinimumFrequencyFilter) {
  const std::vector<std::string> texts{"a b a b a b"};
  const auto space = featurize(texts, 3);
  EXPECT_EQ(space.ngrams, (std::vector<std::string>{"a", "a b", "b"}));
  EXPECT_FALSE(space.index.count("b a"));
}

TEST(Ngrams, UnseenTextVectorizesToZero) {
  const std::vector<std::string> texts{"a b a b a b"};
  const auto space = featurize(texts, 3);
  EXPECT_TRUE(vectorize("zzz qqq", space).empty());
  const auto v = vectorize("a b a", space);
  EXPECT_EQ(v, (SparseVector{{0, 2.0}, {1, 1.0}, {2, 1.0}}));
}

TEST(LogReg, SeparableFixtureReachesTrainF1One) {
  const auto docs = separable_docs();
  const auto f = fit(docs);
  std::vector<std::string> ids;
  for (const auto& d : docs) ids.push_back(d.id);
  const auto p = predict_baseline(f.model, ids, f.x);
  const auto r = evaluate(p, docs, kTwo);
  EXPECT_EQ(r.macro_f1, 1.0);
}

TEST(LogReg, LossNeverIncreases) {
  const auto f = fit(separable_docs());
  for (const auto& m : f.model.per_label) {
    ASSERT_TRUE(m);
    ASSERT_GE(m->loss_history.size(), 2u);
    for (std::size_t i = 1; i < m->loss_history.size(); ++i)
      EXPECT_LE(m->loss_history[i], m->loss_history[i - 1] + 1e-9) << i;
  }
}

TEST(LogReg, OneEpochDecreasesLoss) {
  LogRegOptions one;
  one.max_epochs = 1;
  const auto f = fit(separable_docs(), one);
  EXPECT_EQ(f.model.per_label[0]->loss_history.size(), 2u);
  EXPECT_LT(f.model.per_label[0]->loss_history[1], f.model.per_label[0]->loss_history[0]);
  LogRegOptions zero;
  zero.max_epochs = 0;
  const auto g = fit(separable_docs(), zero);
  for (double w : g.model.per_label[0]->weights) EXPECT_EQ(w, 0.0);
}

TEST(LogReg, DuplicatingDocumentsKeepsOptimum) {
  auto docs = separable_docs();
  auto doubled = docs;
  for (auto d : docs) {
    d.id += "-copy";
    doubled.push_back(d);
  }
  LogRegOptions tight;
  tight.l2 = 1e-2;
  tight.max_epochs = 20000;
  tight.tolerance = 1e-14;
  const auto a = fit(docs, tight);
  const auto b = fit(doubled, tight);
  ASSERT_EQ(a.space.ngrams, b.space.ngrams);
  for (std::size_t e = 0; e < 2; ++e) {
    for (std::size_t j = 0; j < a.space.size(); ++j)
      EXPECT_NEAR(a.model.per_label[e]->weights[j], b.model.per_label[e]->weights[j], 1e-4);
    EXPECT_NEAR(a.model.per_label[e]->bias, b.model.per_label[e]->bias, 1e-4);
  }
}

TEST(LogReg, ModelFileListsEveryLabel) {
  const auto f = fit(separable_docs());
  std::ostringstream out;
  write_linear_model(f.model, out, "d");
  const auto s = out.str();
  EXPECT_NE(s.find("# vocabulary_hash=" + f.space.vocabulary_hash()), std::string::npos);
  EXPECT_NE(s.find("\njoy\t"), std::string::npos);
  EXPECT_NE(s.find("\nanger\t"), std::string::npos);
}
