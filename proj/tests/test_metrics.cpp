#include <gtest/gtest.h>

#include <emoshot/metrics.hpp>

#include "support.hpp"

using namespace emoshot;

namespace {

const EmotionTaxonomy kTwo("two", {"joy", "anger"});

std::vector<Document> docs_with(const std::vector<std::vector<std::size_t>>& gold) {
  std::vector<Document> out;
  for (std::size_t i = 0; i < gold.size(); ++i) out.push_back({"d" + std::to_string(i), "", gold[i], Split::Test});
  return out;
}

PredictionSet preds(const std::vector<std::vector<std::size_t>>& labels) {
  PredictionSet p;
  for (std::size_t i = 0; i < labels.size(); ++i) p.doc_ids.push_back("d" + std::to_string(i));
  p.labels = labels;
  return p;
}

}  // namespace

TEST(ClassPRF, ZeroDivisionConvention) {
  const auto never = class_prf("x", 0, 0, 4);
  EXPECT_EQ(never.precision, 0.0);
  EXPECT_EQ(never.recall, 0.0);
  EXPECT_EQ(never.f1, 0.0);
  EXPECT_EQ(never.support, 4u);
  const auto empty = class_prf("y", 0, 0, 0);
  EXPECT_EQ(empty.f1, 0.0);
}

TEST(Evaluate, MacroIsMeanOfClassF1) {
  // joy: tp=2 fp=1 fn=0 -> F1 0.8; anger: tp=1 fp=1 fn=2 -> P 0.5 R 1/3 F1 0.4
  const auto gold = docs_with({{0, 1}, {0}, {1}, {1}, {}});
  const auto p = preds({{0, 1}, {0}, {}, {}, {0, 1}});
  const auto r = evaluate(p, gold, kTwo);
  EXPECT_DOUBLE_EQ(r.per_class[0].f1, 0.8);
  EXPECT_DOUBLE_EQ(r.per_class[1].f1, 0.4);
  EXPECT_DOUBLE_EQ(r.macro_f1, 0.6);
  EXPECT_EQ(r.doc_count, 5u);
}

TEST(Evaluate, PerfectPredictor) {
  const std::vector<std::vector<std::size_t>> g{{0}, {1}, {0, 1}};
  const auto r = evaluate(preds(g), docs_with(g), kTwo);
  EXPECT_EQ(r.macro_p, 1.0);
  EXPECT_EQ(r.macro_r, 1.0);
  EXPECT_EQ(r.macro_f1, 1.0);
}

TEST(Evaluate, NeverPredictedClassScoresZero) {
  const auto r = evaluate(preds({{0}, {0}}), docs_with({{0}, {1}}), kTwo);
  const auto* anger = r.find("anger");
  ASSERT_NE(anger, nullptr);
  EXPECT_EQ(anger->precision, 0.0);
  EXPECT_EQ(anger->recall, 0.0);
  EXPECT_EQ(anger->f1, 0.0);
}

TEST(Evaluate, ExcludedLabelsAreListedNotAveraged) {
  const std::vector<ExcludedLabel> ex{{1, "neutral excluded by default"}};
  const auto r = evaluate(preds({{0}, {}}), docs_with({{0}, {1}}), kTwo, ex);
  ASSERT_EQ(r.per_class.size(), 1u);
  EXPECT_EQ(r.macro_f1, 1.0);
  ASSERT_EQ(r.excluded_labels.size(), 1u);
  EXPECT_EQ(r.excluded_labels[0].first, "anger");
  const auto j = to_json(r, "digest");
  EXPECT_EQ(j["excluded"][0]["label"], "anger");
  EXPECT_EQ(j["config_digest"], "digest");
  EXPECT_EQ(j["macro"]["f1"], 1.0);
}

TEST(Evaluate, OrderIndependentMatchingById) {
  auto p = preds({{0}, {1}});
  std::swap(p.doc_ids[0], p.doc_ids[1]);
  std::swap(p.labels[0], p.labels[1]);
  EXPECT_EQ(evaluate(p, docs_with({{0}, {1}}), kTwo).macro_f1, 1.0);
}

TEST(Evaluate, AlignmentErrors) {
  const auto gold = docs_with({{0}, {1}});
  auto count = preds({{0}});
  auto unknown = preds({{0}, {1}});
  unknown.doc_ids[1] = "zz";
  auto repeated = preds({{0}, {1}});
  repeated.doc_ids[1] = "d0";
  for (const auto* p : {&count, &unknown, &repeated}) {
    try {
      evaluate(*p, gold, kTwo);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Alignment);
    }
  }
}

TEST(Curve, FullDevOneSeedEqualsStandardRun) {
  const Corpus c(kTwo,
                 {{"t0", "", {0}, Split::Test}, {"v0", "", {0}, Split::Dev}, {"v1", "", {1}, Split::Dev},
                  {"v2", "", {}, Split::Dev}},
                 Source::SemEval);
  std::vector<std::size_t> seen;
  auto pipeline = [&](std::span<const Document> dev) {
    seen.push_back(dev.size());
    return static_cast<double>(dev.size()) / 10.0;
  };
  const std::vector<std::size_t> sizes{1, 3};
  const std::vector<std::uint64_t> seeds{0, 1};
  const auto pts = dev_size_curve(c, sizes, seeds, "m", pipeline);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_EQ(seen, (std::vector<std::size_t>{1, 1, 3, 3}));
  const auto means = curve_means(pts);
  EXPECT_DOUBLE_EQ(means.at({"m", 3}), 0.3);
  const std::vector<std::size_t> too_big{4};
  EXPECT_THROW(dev_size_curve(c, too_big, seeds, "m", pipeline), Error);
  const std::vector<std::size_t> descending{3, 1};
  EXPECT_THROW(dev_size_curve(c, descending, seeds, "m", pipeline), Error);
}
