#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include <json.hpp>

#include "support.hpp"

using emoshot::support::fixture;
using emoshot::support::read_file;
using emoshot::support::TempDir;
using emoshot::support::write_file;

namespace {

int run_cli(const std::string& args, const std::string& log) {
  const std::string cmd = std::string(EMOSHOT_CLI) + " " + args + " >" + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string semeval_splits() {
  return "--dataset semeval --train " + fixture("semeval/train.txt") + " --dev " + fixture("semeval/dev.txt") +
         " --test " + fixture("semeval/test.txt");
}

double macro_f1(const std::string& report) {
  return nlohmann::json::parse(read_file(report))["macro"]["f1"].get<double>();
}

}  // namespace

TEST(Cli, RunWritesReport) {
  TempDir dir;
  const auto out = dir.file("out");
  ASSERT_EQ(run_cli("run " + semeval_splits() + " --method word_embedding --glove " + fixture("glove_mini.txt") +
                        " --out " + out,
                    dir.file("log")),
            0)
      << read_file(dir.file("log"));
  EXPECT_NE(read_file(dir.file("log")).find("macro precision"), std::string::npos);
  const auto j = nlohmann::json::parse(read_file(out + "/report.json"));
  EXPECT_EQ(j["method"], "word_embedding");
  EXPECT_EQ(j["per_class"].size(), 11u);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  TempDir dir;
  write_file(dir.file("run.conf"), "dataset=semeval\nmethod=word_embedding\ntrain=" + fixture("semeval/train.txt") +
                                       "\ndev=" + fixture("semeval/dev.txt") + "\ntest=" + fixture("semeval/test.txt") +
                                       "\nglove=" + fixture("glove_mini.txt") + "\nout=" + dir.file("out") + "\n");
  ASSERT_EQ(run_cli("run --config " + dir.file("run.conf"), dir.file("log")), 0) << read_file(dir.file("log"));
  EXPECT_EQ(nlohmann::json::parse(read_file(dir.file("out/report.json")))["method"], "word_embedding");
  ASSERT_EQ(run_cli("run --config " + dir.file("run.conf") + " --method labeled_sentences --out " + dir.file("o2"),
                    dir.file("log")),
            0)
      << read_file(dir.file("log"));
  EXPECT_EQ(nlohmann::json::parse(read_file(dir.file("o2/report.json")))["method"], "labeled_sentences");
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(run_cli("", dir.file("log")), 2);
  EXPECT_EQ(run_cli("run --out " + dir.file("o") + " --bogus", dir.file("log")), 2);
  EXPECT_EQ(run_cli("run " + semeval_splits() + " --method word_embedding --embeddings " +
                        fixture("semeval_synthetic.embtsv") + " --out " + dir.file("o"),
                    dir.file("log")),
            2);
  EXPECT_NE(read_file(dir.file("log")).find("word_embedding"), std::string::npos);
  EXPECT_EQ(run_cli("run --dataset semeval --train /nonexistent --dev /nonexistent --test /nonexistent "
                    "--method word_embedding --glove " + fixture("glove_mini.txt") + " --out " + dir.file("o"),
                    dir.file("log")),
            3);
  EXPECT_EQ(run_cli("run " + semeval_splits() + " --method labeled_sentences --glove " + fixture("glove_mini.txt") +
                        " --dev-size 500 --out " + dir.file("o"),
                    dir.file("log")),
            2);
  std::filesystem::create_directories(dir.file("locked"));
  write_file(dir.file("locked/.emoshot.lock"), "");
  EXPECT_EQ(run_cli("run " + semeval_splits() + " --method word_embedding --glove " + fixture("glove_mini.txt") +
                        " --out " + dir.file("locked"),
                    dir.file("log")),
            3);
}

TEST(Cli, StagedCommandsMatchFullRun) {
  TempDir dir;
  const auto log = dir.file("log");
  const auto s = semeval_splits();
  ASSERT_EQ(run_cli("ingest " + s + " --out " + dir.file("ingest"), log), 0) << read_file(log);
  EXPECT_TRUE(std::filesystem::exists(dir.file("ingest/corpus.tsv")));
  const auto corpus = " --dataset semeval --corpus " + dir.file("ingest/corpus.tsv");

  ASSERT_EQ(run_cli("embed-glove" + corpus + " --glove " + fixture("glove_mini.txt") + " --out " + dir.file("emb"), log),
            0)
      << read_file(log);
  const auto emb = " --embeddings " + dir.file("emb/embeddings.embtsv");
  const auto m = " --method wordnet_definition";

  ASSERT_EQ(run_cli("build-labels" + corpus + m + emb + " --out " + dir.file("labels"), log), 0) << read_file(log);
  const auto labels = " --labels " + dir.file("labels/labels.embtsv");
  ASSERT_EQ(run_cli("calibrate" + corpus + m + emb + labels + " --out " + dir.file("cal"), log), 0) << read_file(log);
  ASSERT_EQ(run_cli("predict" + corpus + m + emb + labels + " --thresholds " + dir.file("cal/thresholds.tsv") +
                        " --out " + dir.file("pred"),
                    log),
            0)
      << read_file(log);
  ASSERT_EQ(run_cli("evaluate" + corpus + " --predictions " + dir.file("pred/predictions.tsv") + " --out " +
                        dir.file("eval"),
                    log),
            0)
      << read_file(log);
  ASSERT_EQ(run_cli("run" + corpus + m + emb + " --out " + dir.file("full"), log), 0) << read_file(log);
  EXPECT_EQ(macro_f1(dir.file("eval/report.json")), macro_f1(dir.file("full/report.json")));
}

TEST(Cli, CurveAndTransfer) {
  TempDir dir;
  const auto log = dir.file("log");
  ASSERT_EQ(run_cli("curve " + semeval_splits() + " --glove " + fixture("glove_mini.txt") +
                        " --methods labeled_sentences,word_embedding,wordnet_definition --sizes 10,30 --seeds 1,2"
                        " --out " + dir.file("curve"),
                    log),
            0)
      << read_file(log);
  std::size_t rows = 0;
  std::istringstream in(read_file(dir.file("curve/curve.tsv")));
  for (std::string line; std::getline(in, line);) rows += !line.empty();
  EXPECT_EQ(rows, 12u);

  ASSERT_EQ(run_cli("transfer " + semeval_splits() + " --glove " + fixture("glove_mini.txt") + " --out " +
                        dir.file("transfer"),
                    log),
            0)
      << read_file(log);
  const auto unseen = read_file(dir.file("transfer/unseen_labels.tsv"));
  for (const char* l : {"anticipation", "pessimism", "trust"}) EXPECT_NE(unseen.find(l), std::string::npos) << l;
}
