#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli/cli.hpp"
#include "cli/config.hpp"
#include "parmine/alignment.hpp"
#include "parmine/error.hpp"
#include "planted_fixture.hpp"
#include "test_util.hpp"

namespace parmine {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(testing::scratch_dir("cli"));
    testing::PlantedParams p;
    p.docs = 4;
    p.sentences_per_doc = 120;
    p.regions = 3;
    p.min_region = 10;
    p.max_region = 20;
    p.mock_dim = 512;
    const auto fixture = testing::make_planted_fixture(p);
    config_ = new fs::path(testing::write_planted_fixture(fixture, p, *dir_));
  }
  static void TearDownTestSuite() {
    delete dir_;
    delete config_;
  }

  static std::string cfg() { return config_->string(); }
  static fs::path out(const std::string& sub) { return *dir_ / sub; }

  static fs::path* dir_;
  static fs::path* config_;
};

fs::path* CliFixture::dir_ = nullptr;
fs::path* CliFixture::config_ = nullptr;

TEST(Cli, MissingConfig) {
  const auto r = run_cli({"mine-all", "-c", "/nonexistent/config.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("parmine: error[usage]: config not found"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 1);
  EXPECT_EQ(run_cli({"mine"}).code, 1);
}

TEST(Config, OverridesAndValidation) {
  nlohmann::json doc = {{"mining", {{"k", 5}}}};
  cli::apply_override(doc, "mining.k", "9");
  cli::apply_override(doc, "provider.kind", "mock");
  EXPECT_EQ(doc["mining"]["k"], 9);
  EXPECT_EQ(doc["provider"]["kind"], "mock");
  const auto c = cli::build_config(doc, "/base");
  EXPECT_EQ(c.mining.knn.k, 9u);
  EXPECT_EQ(c.output_dir, fs::path("/base/out"));
  EXPECT_FALSE(c.snapshot.contains("threads"));
  EXPECT_THROW(cli::build_config({{"mining", {{"kk", 1}}}}, "/"), ConfigError);
  EXPECT_THROW(cli::build_config({{"mining", {{"k", "five"}}}}, "/"), ConfigError);
  EXPECT_THROW(cli::build_config({{"alignment", {{"ma_window", 4}}}}, "/"), ConfigError);
  EXPECT_THROW(cli::build_config({{"provider", {{"kind", "magic"}}}}, "/"), ConfigError);
}

TEST_F(CliFixture, UnknownOverrideIsUsageError) {
  const auto r = run_cli({"windows", "-c", cfg(), "--mining.kk=3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error[usage]"), std::string::npos);
}

TEST_F(CliFixture, StagesComposeIntoMineAll) {
  const std::string staged = "--output_dir=" + out("staged").string();
  for (const char* stage : {"windows", "embed", "mine", "cluster", "align", "export"}) {
    const auto r = run_cli({stage, "-c", cfg(), staged});
    ASSERT_EQ(r.code, 0) << stage << ": " << r.err;
  }
  const auto r = run_cli({"mine-all", "-c", cfg(), "--output_dir", out("all").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"dataset.jsonl", "dataset.tsv", "aligned.jsonl", "pairs.tsv", "windows.src.mvec"}) {
    EXPECT_EQ(testing::read_file(out("staged") / f), testing::read_file(out("all") / f)) << f;
  }
  std::ifstream in(out("all") / "dataset.jsonl");
  EXPECT_FALSE(read_dataset_jsonl(in).empty());

  const auto manifest = nlohmann::json::parse(testing::read_file(out("all") / "manifest.mine-all.json"));
  EXPECT_EQ(manifest["config"]["mining"]["source_lang"], "sa");
  EXPECT_EQ(manifest["config"]["output_dir"], out("all").string());
  EXPECT_TRUE(manifest["input_digests"].contains((*dir_ / "src.jsonl").string()));
  EXPECT_TRUE(manifest["input_digests"].contains((*dir_ / "tgt.jsonl").string()));
  for (const auto& [path, digest] : manifest["input_digests"].items()) {
    EXPECT_EQ(digest.get<std::string>().size(), 64u) << path;
  }
}

TEST_F(CliFixture, ThreadCountDoesNotChangeOutput) {
  // Same output directory for both runs so the manifests can match too.
  const std::string o = "--output_dir=" + out("det").string();
  ASSERT_EQ(run_cli({"mine-all", "-c", cfg(), "--threads", "1", o}).code, 0);
  fs::remove_all(out("det1"));
  fs::copy(out("det"), out("det1"));
  ASSERT_EQ(run_cli({"mine-all", "-c", cfg(), "--threads", "3", o}).code, 0);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(out("det1"))) {
    const std::string name = entry.path().filename().string();
    EXPECT_EQ(testing::read_file(entry.path()), testing::read_file(out("det") / name)) << name;
    ++files;
  }
  EXPECT_GE(files, 10u);
}

TEST_F(CliFixture, MissingUpstreamArtifactIsDataError) {
  const auto r = run_cli({"cluster", "-c", cfg(), "--output_dir=" + out("empty").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error[data]"), std::string::npos);
}

TEST_F(CliFixture, UnreachableProviderIsProviderError) {
  const auto r = run_cli({"mine-all", "-c", cfg(), "--output_dir=" + out("remote").string(),
                          "--provider.kind=remote", "--provider.location=http://127.0.0.1:1",
                          "--provider.max_retries=0"});
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("error[provider]"), std::string::npos);
}

TEST_F(CliFixture, MalformedCorpusIsDataError) {
  const auto bad = out("bad.jsonl");
  testing::write_file(bad, "{\"doc_id\":\"d\",\"lang\":\"sa\",\"sentences\":[\"x\"]}\nnot json\n");
  const auto r = run_cli({"ingest", "-c", cfg(), "--corpora.sa=" + bad.string(),
                          "--output_dir=" + out("bad").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST_F(CliFixture, AuditAndStats) {
  const std::string o = "--output_dir=" + out("audit").string();
  ASSERT_EQ(run_cli({"mine-all", "-c", cfg(), o}).code, 0);
  ASSERT_EQ(run_cli({"audit-sample", "-c", cfg(), o, "--audit.n=4"}).code, 0);
  const std::string sheet = testing::read_file(out("audit") / "audit.tsv");
  std::istringstream lines(sheet);
  std::string line, filled;
  for (int n = 0; std::getline(lines, line); ++n) {
    if (n > 0) line.insert(line.size() - 1, n == 1 ? "wrong" : "perfect");
    filled += line + "\n";
  }
  testing::write_file(out("labels.tsv"), filled);
  const auto r = run_cli({"audit-report", "-c", cfg(), o, "--labels", out("labels.tsv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(testing::read_file(out("audit") / "audit_rates.tsv"),
            "label\tcount\tpercent\nPerfect\t3\t75\nPartlyCorrect\t0\t0\nWrong\t1\t25\ntotal\t4\t100\n");
  const auto s = run_cli({"stats", "-c", cfg(), o, "--dataset", (out("audit") / "dataset.jsonl").string()});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NE(testing::read_file(out("audit") / "stats.tsv").find("sa\t4\t480\t"), std::string::npos);
  EXPECT_NE(testing::read_file(out("audit") / "dataset_stats.tsv").find("sa-bo\t"), std::string::npos);
}

TEST_F(CliFixture, EvalFindsCopiedSentences) {
  // Queries are source sentences; golds are the same sentences, so BM25 on
  // exact text must rank them first.
  std::ifstream src(out("src.jsonl"));
  std::string first;
  std::getline(src, first);
  const auto doc = nlohmann::json::parse(first);
  std::string tasks;
  for (std::size_t i = 0; i < 5; ++i) {
    nlohmann::json q = {{"query", doc["sentences"][i]},
                        {"query_lang", "sa"},
                        {"gold", doc["doc_id"].get<std::string>() + "#" + std::to_string(i)}};
    tasks += q.dump() + "\n";
  }
  testing::write_file(out("task.jsonl"), tasks);
  const auto r = run_cli({"eval", "-c", cfg(), "--output_dir=" + out("eval").string(),
                          "--eval.pool_total=40", "--eval.weights={\"sa\":0.5,\"bo\":0.5}",
                          "--eval.tasks=[{\"name\":\"self\",\"path\":\"" + out("task.jsonl").string() + "\"}]",
                          "--eval.strategies=[\"bm25\",\"dense\"]", "--eval.seed=3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(testing::read_file(out("eval") / "eval_report.tsv"),
            "task\tstrategy\tP@1\tP@5\tP@10\nself\tbm25\t100\t100\t100\nself\tdense\t100\t100\t100\n");
}

}  // namespace
}  // namespace parmine
