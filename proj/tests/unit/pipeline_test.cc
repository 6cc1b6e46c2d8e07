// Copyright 2026 The AspectSim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aspectsim/pipeline.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "aspectsim/errors.h"
#include "fake_backend.h"
#include "mini_pipeline.h"

namespace aspectsim {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using testing::FakeBackend;

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("aspectsim_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  fs::path write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

  // Three instances over two documents: Highly, Marginally, Not Found.
  fs::path small_corpus() {
    return write("corpus.jsonl",
                 R"({"kind":"document","id":"a","text":"Battery lasts two days. The screen is dim. Price is low."})" "\n"
                 R"({"kind":"document","id":"b","text":"Battery lasts a day. The screen is bright. Support was rude."})" "\n"
                 R"({"kind":"instance","id":"i1","doc_a":"a","doc_b":"b","aspect":"battery","evidence_a":{"indices":[0],"text":"Battery lasts two days."},"evidence_b":{"indices":[0],"text":"Battery lasts a day."},"label":"Highly Similar"})" "\n"
                 R"({"kind":"instance","id":"i2","doc_a":"a","doc_b":"b","aspect":"screen","evidence_a":{"indices":[1],"text":"The screen is dim."},"evidence_b":{"indices":[1],"text":"The screen is bright."},"label":"Marginally Similar"})" "\n"
                 R"({"kind":"instance","id":"i3","doc_a":"a","doc_b":"b","aspect":"price","evidence_a":{"indices":[2],"text":"Price is low."},"evidence_b":{"indices":[],"text":""},"label":"Not Found"})" "\n");
  }

  RunConfig live_config() {
    RunConfig c;
    c.chat_model = "chat-8b";
    c.embedding_model = "emb";
    c.gateway_mode = GatewayMode::kLive;
    c.jobs = 2;
    return c;
  }

  fs::path dir_;
};

TEST_F(PipelineTest, ConfigFileAndUnknownKeysValues) {
  const fs::path cfg = write("c.json", R"({"chat_model":"m","methods":["WDS","PSD"],"modes":["span"],"jobs":3,"gateway":"replay","seed":42})");
  const RunConfig c = load_config(cfg);
  EXPECT_EQ(c.chat_model, "m");
  EXPECT_EQ(c.methods, (std::vector<Method>{Method::kWds, Method::kPsd}));
  EXPECT_EQ(c.modes, (std::vector<ExtractionMode>{ExtractionMode::kSpanLevel}));
  EXPECT_EQ(c.jobs, 3u);
  EXPECT_EQ(c.gateway_mode, GatewayMode::kReplay);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_THROW(load_config(write("bad.json", R"({"methods":["Nope"]})")), ConfigError);
  EXPECT_THROW(load_config(write("bad2.json", "{not json")), ConfigError);
  EXPECT_THROW(load_config(dir_ / "missing.json"), ConfigError);
}

TEST_F(PipelineTest, ReplayNeedsExistingCassette) {
  RunConfig c;
  c.gateway_mode = GatewayMode::kReplay;
  c.cassette = dir_ / "absent.jsonl";
  EXPECT_THROW(make_gateway(c), ConfigError);
}

TEST_F(PipelineTest, RecordWithoutCredentialsFailsBeforeWork) {
  RunConfig c;
  c.gateway_mode = GatewayMode::kRecord;
  c.cassette = dir_ / "new.jsonl";
  c.chat_base_url = "http://127.0.0.1:1";
  c.api_key_env = "ASPECTSIM_TEST_SURELY_UNSET_KEY";
  ::unsetenv(c.api_key_env.c_str());
  EXPECT_THROW(make_gateway(c), ConfigError);
  EXPECT_FALSE(fs::exists(c.cassette));
}

TEST_F(PipelineTest, EmptyDocumentsFileIsConfigError) {
  RunConfig c = live_config();
  c.documents = write("docs.jsonl", "");
  c.out = dir_ / "corpus.jsonl";
  auto gw = make_gateway(c, std::make_shared<FakeBackend>());
  EXPECT_THROW(cmd_curate(c, *gw), ConfigError);
}

TEST_F(PipelineTest, WdsOnlyGivesOneRowPerInstance) {
  RunConfig c = live_config();
  c.corpus = small_corpus();
  c.methods = {Method::kWds};
  c.out = dir_ / "scores.jsonl";
  auto backend = std::make_shared<FakeBackend>();
  auto gw = make_gateway(c, backend);
  const ScoreSummary s = cmd_score(c, *gw);
  EXPECT_EQ(s.requested, 3u);
  EXPECT_EQ(s.computed, 3u);
  EXPECT_EQ(read_scores(c.out).size(), 3u);
  EXPECT_EQ(backend->chat_calls, 0);
}

TEST_F(PipelineTest, RowCountIsInstancesTimesMethodsTimesModes) {
  RunConfig c = live_config();
  c.corpus = small_corpus();
  c.methods = {Method::kWds, Method::kPsd, Method::kLbs};
  c.modes = {ExtractionMode::kSentenceLevel, ExtractionMode::kSummarize};
  c.out = dir_ / "scores.jsonl";
  auto gw = make_gateway(c, std::make_shared<FakeBackend>(
                                [](const ChatRequest&) { return "0.5"; },
                                [](const std::string& t) {
                                  return std::vector<double>{double(t.size()), double(t[0]), 1.0};
                                }));
  cmd_score(c, *gw);
  EXPECT_EQ(read_scores(c.out).size(), 3u * 3u * 2u);
}

TEST_F(PipelineTest, RerunComputesOnlyMissingRows) {
  RunConfig c = live_config();
  c.corpus = small_corpus();
  c.methods = {Method::kWds};
  c.out = dir_ / "scores.jsonl";
  {
    auto gw = make_gateway(c, std::make_shared<FakeBackend>());
    cmd_score(c, *gw);
  }
  auto rows = read_scores(c.out);
  rows.erase(rows.begin() + 1);
  write_scores(rows, c.out);
  auto backend = std::make_shared<FakeBackend>();
  auto gw = make_gateway(c, backend);
  const ScoreSummary s = cmd_score(c, *gw);
  EXPECT_EQ(s.reused, 2u);
  EXPECT_EQ(s.computed, 1u);
  EXPECT_EQ(backend->embedded_texts, 2u);
  const auto after = read_scores(c.out);
  ASSERT_EQ(after.size(), 3u);
  EXPECT_EQ(after[1].instance_id, "i2");
}

TEST_F(PipelineTest, UnparseableLbsRowsAreLeftOutAndCounted) {
  RunConfig c = live_config();
  c.corpus = small_corpus();
  c.methods = {Method::kLbs};
  c.out = dir_ / "scores.jsonl";
  auto gw = make_gateway(c, std::make_shared<FakeBackend>([](const ChatRequest& r) {
    return r.user_prompt.find("Aspect: screen") != std::string::npos ? "no idea" : "0.7";
  }));
  const ScoreSummary s = cmd_score(c, *gw);
  EXPECT_EQ(s.failed, 1u);
  EXPECT_EQ(read_scores(c.out).size(), 2u);
}

TEST_F(PipelineTest, ScoresMatchingGoldRanksGiveSpearmanOne) {
  RunConfig c;
  c.corpus = small_corpus();
  c.scores = write("scores.jsonl",
                   R"({"instance_id":"i1","method":"WDS","mode":"sentence","llm":"","embedder":"e","value":0.9,"abstained":false,"evidence_a":null,"evidence_b":null})" "\n"
                   R"({"instance_id":"i2","method":"WDS","mode":"sentence","llm":"","embedder":"e","value":0.4,"abstained":false,"evidence_a":null,"evidence_b":null})" "\n"
                   R"({"instance_id":"i3","method":"WDS","mode":"sentence","llm":"","embedder":"e","value":0.1,"abstained":false,"evidence_a":null,"evidence_b":null})" "\n");
  c.out = dir_ / "report";
  cmd_evaluate(c);
  const json summary = json::parse(testing::read_file(c.out / "summary.json"));
  const json& cfg = summary["configurations"][0];
  EXPECT_DOUBLE_EQ(cfg["spearman_with_not_found"].get<double>(), 1.0);
  EXPECT_TRUE(fs::exists(c.out / "report_dataset.csv"));
  EXPECT_EQ(testing::read_file(c.out / "report_dataset.csv").substr(0, report_csv_header().size()),
            report_csv_header());
}

TEST_F(PipelineTest, NoNotFoundRowsReportRobustnessNotApplicable) {
  RunConfig c;
  c.corpus = small_corpus();
  c.scores = write("scores.jsonl",
                   R"({"instance_id":"i1","method":"AspectSim","mode":"sentence","llm":"x-8b","embedder":"e","value":0.9,"abstained":false,"evidence_a":{"indices":[0],"text":"Battery lasts two days."},"evidence_b":{"indices":[0],"text":"Battery lasts a day."}})" "\n"
                   R"({"instance_id":"i2","method":"AspectSim","mode":"sentence","llm":"x-8b","embedder":"e","value":0.4,"abstained":false,"evidence_a":{"indices":[1],"text":"The screen is dim."},"evidence_b":{"indices":[2],"text":"Support was rude."}})" "\n");
  c.out = dir_ / "report";
  cmd_evaluate(c);
  const json cfg = json::parse(testing::read_file(c.out / "summary.json"))["configurations"][0];
  EXPECT_EQ(cfg["robustness_pct"], "n/a");
  EXPECT_EQ(cfg["not_found"], 0);
  EXPECT_DOUBLE_EQ(cfg["spearman_graded_only"].get<double>(), 1.0);
  EXPECT_EQ(cfg["outcomes"]["BM"], 1);
  EXPECT_EQ(cfg["outcomes"]["S-MM"], 1);
}

TEST_F(PipelineTest, CurateTwoFixturePairsInReplay) {
  const fs::path fixture = testing::mini_fixture_dir();
  RunConfig c = load_config(fixture / "config.json");
  c.gateway_mode = GatewayMode::kReplay;
  c.cassette = fixture / "cassette.jsonl";
  c.documents = fixture / "documents.jsonl";
  const auto pairs = read_pairs(fixture / "pairs.jsonl");
  write_pairs({pairs[0], pairs[1]}, dir_ / "pairs.jsonl");
  c.pairs = dir_ / "pairs.jsonl";
  c.out = dir_ / "corpus.jsonl";
  auto gw = make_gateway(c);
  const StatsReport stats = cmd_curate(c, *gw);

  // Expected count straight from the golden corpus file.
  std::size_t expected = 0;
  std::ifstream golden(fixture / "golden" / "corpus.jsonl");
  std::string line;
  while (std::getline(golden, line)) {
    const json j = json::parse(line);
    if (j["kind"] != "instance") continue;
    const auto a = j["doc_a"].get<std::string>();
    if (a == pairs[0].doc_a || a == pairs[1].doc_a) ++expected;
  }
  EXPECT_GT(expected, 0u);
  EXPECT_EQ(stats.instance_count, expected);
  EXPECT_EQ(load_corpus(c.out).instances().size(), expected);
}

TEST_F(PipelineTest, SamplePairsThroughGateway) {
  RunConfig c = live_config();
  c.documents = write("docs.jsonl",
                      R"({"kind":"document","id":"x","text":"aa"})" "\n"
                      R"({"kind":"document","id":"y","text":"bbbb"})" "\n"
                      R"({"kind":"document","id":"z","text":"bbbbbbbbbbbbbbbbbbbbbbbbbbbbbb"})" "\n");
  c.sample_low = 0.9;
  c.sample_high = 0.95;
  c.out = dir_ / "pairs.jsonl";
  // Vectors (len, 1): cos(x,y) = 0.9762, cos(x,z) = 0.9088, cos(y,z) = 0.9777.
  auto gw = make_gateway(c, std::make_shared<FakeBackend>());
  const auto pairs = cmd_sample(c, *gw);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].doc_a, "x");
  EXPECT_EQ(pairs[0].doc_b, "z");
  EXPECT_EQ(read_pairs(c.out), pairs);
}

TEST_F(PipelineTest, MaxPairsKeepsSeededSubset) {
  RunConfig c = live_config();
  std::string docs;
  for (int i = 0; i < 6; ++i) {
    docs += R"({"kind":"document","id":"d)" + std::to_string(i) + R"(","text":")" +
            std::string(10 + i, 'a') + "\"}\n";
  }
  c.documents = write("docs.jsonl", docs);
  c.sample_low = 0.0;
  c.sample_high = 1.0;
  c.max_pairs = 4;
  c.seed = 17;
  c.out = dir_ / "pairs.jsonl";
  auto gw = make_gateway(c, std::make_shared<FakeBackend>());
  const auto first = cmd_sample(c, *gw);
  EXPECT_EQ(first.size(), 4u);
  EXPECT_EQ(cmd_sample(c, *gw), first);
}

}  // namespace
}  // namespace aspectsim
