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

#include "mini_pipeline.h"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aspectsim/errors.h"

#ifndef ASPECTSIM_MINI_FIXTURE_DIR
#error "ASPECTSIM_MINI_FIXTURE_DIR must be defined by the build"
#endif

namespace aspectsim::testing {

namespace fs = std::filesystem;

fs::path mini_fixture_dir() { return ASPECTSIM_MINI_FIXTURE_DIR; }

const std::vector<std::string>& mini_artifacts() {
  static const std::vector<std::string> names = {
      "corpus.jsonl",
      "stats.csv",
      "annotations.jsonl",
      "scores.jsonl",
      "report/summary.json",
      "report/summary.csv",
      "report/report_dataset.csv",
      "report/report_aspect_length.csv",
      "report/report_doc_length.csv",
      "report/report_position.csv",
      "report/report_model_size.csv",
  };
  return names;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_synthetic_annotations(const Corpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  std::size_t graded = 0;
  for (const AspectInstance& inst : corpus.instances()) {
    SimilarityLabel label = inst.gold_label;
    if (is_graded(label) && graded++ % 4 == 3) {
      label = label == SimilarityLabel::kHighlySimilar
                  ? SimilarityLabel::kSomewhatSimilar
              : label == SimilarityLabel::kSomewhatSimilar
                  ? SimilarityLabel::kMarginallySimilar
                  : SimilarityLabel::kSomewhatSimilar;
    }
    out << nlohmann::json{{"instance_id", inst.id},
                          {"label", std::string(to_string(label))}}
               .dump()
        << '\n';
  }
}

MiniRun run_mini_pipeline(const fs::path& out_dir, const fs::path& cassette,
                          std::shared_ptr<Backend> backend, std::size_t jobs) {
  const fs::path fixture = mini_fixture_dir();
  fs::create_directories(out_dir);
  RunConfig config = load_config(fixture / "config.json");
  if (jobs > 0) config.jobs = jobs;
  config.cassette = cassette;
  config.gateway_mode = backend ? GatewayMode::kRecord : GatewayMode::kReplay;
  auto gateway = make_gateway(config, backend);

  MiniRun run;
  run.out_dir = out_dir;

  RunConfig curate = config;
  curate.documents = fixture / "documents.jsonl";
  curate.pairs = fixture / "pairs.jsonl";
  curate.out = out_dir / "corpus.jsonl";
  run.stats = cmd_curate(curate, *gateway);

  RunConfig report = config;
  report.corpus = curate.out;
  report.out = out_dir / "stats.csv";
  cmd_report(report);

  write_synthetic_annotations(load_corpus(curate.out), out_dir / "annotations.jsonl");

  RunConfig score = config;
  score.corpus = curate.out;
  score.out = out_dir / "scores.jsonl";
  run.scores = cmd_score(score, *gateway);

  RunConfig evaluate = config;
  evaluate.corpus = curate.out;
  evaluate.scores = score.out;
  evaluate.annotations = out_dir / "annotations.jsonl";
  evaluate.out = out_dir / "report";
  run.evaluation = cmd_evaluate(evaluate);
  return run;
}

}  // namespace aspectsim::testing
