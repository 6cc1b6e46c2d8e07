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

// End-to-end commands behind the `aspectsim` CLI. Every command reads and
// writes files named in a RunConfig; model access goes through a Gateway so
// runs can be recorded and replayed.
//
// Configuration file keys (JSON object, all optional):
//
//   chat_base_url, embedding_base_url   OpenAI-compatible endpoints
//   chat_model, embedding_model         model names sent to the endpoints
//   api_key_env                         credential variable (ASPECTSIM_API_KEY)
//   decoding                            object merged into chat requests
//   cassette, gateway ("live"|"record"|"replay"), jobs
//   documents, pairs, corpus, scores, annotations, out
//   methods   ["AspectSim","LBS","WDS","PSD"]
//   modes     ["sentence","span","summarize"]
//   groupings ["dataset","aspect_length","doc_length","position","model_size"]
//   abstention_score, max_embed_bytes, sample_low, sample_high, max_pairs,
//   seed, timeout_seconds

#ifndef ASPECTSIM_PIPELINE_H_
#define ASPECTSIM_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aspectsim/corpus.h"
#include "aspectsim/gateway.h"
#include "aspectsim/meta_eval.h"
#include "aspectsim/metric.h"

namespace aspectsim {

struct RunConfig {
  std::string chat_base_url;
  std::string embedding_base_url;
  std::string chat_model;
  std::string embedding_model;
  std::string api_key_env = "ASPECTSIM_API_KEY";
  nlohmann::json decoding = nlohmann::json::object();
  int timeout_seconds = 120;

  std::filesystem::path cassette;
  GatewayMode gateway_mode = GatewayMode::kLive;
  std::size_t jobs = 8;

  std::filesystem::path documents;
  std::filesystem::path pairs;
  std::filesystem::path corpus;
  std::filesystem::path scores;
  std::filesystem::path annotations;
  std::filesystem::path out;

  std::vector<Method> methods = {Method::kAspectSim};
  std::vector<ExtractionMode> modes = {ExtractionMode::kSentenceLevel};
  std::vector<Grouping> groupings = {Grouping::kDataset, Grouping::kAspectLength,
                                     Grouping::kDocLengthPair,
                                     Grouping::kSentencePosition,
                                     Grouping::kModelSizeBand};
  double abstention_score = 0.0;
  std::size_t max_embed_bytes = 0;
  double sample_low = 0.6;
  double sample_high = 0.9;
  // 0 keeps every sampled pair; otherwise a seeded subset of this size.
  std::size_t max_pairs = 0;
  std::uint64_t seed = 0;
};

// Overlays the keys present in `j` onto `config`. Throws ConfigError.
void apply_config_json(RunConfig& config, const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

GatewayMode gateway_mode_from_string(const std::string& text);

// Builds the gateway for `config`: replay needs an existing cassette; record
// and live need the credential variable set. Throws ConfigError before any
// request is made.
std::unique_ptr<Gateway> make_gateway(const RunConfig& config);
// Same checks, with an injected backend (tests, alternative transports).
std::unique_ptr<Gateway> make_gateway(const RunConfig& config,
                                      std::shared_ptr<Backend> backend);

std::vector<DocumentPair> read_pairs(const std::filesystem::path& path);
void write_pairs(const std::vector<DocumentPair>& pairs,
                 const std::filesystem::path& path);

// sample: documents -> pairs file at config.out.
std::vector<DocumentPair> cmd_sample(const RunConfig& config, Gateway& gateway);

// curate: documents (+ pairs, or inline sampling) -> corpus file at
// config.out. Pairs are curated concurrently and merged in pair order.
// Throws ConfigError for an empty documents file.
StatsReport cmd_curate(const RunConfig& config, Gateway& gateway);

struct ScoreRow {
  std::string instance_id;
  Method method = Method::kAspectSim;
  ExtractionMode mode = ExtractionMode::kSentenceLevel;
  std::string llm;
  std::string embedder;
  double value = 0.0;
  bool abstained = false;
  std::optional<Evidence> evidence_a;
  std::optional<Evidence> evidence_b;

  std::string key() const;
};

nlohmann::json to_json(const ScoreRow& row);
ScoreRow score_row_from_json(const nlohmann::json& j);
std::vector<ScoreRow> read_scores(const std::filesystem::path& path);
void write_scores(const std::vector<ScoreRow>& rows,
                  const std::filesystem::path& path);

struct ScoreSummary {
  std::size_t requested = 0;
  std::size_t reused = 0;
  std::size_t computed = 0;
  std::size_t failed = 0;
};

// score: corpus -> scores file at config.out. One row per instance x method x
// mode. Rows already present in the output are reused; rows whose model
// reply cannot be parsed are left out (and counted as failed) so a rerun
// retries them.
ScoreSummary cmd_score(const RunConfig& config, Gateway& gateway);

struct EvaluateSummary {
  std::size_t configurations = 0;
  std::vector<std::string> warnings;
};

// evaluate: corpus + scores -> config.out directory with summary.json and
// report_<grouping>.csv for each grouping.
EvaluateSummary cmd_evaluate(const RunConfig& config);

// Header shared by every report_<grouping>.csv.
std::string report_csv_header();

// report: dataset statistics of config.corpus as CSV at config.out.
StatsReport cmd_report(const RunConfig& config);

}  // namespace aspectsim

#endif  // ASPECTSIM_PIPELINE_H_
