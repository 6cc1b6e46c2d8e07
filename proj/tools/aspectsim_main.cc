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

// aspectsim: command-line driver for curation, scoring and evaluation.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "aspectsim/errors.h"
#include "aspectsim/pipeline.h"

namespace {

using aspectsim::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitPipeline = 1;
constexpr int kExitUsage = 2;

struct Flags {
  std::string config;
  std::vector<std::string> modes;
  std::vector<std::string> methods;
  std::vector<std::string> groupings;
  std::string cassette;
  bool replay = false;
  bool record = false;
  bool live = false;
  std::optional<std::size_t> jobs;
  std::string out;
  std::string documents;
  std::string pairs;
  std::string corpus;
  std::string scores;
  std::string annotations;
  std::string chat_model;
  std::string embedding_model;
  std::string base_url;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_pairs;
  bool verbose = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--cassette", f.cassette, "Record/replay cassette (JSONL)");
  auto* replay = cmd->add_flag("--replay", f.replay, "Serve model calls from the cassette only");
  auto* record = cmd->add_flag("--record", f.record, "Call the backend and append to the cassette");
  auto* live = cmd->add_flag("--live", f.live, "Call the backend without a cassette");
  replay->excludes(record)->excludes(live);
  record->excludes(live);
  cmd->add_option("--jobs", f.jobs, "Concurrent requests")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output file or directory");
  cmd->add_option("--chat-model", f.chat_model, "Chat model name");
  cmd->add_option("--embedding-model", f.embedding_model, "Embedding model name");
  cmd->add_option("--base-url", f.base_url, "OpenAI-compatible endpoint for chat and embeddings");
  cmd->add_flag("-v,--verbose", f.verbose, "Debug logging");
}

RunConfig resolve(const Flags& f) {
  RunConfig config;
  if (!f.config.empty()) config = aspectsim::load_config(f.config);
  nlohmann::json overlay = nlohmann::json::object();
  if (!f.modes.empty()) overlay["modes"] = f.modes;
  if (!f.methods.empty()) overlay["methods"] = f.methods;
  if (!f.groupings.empty()) overlay["groupings"] = f.groupings;
  if (!f.cassette.empty()) overlay["cassette"] = f.cassette;
  if (f.replay) overlay["gateway"] = "replay";
  if (f.record) overlay["gateway"] = "record";
  if (f.live) overlay["gateway"] = "live";
  if (f.jobs) overlay["jobs"] = *f.jobs;
  if (!f.out.empty()) overlay["out"] = f.out;
  if (!f.documents.empty()) overlay["documents"] = f.documents;
  if (!f.pairs.empty()) overlay["pairs"] = f.pairs;
  if (!f.corpus.empty()) overlay["corpus"] = f.corpus;
  if (!f.scores.empty()) overlay["scores"] = f.scores;
  if (!f.annotations.empty()) overlay["annotations"] = f.annotations;
  if (!f.chat_model.empty()) overlay["chat_model"] = f.chat_model;
  if (!f.embedding_model.empty()) overlay["embedding_model"] = f.embedding_model;
  if (!f.base_url.empty()) {
    overlay["chat_base_url"] = f.base_url;
    overlay["embedding_base_url"] = f.base_url;
  }
  if (f.seed) overlay["seed"] = *f.seed;
  if (f.max_pairs) overlay["max_pairs"] = *f.max_pairs;
  aspectsim::apply_config_json(config, overlay);
  return config;
}

int run(CLI::App& app, const Flags& flags) {
  if (flags.verbose) spdlog::set_level(spdlog::level::debug);
  const RunConfig config = resolve(flags);
  const std::string name = app.get_subcommands().front()->get_name();

  if (name == "evaluate") {
    const auto summary = aspectsim::cmd_evaluate(config);
    fmt::print("evaluated {} configurations into {} ({} warnings)\n",
               summary.configurations, config.out.string(), summary.warnings.size());
    return kExitOk;
  }
  if (name == "report") {
    std::cout << aspectsim::stats_to_csv(aspectsim::cmd_report(config));
    return kExitOk;
  }

  auto gateway = aspectsim::make_gateway(config);
  if (name == "sample") {
    const auto pairs = aspectsim::cmd_sample(config, *gateway);
    fmt::print("sampled {} document pairs into {}\n", pairs.size(), config.out.string());
  } else if (name == "curate") {
    std::cout << aspectsim::stats_to_csv(aspectsim::cmd_curate(config, *gateway));
  } else if (name == "score") {
    const auto s = aspectsim::cmd_score(config, *gateway);
    fmt::print("requested {} rows: {} reused, {} computed, {} failed\n", s.requested,
               s.reused, s.computed, s.failed);
    if (s.failed > 0) return kExitPipeline;
  }
  spdlog::debug("backend calls: {}", gateway->backend_calls());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("aspectsim"));
  spdlog::set_pattern("%^%l%$: %v");

  CLI::App app{"Aspect-conditioned document similarity: curation, scoring and evaluation"};
  app.require_subcommand(1);
  Flags flags;

  auto* curate = app.add_subcommand("curate", "Curate aspect instances from document pairs");
  add_common(curate, flags);
  curate->add_option("--documents", flags.documents, "Documents JSONL");
  curate->add_option("--pairs", flags.pairs, "Pairs JSONL (sampled inline when absent)");
  curate->add_option("--seed", flags.seed, "Seed for pair subsetting");
  curate->add_option("--max-pairs", flags.max_pairs, "Keep a seeded subset of sampled pairs");

  auto* sample = app.add_subcommand("sample", "Sample document pairs by embedding cosine");
  add_common(sample, flags);
  sample->add_option("--documents", flags.documents, "Documents JSONL");
  sample->add_option("--seed", flags.seed, "Seed for pair subsetting");
  sample->add_option("--max-pairs", flags.max_pairs, "Keep a seeded subset of sampled pairs");

  auto* score = app.add_subcommand("score", "Score corpus instances");
  add_common(score, flags);
  score->add_option("--corpus", flags.corpus, "Corpus JSONL");
  score->add_option("--methods", flags.methods, "AspectSim, LBS, WDS, PSD")->delimiter(',');
  score->add_option("--mode", flags.modes, "sentence, span, summarize")->delimiter(',');

  auto* evaluate = app.add_subcommand("evaluate", "Meta-evaluate scores against gold labels");
  add_common(evaluate, flags);
  evaluate->add_option("--corpus", flags.corpus, "Corpus JSONL");
  evaluate->add_option("--scores", flags.scores, "Scores JSONL");
  evaluate->add_option("--annotations", flags.annotations, "Human labels JSONL for kappa");
  evaluate->add_option("--groupings", flags.groupings,
                       "dataset, aspect_length, doc_length, position, model_size")
      ->delimiter(',');

  auto* report = app.add_subcommand("report", "Dataset statistics as CSV");
  add_common(report, flags);
  report->add_option("--corpus", flags.corpus, "Corpus JSONL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return run(app, flags);
  } catch (const aspectsim::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitPipeline;
  }
}
