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

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "aspectsim/curator.h"
#include "aspectsim/errors.h"
#include "aspectsim/openai_backend.h"
#include "aspectsim/parallel.h"
#include "aspectsim/text.h"

namespace aspectsim {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const json& j, const char* key, Parse parse) {
  if (!j.is_array()) throw ConfigError(fmt::format("\"{}\" must be a list", key));
  std::vector<T> out;
  for (const json& item : j) {
    if (!item.is_string()) {
      throw ConfigError(fmt::format("\"{}\" entries must be strings", key));
    }
    auto value = parse(item.get<std::string>());
    if (!value) {
      throw ConfigError(fmt::format("unknown {} entry \"{}\"", key,
                                    item.get<std::string>()));
    }
    out.push_back(*value);
  }
  if (out.empty()) throw ConfigError(fmt::format("\"{}\" is empty", key));
  return out;
}

void require_output(const RunConfig& config, std::string_view command) {
  if (config.out.empty()) {
    throw ConfigError(fmt::format("{}: no output path (--out)", command));
  }
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string csv_number(const std::optional<double>& v) {
  return v ? fmt::format("{:.6f}", *v) : std::string();
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) {
    return std::string(text);
  }
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted.push_back('"');
    quoted.push_back(c);
  }
  quoted.push_back('"');
  return quoted;
}

json evidence_json(const std::optional<Evidence>& ev) {
  if (!ev) return nullptr;
  return json{{"indices", ev->sentence_indices}, {"text", ev->text}};
}

std::optional<Evidence> evidence_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  Evidence ev;
  ev.sentence_indices = j.value("indices", std::vector<int>{});
  ev.text = j.value("text", "");
  return ev;
}

bool uses_chat(Method m) { return m == Method::kAspectSim || m == Method::kLbs; }
bool uses_embedder(Method m) { return m != Method::kLbs; }

}  // namespace

GatewayMode gateway_mode_from_string(const std::string& text) {
  const std::string lowered = to_lower(text);
  if (lowered == "live") return GatewayMode::kLive;
  if (lowered == "record") return GatewayMode::kRecord;
  if (lowered == "replay") return GatewayMode::kReplay;
  throw ConfigError("unknown gateway mode \"" + text + "\"");
}

void apply_config_json(RunConfig& config, const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  try {
    auto str = [&](const char* key, std::string& field) {
      if (j.contains(key)) field = j.at(key).get<std::string>();
    };
    auto path = [&](const char* key, fs::path& field) {
      if (j.contains(key)) field = j.at(key).get<std::string>();
    };
    str("chat_base_url", config.chat_base_url);
    str("embedding_base_url", config.embedding_base_url);
    str("chat_model", config.chat_model);
    str("embedding_model", config.embedding_model);
    str("api_key_env", config.api_key_env);
    if (j.contains("decoding")) {
      if (!j.at("decoding").is_object()) {
        throw ConfigError("\"decoding\" must be an object");
      }
      config.decoding = j.at("decoding");
    }
    if (j.contains("timeout_seconds")) {
      config.timeout_seconds = j.at("timeout_seconds").get<int>();
    }
    path("cassette", config.cassette);
    if (j.contains("gateway")) {
      config.gateway_mode = gateway_mode_from_string(j.at("gateway").get<std::string>());
    }
    if (j.contains("jobs")) config.jobs = j.at("jobs").get<std::size_t>();
    path("documents", config.documents);
    path("pairs", config.pairs);
    path("corpus", config.corpus);
    path("scores", config.scores);
    path("annotations", config.annotations);
    path("out", config.out);
    if (j.contains("methods")) {
      config.methods = parse_list<Method>(j.at("methods"), "methods",
                                          [](const std::string& s) {
                                            return method_from_string(s);
                                          });
    }
    if (j.contains("modes")) {
      config.modes = parse_list<ExtractionMode>(
          j.at("modes"), "modes",
          [](const std::string& s) { return mode_from_string(s); });
    }
    if (j.contains("groupings")) {
      config.groupings = parse_list<Grouping>(
          j.at("groupings"), "groupings",
          [](const std::string& s) { return grouping_from_string(s); });
    }
    if (j.contains("abstention_score")) {
      config.abstention_score = j.at("abstention_score").get<double>();
    }
    if (j.contains("max_embed_bytes")) {
      config.max_embed_bytes = j.at("max_embed_bytes").get<std::size_t>();
    }
    if (j.contains("sample_low")) config.sample_low = j.at("sample_low").get<double>();
    if (j.contains("sample_high")) config.sample_high = j.at("sample_high").get<double>();
    if (j.contains("max_pairs")) config.max_pairs = j.at("max_pairs").get<std::size_t>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration: ") + e.what());
  }
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + path.string());
  RunConfig config;
  apply_config_json(config, j);
  return config;
}

std::unique_ptr<Gateway> make_gateway(const RunConfig& config,
                                      std::shared_ptr<Backend> backend) {
  GatewayOptions options;
  options.mode = config.gateway_mode;
  options.max_in_flight = std::max<std::size_t>(config.jobs, 1);
  std::shared_ptr<Cassette> cassette;
  switch (config.gateway_mode) {
    case GatewayMode::kReplay:
      if (config.cassette.empty() || !fs::exists(config.cassette)) {
        throw ConfigError("replay mode needs an existing cassette (--cassette)");
      }
      cassette = std::make_shared<Cassette>(Cassette::load(config.cassette));
      return std::make_unique<Gateway>(options, nullptr, cassette);
    case GatewayMode::kRecord:
      if (config.cassette.empty()) {
        throw ConfigError("record mode needs a cassette path (--cassette)");
      }
      cassette = std::make_shared<Cassette>(
          Cassette::open_for_append(config.cassette));
      break;
    case GatewayMode::kLive:
      break;
  }
  return std::make_unique<Gateway>(options, std::move(backend), cassette);
}

std::unique_ptr<Gateway> make_gateway(const RunConfig& config) {
  std::shared_ptr<Backend> backend;
  if (config.gateway_mode != GatewayMode::kReplay) {
    const char* key = std::getenv(config.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw ConfigError(fmt::format("{} mode needs credentials in ${}",
                                    config.gateway_mode == GatewayMode::kRecord
                                        ? "record"
                                        : "live",
                                    config.api_key_env));
    }
    if (config.chat_base_url.empty() && config.embedding_base_url.empty()) {
      throw ConfigError("no backend endpoint configured (chat_base_url)");
    }
    backend = std::make_shared<OpenAiBackend>(OpenAiEndpoint{
        config.chat_base_url,
        config.embedding_base_url.empty() ? config.chat_base_url
                                          : config.embedding_base_url,
        key, std::chrono::seconds(config.timeout_seconds)});
  }
  return make_gateway(config, std::move(backend));
}

std::vector<DocumentPair> read_pairs(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open pairs file " + path.string(), 0);
  std::vector<DocumentPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      pairs.push_back({j.at("doc_a").get<std::string>(),
                       j.at("doc_b").get<std::string>(), j.value("cosine", 0.0)});
    } catch (const json::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return pairs;
}

void write_pairs(const std::vector<DocumentPair>& pairs, const fs::path& path) {
  std::ofstream out = open_output(path);
  for (const DocumentPair& p : pairs) {
    out << json{{"doc_a", p.doc_a}, {"doc_b", p.doc_b}, {"cosine", p.cosine}}.dump()
        << '\n';
  }
}

namespace {

std::vector<DocumentPair> sample_from(const RunConfig& config,
                                      const Corpus& docs, Gateway& gateway) {
  if (config.embedding_model.empty()) {
    throw ConfigError("sampling needs an embedding model");
  }
  Scorer scorer(gateway, {config.chat_model, config.embedding_model,
                          config.abstention_score, config.max_embed_bytes,
                          config.decoding});
  auto embed = [&](const std::vector<std::string>& texts) {
    std::vector<std::string> clipped;
    clipped.reserve(texts.size());
    for (const auto& t : texts) clipped.push_back(truncate_utf8(t, config.max_embed_bytes));
    return gateway.embed(clipped, config.embedding_model);
  };
  std::vector<DocumentPair> pairs =
      sample_pairs(docs.documents(), embed, config.sample_low, config.sample_high);
  if (config.max_pairs > 0 && pairs.size() > config.max_pairs) {
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(config.seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(config.max_pairs);
    std::sort(order.begin(), order.end());
    std::vector<DocumentPair> subset;
    for (std::size_t i : order) subset.push_back(pairs[i]);
    pairs = std::move(subset);
  }
  return pairs;
}

Corpus load_documents(const RunConfig& config) {
  if (config.documents.empty()) throw ConfigError("no documents file (--documents)");
  if (!fs::exists(config.documents)) {
    throw ConfigError("documents file not found: " + config.documents.string());
  }
  Corpus docs = load_corpus(config.documents);
  if (docs.documents().empty()) {
    throw ConfigError("documents file is empty: " + config.documents.string());
  }
  return docs;
}

}  // namespace

std::vector<DocumentPair> cmd_sample(const RunConfig& config, Gateway& gateway) {
  require_output(config, "sample");
  const Corpus docs = load_documents(config);
  auto pairs = sample_from(config, docs, gateway);
  write_pairs(pairs, config.out);
  return pairs;
}

StatsReport cmd_curate(const RunConfig& config, Gateway& gateway) {
  require_output(config, "curate");
  if (config.chat_model.empty()) throw ConfigError("curation needs a chat model");
  const Corpus docs = load_documents(config);
  const std::vector<DocumentPair> pairs =
      config.pairs.empty() ? sample_from(config, docs, gateway)
                           : read_pairs(config.pairs);
  for (const DocumentPair& p : pairs) {
    docs.document(p.doc_a);
    docs.document(p.doc_b);
  }

  Curator curator(gateway, {config.chat_model, config.decoding});
  auto per_pair = parallel_map(pairs.size(), config.jobs, [&](std::size_t i) {
    const Document& a = docs.document(pairs[i].doc_a);
    const Document& b = docs.document(pairs[i].doc_b);
    CurationResult graded = curator.curate_pair(a, b);
    NegativeResult negatives = curator.generate_negatives(a, b);
    return to_instances(a, b, graded, negatives);
  });

  Corpus out;
  for (const Document& d : docs.documents()) out.add_document(d);
  for (auto& instances : per_pair) {
    for (auto& inst : instances) out.add_instance(std::move(inst));
  }
  write_corpus(out, config.out);
  return dataset_stats(out);
}

std::string ScoreRow::key() const {
  return fmt::format("{}\x1f{}\x1f{}\x1f{}\x1f{}", instance_id, to_string(method),
                     to_string(mode), llm, embedder);
}

json to_json(const ScoreRow& row) {
  return json{{"instance_id", row.instance_id},
              {"method", std::string(to_string(row.method))},
              {"mode", std::string(to_string(row.mode))},
              {"llm", row.llm},
              {"embedder", row.embedder},
              {"value", row.value},
              {"abstained", row.abstained},
              {"evidence_a", evidence_json(row.evidence_a)},
              {"evidence_b", evidence_json(row.evidence_b)}};
}

ScoreRow score_row_from_json(const json& j) {
  ScoreRow row;
  row.instance_id = j.at("instance_id").get<std::string>();
  auto method = method_from_string(j.at("method").get<std::string>());
  auto mode = mode_from_string(j.at("mode").get<std::string>());
  if (!method || !mode) throw Error("unknown method or mode");
  row.method = *method;
  row.mode = *mode;
  row.llm = j.value("llm", "");
  row.embedder = j.value("embedder", "");
  row.value = j.at("value").get<double>();
  row.abstained = j.value("abstained", false);
  row.evidence_a = evidence_from(j.value("evidence_a", json()));
  row.evidence_b = evidence_from(j.value("evidence_b", json()));
  return row;
}

std::vector<ScoreRow> read_scores(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scores file " + path.string(), 0);
  std::vector<ScoreRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      rows.push_back(score_row_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(e.what(), line_no);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return rows;
}

void write_scores(const std::vector<ScoreRow>& rows, const fs::path& path) {
  std::ofstream out = open_output(path);
  for (const ScoreRow& row : rows) out << to_json(row).dump() << '\n';
}

ScoreSummary cmd_score(const RunConfig& config, Gateway& gateway) {
  require_output(config, "score");
  if (config.corpus.empty()) throw ConfigError("score: no corpus (--corpus)");
  for (Method m : config.methods) {
    if (uses_chat(m) && config.chat_model.empty()) {
      throw ConfigError(fmt::format("{} needs a chat model", to_string(m)));
    }
    if (uses_embedder(m) && config.embedding_model.empty()) {
      throw ConfigError(fmt::format("{} needs an embedding model", to_string(m)));
    }
  }
  const Corpus corpus = load_corpus(config.corpus);
  std::vector<ScoreRow> existing;
  if (fs::exists(config.out)) existing = read_scores(config.out);
  std::unordered_map<std::string, std::size_t> existing_index;
  for (std::size_t i = 0; i < existing.size(); ++i) {
    existing_index.emplace(existing[i].key(), i);
  }

  std::vector<ScoreRow> requested;
  for (const AspectInstance& inst : corpus.instances()) {
    for (Method method : config.methods) {
      for (ExtractionMode mode : config.modes) {
        ScoreRow row;
        row.instance_id = inst.id;
        row.method = method;
        row.mode = mode;
        row.llm = uses_chat(method) ? config.chat_model : "";
        row.embedder = uses_embedder(method) ? config.embedding_model : "";
        requested.push_back(std::move(row));
      }
    }
  }
  std::unordered_map<std::string, const AspectInstance*> by_id;
  for (const AspectInstance& inst : corpus.instances()) by_id.emplace(inst.id, &inst);

  ScoreSummary summary;
  summary.requested = requested.size();
  std::vector<std::size_t> todo;
  std::set<std::string> requested_keys;
  for (std::size_t i = 0; i < requested.size(); ++i) {
    requested_keys.insert(requested[i].key());
    auto it = existing_index.find(requested[i].key());
    if (it != existing_index.end()) {
      requested[i] = existing[it->second];
      ++summary.reused;
    } else {
      todo.push_back(i);
    }
  }

  Scorer scorer(gateway, {config.chat_model, config.embedding_model,
                          config.abstention_score, config.max_embed_bytes,
                          config.decoding});

  // PSD needs its normalizer over the whole corpus before any row is scored.
  std::optional<PsdNormalizer> psd_norm;
  std::vector<PsdTriple> psd_triples;
  std::unordered_map<std::string, std::size_t> psd_index;
  const bool need_psd = std::any_of(todo.begin(), todo.end(), [&](std::size_t i) {
    return requested[i].method == Method::kPsd;
  });
  if (need_psd) {
    psd_triples = parallel_map(
        corpus.instances().size(), config.jobs, [&](std::size_t i) {
          const AspectInstance& inst = corpus.instances()[i];
          auto v = gateway.embed(
              {inst.aspect.text(),
               scorer.embedding_text(corpus.document(inst.doc_a_id)),
               scorer.embedding_text(corpus.document(inst.doc_b_id))},
              config.embedding_model);
          return PsdTriple{v[0], v[1], v[2]};
        });
    for (std::size_t i = 0; i < corpus.instances().size(); ++i) {
      psd_index.emplace(corpus.instances()[i].id, i);
    }
    psd_norm = PsdNormalizer::calibrate(psd_triples);
  }

  auto computed = parallel_map(todo.size(), config.jobs,
                               [&](std::size_t k) -> std::optional<ScoreRow> {
    ScoreRow row = requested[todo[k]];
    const AspectInstance& inst = *by_id.at(row.instance_id);
    const Document& a = corpus.document(inst.doc_a_id);
    const Document& b = corpus.document(inst.doc_b_id);
    try {
      AspectScore score;
      switch (row.method) {
        case Method::kAspectSim:
          score = scorer.aspect_sim(a, b, inst.aspect, row.mode);
          row.evidence_a = score.evidence_a;
          row.evidence_b = score.evidence_b;
          break;
        case Method::kLbs:
          score = scorer.lbs_score(a, b, inst.aspect);
          break;
        case Method::kWds:
          score = scorer.wds_score(a, b);
          break;
        case Method::kPsd: {
          const PsdTriple& t = psd_triples[psd_index.at(inst.id)];
          score = psd_score(t.aspect, t.doc1, t.doc2, *psd_norm);
          break;
        }
      }
      row.value = score.value;
      row.abstained = score.abstained;
      return row;
    } catch (const UnparseableResponse& e) {
      spdlog::error("{} {} on {}: {}", to_string(row.method), to_string(row.mode),
                    row.instance_id, e.what());
      return std::nullopt;
    }
  });

  std::vector<ScoreRow> output;
  std::set<std::size_t> failed;
  for (std::size_t k = 0; k < todo.size(); ++k) {
    if (computed[k]) {
      requested[todo[k]] = std::move(*computed[k]);
      ++summary.computed;
    } else {
      failed.insert(todo[k]);
      ++summary.failed;
    }
  }
  for (std::size_t i = 0; i < requested.size(); ++i) {
    if (!failed.contains(i)) output.push_back(requested[i]);
  }
  for (const ScoreRow& row : existing) {
    if (!requested_keys.contains(row.key())) output.push_back(row);
  }
  write_scores(output, config.out);
  return summary;
}

std::string report_csv_header() {
  std::string header =
      "method,mode,llm,embedder,bin,rows,graded,not_found,"
      "spearman_with_not_found,spearman_graded_only,kappa,robustness_pct";
  for (RetrievalOutcome o : kAllOutcomes) header += fmt::format(",{}", to_string(o));
  header += ",mean_drift";
  return header;
}

namespace {

struct ConfigKey {
  Method method;
  ExtractionMode mode;
  std::string llm;
  std::string embedder;

  auto tie() const { return std::tie(method, mode, llm, embedder); }
  bool operator<(const ConfigKey& o) const { return tie() < o.tie(); }
};

std::string csv_line(const ConfigKey& key, std::string_view bin,
                     const EvalReport& r) {
  std::string line = fmt::format(
      "{},{},{},{},{},{},{},{},{},{},{},{}", to_string(key.method),
      to_string(key.mode), csv_field(key.llm), csv_field(key.embedder),
      csv_field(bin), r.rows, r.graded, r.not_found,
      csv_number(r.spearman_with_not_found), csv_number(r.spearman_graded_only),
      csv_number(r.kappa), csv_number(r.robustness_pct));
  for (RetrievalOutcome o : kAllOutcomes) {
    line += fmt::format(",{}", r.outcome_histogram.at(o));
  }
  line += "," + csv_number(r.mean_drift);
  return line;
}

json report_json(const EvalReport& r) {
  json outcomes = json::object();
  for (RetrievalOutcome o : kAllOutcomes) {
    outcomes[std::string(to_string(o))] = r.outcome_histogram.at(o);
  }
  return json{{"rows", r.rows},
              {"graded", r.graded},
              {"not_found", r.not_found},
              {"spearman_with_not_found", optional_number(r.spearman_with_not_found)},
              {"spearman_graded_only", optional_number(r.spearman_graded_only)},
              {"kappa", optional_number(r.kappa)},
              {"robustness_pct", r.robustness_pct ? json(*r.robustness_pct)
                                                  : json("n/a")},
              {"outcomes", outcomes},
              {"mean_drift", optional_number(r.mean_drift)},
              {"warnings", r.warnings}};
}

std::map<std::string, SimilarityLabel> read_annotations(const fs::path& path) {
  std::map<std::string, SimilarityLabel> out;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open annotations " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      const std::string label = j.at("label").get<std::string>();
      auto parsed = label_from_string(label);
      if (!parsed) throw ParseError("unknown label \"" + label + "\"", line_no);
      out[j.at("instance_id").get<std::string>()] = *parsed;
    } catch (const json::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

}  // namespace

EvaluateSummary cmd_evaluate(const RunConfig& config) {
  require_output(config, "evaluate");
  if (config.corpus.empty() || config.scores.empty()) {
    throw ConfigError("evaluate needs --corpus and --scores");
  }
  const Corpus corpus = load_corpus(config.corpus);
  const std::vector<ScoreRow> scores = read_scores(config.scores);
  std::map<std::string, SimilarityLabel> annotations;
  if (!config.annotations.empty()) annotations = read_annotations(config.annotations);

  std::unordered_map<std::string, std::size_t> order;
  for (std::size_t i = 0; i < corpus.instances().size(); ++i) {
    order.emplace(corpus.instances()[i].id, i);
  }

  std::map<ConfigKey, std::vector<std::pair<std::size_t, EvalRow>>> grouped;
  for (const ScoreRow& s : scores) {
    auto it = order.find(s.instance_id);
    if (it == order.end()) {
      throw ReferenceError("score row for unknown instance '" + s.instance_id + "'");
    }
    const AspectInstance& inst = corpus.instances()[it->second];
    EvalRow row;
    row.instance_id = inst.id;
    row.method = s.method;
    row.mode = s.mode;
    row.llm = s.llm;
    row.score = s.value;
    row.abstained = s.abstained;
    row.gold = inst.gold_label;
    row.extracted_a = s.evidence_a.value_or(Evidence::none());
    row.extracted_b = s.evidence_b.value_or(Evidence::none());
    row.gold_a = inst.gold_evidence_a;
    row.gold_b = inst.gold_evidence_b;
    const Document& da = corpus.document(inst.doc_a_id);
    row.source = da.source;
    row.aspect_tokens = inst.aspect.token_count();
    row.doc_a_sentences = da.size();
    row.doc_b_sentences = corpus.document(inst.doc_b_id).size();
    if (auto a = annotations.find(inst.id); a != annotations.end()) {
      row.annotation = a->second;
    }
    grouped[{s.method, s.mode, s.llm, s.embedder}].emplace_back(it->second,
                                                                std::move(row));
  }

  EvaluateSummary summary;
  summary.configurations = grouped.size();
  fs::create_directories(config.out);
  json configs = json::array();
  std::map<Grouping, std::vector<std::string>> csv_rows;
  std::vector<std::string> overall_rows;

  for (auto& [key, members] : grouped) {
    std::stable_sort(members.begin(), members.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<EvalRow> rows;
    rows.reserve(members.size());
    for (auto& [_, row] : members) rows.push_back(row);

    const EvalReport overall = evaluate_rows(rows);
    json entry = report_json(overall);
    entry["method"] = std::string(to_string(key.method));
    entry["mode"] = std::string(to_string(key.mode));
    entry["llm"] = key.llm;
    entry["embedder"] = key.embedder;
    configs.push_back(std::move(entry));
    overall_rows.push_back(csv_line(key, "all", overall));
    for (const std::string& w : overall.warnings) {
      summary.warnings.push_back(fmt::format("{}/{}: {}", to_string(key.method),
                                             to_string(key.mode), w));
    }

    for (Grouping g : config.groupings) {
      try {
        for (const auto& [bin, report] : group_report(rows, g)) {
          csv_rows[g].push_back(csv_line(key, bin, report));
        }
      } catch (const MissingMetadata& e) {
        summary.warnings.push_back(fmt::format("{}/{} grouping {} skipped: {}",
                                               to_string(key.method),
                                               to_string(key.mode), to_string(g),
                                               e.what()));
      }
    }
  }

  for (const std::string& w : summary.warnings) spdlog::warn("{}", w);

  {
    std::ofstream out = open_output(config.out / "summary.json");
    out << json{{"configurations", configs}}.dump(2) << '\n';
  }
  {
    std::ofstream out = open_output(config.out / "summary.csv");
    out << report_csv_header() << '\n';
    for (const auto& line : overall_rows) out << line << '\n';
  }
  for (Grouping g : config.groupings) {
    std::ofstream out =
        open_output(config.out / fmt::format("report_{}.csv", to_string(g)));
    out << report_csv_header() << '\n';
    for (const auto& line : csv_rows[g]) out << line << '\n';
  }
  return summary;
}

StatsReport cmd_report(const RunConfig& config) {
  if (config.corpus.empty()) throw ConfigError("report: no corpus (--corpus)");
  const StatsReport stats = dataset_stats(load_corpus(config.corpus));
  if (!config.out.empty()) {
    std::ofstream out = open_output(config.out);
    out << stats_to_csv(stats);
  }
  return stats;
}

}  // namespace aspectsim
