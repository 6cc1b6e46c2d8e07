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

#include "aspectsim/metric.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "aspectsim/curator.h"
#include "aspectsim/errors.h"
#include "aspectsim/prompts.h"
#include "aspectsim/text.h"

namespace aspectsim {

using json = nlohmann::json;

namespace {

constexpr std::string_view kScorerSystemPrompt =
    "You are a precise reading assistant. Answer exactly in the requested "
    "format.";

constexpr double kLbsSlack = 0.05;

constexpr std::array<std::pair<ExtractionMode, std::string_view>, 3> kModes = {
    {{ExtractionMode::kSentenceLevel, "sentence"},
     {ExtractionMode::kSpanLevel, "span"},
     {ExtractionMode::kSummarize, "summarize"}}};

constexpr std::array<std::pair<Method, std::string_view>, 4> kMethods = {
    {{Method::kAspectSim, "AspectSim"},
     {Method::kLbs, "LBS"},
     {Method::kWds, "WDS"},
     {Method::kPsd, "PSD"}}};

std::string strip_fences(std::string_view reply) {
  std::string_view text = trim(reply);
  if (text.starts_with("```")) {
    const auto nl = text.find('\n');
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    const auto close = text.rfind("```");
    if (close != std::string_view::npos) text = text.substr(0, close);
  }
  return std::string(trim(text));
}

std::string_view strip_bullet(std::string_view line) {
  line = trim(line);
  if (line.starts_with("- ") || line.starts_with("* ")) line.remove_prefix(2);
  return trim(line);
}

bool means_none(std::string_view reply) {
  std::string lowered = to_lower(trim(reply));
  while (!lowered.empty() && std::ispunct(static_cast<unsigned char>(lowered.back()))) {
    lowered.pop_back();
  }
  return lowered.empty() || lowered == "none" || lowered == "n/a" ||
         lowered == "no relevant sentence" || lowered == "not found";
}

}  // namespace

std::string_view to_string(ExtractionMode mode) {
  for (const auto& [value, name] : kModes) {
    if (value == mode) return name;
  }
  return "sentence";
}

std::optional<ExtractionMode> mode_from_string(std::string_view text) {
  const std::string lowered = to_lower(trim(text));
  for (const auto& [value, name] : kModes) {
    if (name == lowered) return value;
  }
  return std::nullopt;
}

std::string_view to_string(Method method) {
  for (const auto& [value, name] : kMethods) {
    if (value == method) return name;
  }
  return "AspectSim";
}

std::optional<Method> method_from_string(std::string_view text) {
  const std::string lowered = to_lower(trim(text));
  for (const auto& [value, name] : kMethods) {
    if (to_lower(name) == lowered) return value;
  }
  return std::nullopt;
}

YesNo parse_yes_no(std::string_view reply) {
  std::size_t i = 0;
  while (i < reply.size() &&
         !std::isalpha(static_cast<unsigned char>(reply[i]))) {
    ++i;
  }
  std::size_t j = i;
  while (j < reply.size() && std::isalpha(static_cast<unsigned char>(reply[j]))) {
    ++j;
  }
  const std::string token = to_lower(reply.substr(i, j - i));
  if (token == "yes") return YesNo::kYes;
  if (token == "no") return YesNo::kNo;
  return YesNo::kAmbiguous;
}

double parse_lbs_reply(std::string_view reply) {
  std::optional<double> value;
  try {
    const json parsed = parse_model_json(reply);
    if (parsed.is_object() && parsed.contains("score") &&
        parsed.at("score").is_number()) {
      value = parsed.at("score").get<double>();
    }
  } catch (const UnparseableResponse&) {
  }
  if (!value) {
    static const std::regex kNumber(R"([-+]?(\d+(\.\d*)?|\.\d+))");
    const std::string text(reply);
    std::smatch m;
    if (!std::regex_search(text, m, kNumber)) {
      throw UnparseableScore("no score in LBS reply", text);
    }
    value = std::stod(m[0].str());
  }
  if (*value < -kLbsSlack || *value > 1.0 + kLbsSlack) {
    throw UnparseableScore(fmt::format("LBS score {} outside [0, 1]", *value),
                           std::string(reply));
  }
  return std::clamp(*value, 0.0, 1.0);
}

std::optional<Evidence> interpret_extraction(const Document& doc,
                                             std::string_view reply,
                                             ExtractionMode mode) {
  const std::string text = strip_fences(reply);
  if (means_none(text)) return Evidence::none();

  if (mode == ExtractionMode::kSummarize) return Evidence::free_text(text);

  if (auto whole = ground_evidence(doc, strip_bullet(text))) {
    if (mode == ExtractionMode::kSentenceLevel &&
        whole->sentence_indices.size() != 1) {
      return std::nullopt;
    }
    return whole;
  }
  if (mode == ExtractionMode::kSentenceLevel) return std::nullopt;

  std::set<int> indices;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const std::string_view cleaned = strip_bullet(line);
    if (cleaned.empty()) continue;
    auto ev = ground_evidence(doc, cleaned);
    if (!ev) return std::nullopt;
    indices.insert(ev->sentence_indices.begin(), ev->sentence_indices.end());
  }
  if (indices.empty()) return std::nullopt;
  return Evidence::from_indices(doc, std::vector<int>(indices.begin(), indices.end()));
}

Scorer::Scorer(Gateway& gateway, ScorerOptions options)
    : gateway_(gateway), options_(std::move(options)) {}

std::string Scorer::presence_prompt(const Document& doc, const Aspect& aspect) {
  return prompts::render(prompts::presence(),
                         {{"document", doc.raw_text}, {"aspect", aspect.text()}});
}

std::string Scorer::extraction_prompt(const Document& doc, const Aspect& aspect,
                                      ExtractionMode mode) {
  std::string_view tmpl;
  switch (mode) {
    case ExtractionMode::kSentenceLevel:
      tmpl = prompts::extract_sentence();
      break;
    case ExtractionMode::kSpanLevel:
      tmpl = prompts::extract_span();
      break;
    case ExtractionMode::kSummarize:
      tmpl = prompts::summarize();
      break;
  }
  return prompts::render(tmpl,
                         {{"document", doc.raw_text}, {"aspect", aspect.text()}});
}

std::string Scorer::lbs_prompt(const Document& doc_a, const Document& doc_b,
                               const Aspect& aspect) {
  return prompts::render(prompts::lbs(), {{"document1", doc_a.raw_text},
                                          {"document2", doc_b.raw_text},
                                          {"aspect", aspect.text()}});
}

std::string Scorer::ask(const std::string& prompt) {
  return gateway_.chat(ChatRequest{options_.chat_model,
                                   std::string(kScorerSystemPrompt), prompt,
                                   options_.decoding});
}

bool Scorer::verify_presence(const Document& doc, const Aspect& aspect) {
  const std::string reply = ask(presence_prompt(doc, aspect));
  switch (parse_yes_no(reply)) {
    case YesNo::kYes:
      return true;
    case YesNo::kNo:
      return false;
    case YesNo::kAmbiguous:
      break;
  }
  spdlog::warn("AmbiguousAnswer: document '{}', aspect '{}': \"{}\"", doc.id,
               aspect.text(), normalize_whitespace(reply.substr(0, 200)));
  return false;
}

Evidence Scorer::extract_evidence(const Document& doc, const Aspect& aspect,
                                  ExtractionMode mode) {
  const std::string reply = ask(extraction_prompt(doc, aspect, mode));
  if (auto ev = interpret_extraction(doc, reply, mode)) return std::move(*ev);
  spdlog::warn("GroundingFailure: document '{}', aspect '{}', mode {}: \"{}\"",
               doc.id, aspect.text(), to_string(mode),
               normalize_whitespace(reply.substr(0, 200)));
  return Evidence::none();
}

Evidence Scorer::retrieve(const Document& doc, const Aspect& aspect,
                          ExtractionMode mode) {
  if (!verify_presence(doc, aspect)) return Evidence::none();
  return extract_evidence(doc, aspect, mode);
}

AspectScore Scorer::aspect_sim(const Document& doc_a, const Document& doc_b,
                               const Aspect& aspect, ExtractionMode mode) {
  AspectScore score;
  score.method = Method::kAspectSim;
  score.evidence_a = retrieve(doc_a, aspect, mode);
  score.evidence_b = retrieve(doc_b, aspect, mode);
  if (score.evidence_a.is_empty() || score.evidence_b.is_empty()) {
    score.abstained = true;
    score.value = options_.abstention_score;
    return score;
  }
  const auto vectors = gateway_.embed({score.evidence_a.text, score.evidence_b.text},
                                      options_.embedding_model);
  score.value = cosine(vectors[0], vectors[1]);
  return score;
}

AspectScore Scorer::lbs_score(const Document& doc_a, const Document& doc_b,
                              const Aspect& aspect) {
  AspectScore score;
  score.method = Method::kLbs;
  score.value = parse_lbs_reply(ask(lbs_prompt(doc_a, doc_b, aspect)));
  return score;
}

std::string Scorer::embedding_text(const Document& doc) const {
  return truncate_utf8(doc.raw_text, options_.max_embed_bytes);
}

AspectScore Scorer::wds_score(const Document& doc_a, const Document& doc_b) {
  AspectScore score;
  score.method = Method::kWds;
  const auto vectors = gateway_.embed({embedding_text(doc_a), embedding_text(doc_b)},
                                      options_.embedding_model);
  score.value = cosine(vectors[0], vectors[1]);
  return score;
}

double projection_difference(std::span<const double> aspect,
                             std::span<const double> doc1,
                             std::span<const double> doc2) {
  const double norm = l2_norm(aspect);
  if (norm == 0.0) throw ZeroAspectVector("aspect embedding is the zero vector");
  return std::abs(dot(doc1, aspect) / norm - dot(doc2, aspect) / norm);
}

PsdNormalizer::PsdNormalizer(double z) : z_(z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw PreconditionError(fmt::format("PSD normalizer must be positive, got {}", z));
  }
}

PsdNormalizer PsdNormalizer::calibrate(std::span<const PsdTriple> dataset) {
  if (dataset.empty()) throw EmptyCalibration("PSD calibration set is empty");
  double z = 0.0;
  for (const PsdTriple& t : dataset) {
    z = std::max(z, projection_difference(t.aspect.values, t.doc1.values,
                                          t.doc2.values));
  }
  if (z <= 0.0) {
    throw EmptyCalibration("every projection difference is zero; Z must be > 0");
  }
  return PsdNormalizer(z);
}

AspectScore psd_score(const EmbeddingVector& aspect, const EmbeddingVector& doc1,
                      const EmbeddingVector& doc2, const PsdNormalizer& norm) {
  const double delta =
      projection_difference(aspect.values, doc1.values, doc2.values);
  AspectScore score;
  score.method = Method::kPsd;
  if (delta > norm.z()) {
    spdlog::warn("PSD difference {} exceeds normalizer {}; clamping to 0", delta,
                 norm.z());
    score.value = 0.0;
  } else {
    score.value = 1.0 - delta / norm.z();
  }
  return score;
}

}  // namespace aspectsim
