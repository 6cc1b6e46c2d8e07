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

#include "aspectsim/curator.h"

#include <optional>
#include <regex>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "aspectsim/errors.h"
#include "aspectsim/prompts.h"
#include "aspectsim/text.h"

namespace aspectsim {

using json = nlohmann::json;

namespace {

constexpr std::string_view kCuratorSystemPrompt =
    "You are a careful annotator. Follow the instructions exactly and answer "
    "with JSON only.";

// Index of the bracket closing the one at `open`, honoring JSON strings.
std::size_t matching_close(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      ++depth;
    } else if (c == ']' || c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

// Contents of the first ``` fenced block, if any.
std::optional<std::string_view> fenced_block(std::string_view raw) {
  const auto fence = raw.find("```");
  if (fence == std::string_view::npos) return std::nullopt;
  auto body_start = raw.find('\n', fence);
  if (body_start == std::string_view::npos) return std::nullopt;
  ++body_start;
  const auto close = raw.find("```", body_start);
  if (close == std::string_view::npos) return raw.substr(body_start);
  return raw.substr(body_start, close - body_start);
}

std::vector<std::string_view> candidates(std::string_view raw) {
  std::vector<std::string_view> out;
  if (auto fenced = fenced_block(raw)) out.push_back(*fenced);
  out.push_back(raw);
  return out;
}

std::optional<json> first_json_value(std::string_view text) {
  for (std::size_t pos = text.find_first_of("[{");
       pos != std::string_view::npos; pos = text.find_first_of("[{", pos + 1)) {
    const auto end = matching_close(text, pos);
    if (end == std::string_view::npos) continue;
    json parsed = json::parse(text.substr(pos, end - pos + 1), nullptr, false);
    if (!parsed.is_discarded()) return parsed;
  }
  return std::nullopt;
}

std::string snippet(std::string_view text) {
  std::string s = normalize_whitespace(text.substr(0, 120));
  return text.size() > 120 ? s + "..." : s;
}

// Element-by-element recovery for an array that does not parse as a whole.
std::optional<ParsedEntries> salvage_array(std::string_view text) {
  const auto open = text.find('[');
  if (open == std::string_view::npos) return std::nullopt;
  const std::string body(text.substr(open + 1));
  static const std::regex kBoundary(R"(\}\s*,\s*\{)");

  ParsedEntries result;
  std::size_t pos = body.find('{');
  while (pos != std::string::npos) {
    const auto end = matching_close(body, pos);
    if (end != std::string::npos) {
      json parsed = json::parse(body.substr(pos, end - pos + 1), nullptr, false);
      if (!parsed.is_discarded()) {
        result.entries.push_back(std::move(parsed));
        pos = body.find('{', end + 1);
        continue;
      }
    }
    result.rejected.push_back("malformed entry: " +
                              snippet(std::string_view(body).substr(pos)));
    std::smatch m;
    const auto from = body.cbegin() + static_cast<std::ptrdiff_t>(pos + 1);
    if (!std::regex_search(from, body.cend(), m, kBoundary)) break;
    pos = static_cast<std::size_t>(m[0].second - body.cbegin()) - 1;
  }
  if (result.entries.empty() && result.rejected.empty()) return std::nullopt;
  return result;
}

std::optional<std::string> string_field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) return std::nullopt;
  const json& v = obj.at(key);
  if (!v.is_string()) return std::nullopt;
  return v.get<std::string>();
}

std::string document_block(std::string_view label, const Document& doc) {
  return fmt::format("{}: {}", label, doc.raw_text);
}

void drop(std::vector<std::string>& sink, std::string message) {
  spdlog::warn("curator: {}", message);
  sink.push_back(std::move(message));
}

}  // namespace

json parse_model_json(std::string_view raw) {
  for (std::string_view candidate : candidates(raw)) {
    if (auto parsed = first_json_value(candidate)) return *parsed;
  }
  throw UnparseableResponse("no JSON value in model output", std::string(raw));
}

ParsedEntries parse_model_entries(std::string_view raw) {
  std::optional<json> value;
  for (std::string_view candidate : candidates(raw)) {
    if ((value = first_json_value(candidate))) break;
  }
  // A lone '{...}' found inside a broken array is not the answer; prefer the
  // element-wise salvage whenever an unparseable '[' precedes it.
  if (value && value->is_object()) {
    for (std::string_view candidate : candidates(raw)) {
      const auto bracket = candidate.find('[');
      const auto brace = candidate.find('{');
      if (bracket != std::string_view::npos && bracket < brace) {
        if (auto salvaged = salvage_array(candidate)) return *salvaged;
      }
    }
  }
  if (!value) {
    for (std::string_view candidate : candidates(raw)) {
      if (auto salvaged = salvage_array(candidate)) return *salvaged;
    }
    throw UnparseableResponse("no JSON value in model output", std::string(raw));
  }

  json items = *value;
  if (items.is_object()) {
    const json* only_array = nullptr;
    std::size_t arrays = 0;
    for (const auto& [_, member] : items.items()) {
      if (member.is_array()) {
        ++arrays;
        only_array = &member;
      }
    }
    items = arrays == 1 ? *only_array : json::array({items});
  }
  ParsedEntries result;
  for (json& item : items) {
    if (item.is_object()) {
      result.entries.push_back(std::move(item));
    } else {
      result.rejected.push_back("non-object entry: " + snippet(item.dump()));
    }
  }
  return result;
}

Curator::Curator(Gateway& gateway, CuratorOptions options)
    : gateway_(gateway), options_(std::move(options)) {}

std::string Curator::curation_prompt(const Document& doc_a,
                                     const Document& doc_b) {
  const std::string a = document_block("Document 1", doc_a);
  const std::string b = document_block("Document 2", doc_b);
  return prompts::render(prompts::curation(),
                         {{"Document 1", a}, {"Document 2", b}});
}

std::string Curator::negatives_prompt(const Document& doc_a,
                                      const Document& doc_b) {
  const std::string a = document_block("Document 1", doc_a);
  const std::string b = document_block("Document 2", doc_b);
  return prompts::render(prompts::negatives(),
                         {{"Document 1", a}, {"Document 2", b}});
}

ParsedEntries Curator::ask(const std::string& prompt) {
  ChatRequest request{options_.model_name, std::string(kCuratorSystemPrompt),
                      prompt, options_.decoding};
  try {
    return parse_model_entries(gateway_.chat(request));
  } catch (const UnparseableResponse&) {
    spdlog::warn("curator: unparseable response, re-prompting once");
    request.user_prompt += prompts::kJsonRetrySuffix;
    return parse_model_entries(gateway_.chat(request));
  }
}

CurationResult Curator::curate_pair(const Document& doc_a,
                                    const Document& doc_b) {
  CurationResult result;
  ParsedEntries parsed = ask(curation_prompt(doc_a, doc_b));
  for (auto& message : parsed.rejected) drop(result.dropped, std::move(message));

  for (const json& entry : parsed.entries) {
    const auto aspect_text = string_field(entry, "aspect");
    const json* fields = &entry;
    if (entry.contains("pairs")) {
      const json& pairs = entry.at("pairs");
      if (pairs.is_object()) {
        fields = &pairs;
      } else if (pairs.is_array() && !pairs.empty() && pairs.at(0).is_object()) {
        fields = &pairs.at(0);
      }
    }
    const auto s1 = string_field(*fields, "sentence1");
    const auto s2 = string_field(*fields, "sentence2");
    const auto similarity = string_field(*fields, "similarity");
    if (!aspect_text || trim(*aspect_text).empty() || !s1 || !s2 ||
        !similarity) {
      drop(result.dropped, "entry missing required fields: " +
                               snippet(entry.dump()));
      continue;
    }
    const auto label = label_from_string(*similarity);
    if (!label || !is_graded(*label)) {
      drop(result.dropped,
           fmt::format("aspect '{}': label \"{}\" is not a graded label",
                       *aspect_text, *similarity));
      continue;
    }
    auto ev_a = ground_evidence(doc_a, *s1);
    auto ev_b = ground_evidence(doc_b, *s2);
    if (!ev_a || !ev_b) {
      drop(result.dropped,
           fmt::format("aspect '{}': evidence not found in document {}",
                       *aspect_text, !ev_a ? doc_a.id : doc_b.id));
      continue;
    }
    std::string reason = string_field(*fields, "reason")
                             .value_or(string_field(entry, "reason").value_or(""));
    result.aspects.push_back({Aspect(normalize_whitespace(*aspect_text)),
                              std::move(*ev_a), std::move(*ev_b), *label,
                              std::move(reason)});
  }
  if (result.aspects.size() > kMaxCuratedAspects) {
    drop(result.dropped,
         fmt::format("{} aspects over the cap of {}",
                     result.aspects.size() - kMaxCuratedAspects,
                     kMaxCuratedAspects));
    result.aspects.resize(kMaxCuratedAspects);
  }
  return result;
}

NegativeResult Curator::generate_negatives(const Document& doc_a,
                                           const Document& doc_b) {
  NegativeResult result;
  ParsedEntries parsed = ask(negatives_prompt(doc_a, doc_b));
  for (auto& message : parsed.rejected) drop(result.dropped, std::move(message));

  std::size_t per_side[2] = {0, 0};
  for (const json& entry : parsed.entries) {
    const auto aspect_text = string_field(entry, "aspect");
    const std::string s1 = string_field(entry, "sentence1").value_or("");
    const std::string s2 = string_field(entry, "sentence2").value_or("");
    if (!aspect_text || trim(*aspect_text).empty()) {
      drop(result.dropped, "entry without aspect: " + snippet(entry.dump()));
      continue;
    }
    const bool has_a = !trim(s1).empty();
    const bool has_b = !trim(s2).empty();
    if (has_a == has_b) {
      drop(result.dropped,
           fmt::format("aspect '{}': expected evidence on exactly one side",
                       *aspect_text));
      continue;
    }
    const PresentIn side = has_a ? PresentIn::kDocA : PresentIn::kDocB;
    const Document& present = has_a ? doc_a : doc_b;
    const Document& absent = has_a ? doc_b : doc_a;
    const std::string& text = has_a ? s1 : s2;
    auto ev = ground_evidence(present, text);
    if (!ev) {
      drop(result.dropped,
           fmt::format("aspect '{}': evidence not found in document {}",
                       *aspect_text, present.id));
      continue;
    }
    if (occurs_in(absent, ev->text)) {
      drop(result.dropped,
           fmt::format("aspect '{}': evidence also occurs in document {}",
                       *aspect_text, absent.id));
      continue;
    }
    std::size_t& count = per_side[side == PresentIn::kDocA ? 0 : 1];
    if (count >= kMaxNegativesPerDocument ||
        result.entries.size() >= kMaxNegatives) {
      drop(result.dropped,
           fmt::format("aspect '{}': over the negative cap", *aspect_text));
      continue;
    }
    ++count;
    result.entries.push_back({Aspect(normalize_whitespace(*aspect_text)), side,
                              std::move(*ev),
                              string_field(entry, "reason").value_or("")});
  }
  return result;
}

std::vector<AspectInstance> to_instances(const Document& doc_a,
                                         const Document& doc_b,
                                         const CurationResult& graded,
                                         const NegativeResult& negatives) {
  std::vector<AspectInstance> out;
  std::size_t k = 0;
  auto next_id = [&] { return fmt::format("{}~{}#{}", doc_a.id, doc_b.id, k++); };
  for (const CuratedAspect& a : graded.aspects) {
    out.push_back({next_id(), doc_a.id, doc_b.id, a.aspect, a.evidence_a,
                   a.evidence_b, a.label, a.reason});
  }
  for (const NegativeEntry& n : negatives.entries) {
    AspectInstance inst{next_id(), doc_a.id, doc_b.id, n.aspect,
                        Evidence::none(), Evidence::none(),
                        SimilarityLabel::kNotFound, n.reason};
    (n.present_in == PresentIn::kDocA ? inst.gold_evidence_a
                                      : inst.gold_evidence_b) = n.evidence;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace aspectsim
