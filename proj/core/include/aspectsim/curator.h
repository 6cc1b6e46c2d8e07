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

// LLM-driven dataset curation: shared-aspect identification with graded
// labels, and Not-Found negatives, each grounded back onto source sentences.

#ifndef ASPECTSIM_CURATOR_H_
#define ASPECTSIM_CURATOR_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "aspectsim/corpus.h"
#include "aspectsim/gateway.h"

namespace aspectsim {

inline constexpr std::size_t kMaxCuratedAspects = 15;
inline constexpr std::size_t kMaxNegatives = 4;
inline constexpr std::size_t kMaxNegativesPerDocument = 2;

// Returns the first JSON array or object embedded in `raw`, tolerating
// markdown code fences and surrounding prose. Throws UnparseableResponse.
nlohmann::json parse_model_json(std::string_view raw);

struct ParsedEntries {
  std::vector<nlohmann::json> entries;
  // One message per element that was not a well-formed JSON object.
  std::vector<std::string> rejected;
};

// Like parse_model_json, but returns the elements of the outermost array.
// If the array as a whole is malformed, each top-level element is parsed on
// its own and broken ones are rejected. A lone object counts as one entry,
// and an object wrapping a single array member is unwrapped. Throws
// UnparseableResponse when nothing JSON-like is found.
ParsedEntries parse_model_entries(std::string_view raw);

struct CuratedAspect {
  Aspect aspect;
  Evidence evidence_a;
  Evidence evidence_b;
  SimilarityLabel label = SimilarityLabel::kHighlySimilar;
  std::string reason;
};

struct CurationResult {
  std::vector<CuratedAspect> aspects;
  // Why entries were discarded (schema, label, grounding, cap).
  std::vector<std::string> dropped;
};

enum class PresentIn { kDocA, kDocB };

struct NegativeEntry {
  Aspect aspect;
  PresentIn present_in = PresentIn::kDocA;
  Evidence evidence;
  std::string reason;
};

struct NegativeResult {
  std::vector<NegativeEntry> entries;
  std::vector<std::string> dropped;
};

struct CuratorOptions {
  std::string model_name;
  nlohmann::json decoding = nlohmann::json::object();
};

class Curator {
 public:
  Curator(Gateway& gateway, CuratorOptions options);

  // Entries whose evidence cannot be grounded as a contiguous sentence run of
  // its document are dropped. At most kMaxCuratedAspects are kept, in model
  // order. Throws UnparseableResponse after one re-prompt.
  CurationResult curate_pair(const Document& doc_a, const Document& doc_b);

  // Entries must name exactly one side; that side must ground and the text
  // must not also occur in the other document. Caps: kMaxNegatives total,
  // kMaxNegativesPerDocument per side, first come first kept.
  NegativeResult generate_negatives(const Document& doc_a,
                                    const Document& doc_b);

  // Prompt sent to the model; exposed for auditing.
  static std::string curation_prompt(const Document& doc_a,
                                     const Document& doc_b);
  static std::string negatives_prompt(const Document& doc_a,
                                      const Document& doc_b);

 private:
  ParsedEntries ask(const std::string& prompt);

  Gateway& gateway_;
  CuratorOptions options_;
};

// Graded rows first, then Not-Found rows. Ids are "<doc_a>~<doc_b>#<k>".
std::vector<AspectInstance> to_instances(const Document& doc_a,
                                         const Document& doc_b,
                                         const CurationResult& graded,
                                         const NegativeResult& negatives);

}  // namespace aspectsim

#endif  // ASPECTSIM_CURATOR_H_
