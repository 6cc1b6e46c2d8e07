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

// The aspect-conditioned similarity metric (extract, embed, cosine) in its
// three extraction variants, and the LBS, WDS and PSD baselines.

#ifndef ASPECTSIM_METRIC_H_
#define ASPECTSIM_METRIC_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "aspectsim/corpus.h"
#include "aspectsim/embedding.h"
#include "aspectsim/gateway.h"

namespace aspectsim {

enum class ExtractionMode { kSentenceLevel, kSpanLevel, kSummarize };

// "sentence", "span", "summarize".
std::string_view to_string(ExtractionMode mode);
std::optional<ExtractionMode> mode_from_string(std::string_view text);

enum class Method { kAspectSim, kLbs, kWds, kPsd };

// "AspectSim", "LBS", "WDS", "PSD".
std::string_view to_string(Method method);
std::optional<Method> method_from_string(std::string_view text);

struct AspectScore {
  double value = 0.0;
  Method method = Method::kAspectSim;
  // Filled for AspectSim only.
  Evidence evidence_a;
  Evidence evidence_b;
  bool abstained = false;
};

enum class YesNo { kYes, kNo, kAmbiguous };

// Case-insensitive leading "yes"/"no" token after stripping punctuation and
// markup; anything else is ambiguous.
YesNo parse_yes_no(std::string_view reply);

// Reads a score in [0, 1] from an LBS reply: a JSON "score" member if
// present, else the first number. Values up to 0.05 outside the range are
// clamped. Throws UnparseableScore otherwise.
double parse_lbs_reply(std::string_view reply);

// Maps a model's extraction reply onto document sentences. SentenceLevel
// needs exactly one sentence; SpanLevel accepts a contiguous run or one
// sentence per line; Summarize keeps free text. Returns nullopt when the
// reply cannot be grounded, and an empty Evidence for an explicit "none".
std::optional<Evidence> interpret_extraction(const Document& doc,
                                             std::string_view reply,
                                             ExtractionMode mode);

struct ScorerOptions {
  std::string chat_model;
  std::string embedding_model;
  double abstention_score = 0.0;
  // Whole-document embedding input is cut to this many bytes from the head.
  // 0 disables truncation.
  std::size_t max_embed_bytes = 0;
  nlohmann::json decoding = nlohmann::json::object();
};

class Scorer {
 public:
  Scorer(Gateway& gateway, ScorerOptions options);

  const ScorerOptions& options() const { return options_; }

  // Asks "Does the document discuss <aspect>?". Ambiguous replies count as
  // false and are logged.
  bool verify_presence(const Document& doc, const Aspect& aspect);

  // One document per prompt. Ungroundable replies yield an empty Evidence
  // and a log line.
  Evidence extract_evidence(const Document& doc, const Aspect& aspect,
                            ExtractionMode mode);

  // Presence check, then extraction when present; empty otherwise.
  Evidence retrieve(const Document& doc, const Aspect& aspect,
                    ExtractionMode mode);

  // Abstains (value = abstention_score) when either side comes back empty.
  AspectScore aspect_sim(const Document& doc_a, const Document& doc_b,
                         const Aspect& aspect, ExtractionMode mode);

  AspectScore lbs_score(const Document& doc_a, const Document& doc_b,
                        const Aspect& aspect);

  AspectScore wds_score(const Document& doc_a, const Document& doc_b);

  // Whole-document text as sent to the embedder.
  std::string embedding_text(const Document& doc) const;

  static std::string presence_prompt(const Document& doc, const Aspect& aspect);
  static std::string extraction_prompt(const Document& doc, const Aspect& aspect,
                                       ExtractionMode mode);
  static std::string lbs_prompt(const Document& doc_a, const Document& doc_b,
                                const Aspect& aspect);

 private:
  std::string ask(const std::string& prompt);

  Gateway& gateway_;
  ScorerOptions options_;
};

// |d1.a - d2.a| / |a|. Throws ZeroAspectVector and DimensionMismatch.
double projection_difference(std::span<const double> aspect,
                             std::span<const double> doc1,
                             std::span<const double> doc2);

struct PsdTriple {
  EmbeddingVector aspect;
  EmbeddingVector doc1;
  EmbeddingVector doc2;
};

// Normalizer Z for PSD scores: the largest projection difference seen over a
// calibration set.
class PsdNormalizer {
 public:
  // Throws PreconditionError unless z > 0.
  explicit PsdNormalizer(double z);

  // Throws EmptyCalibration for an empty set or when every difference is 0.
  static PsdNormalizer calibrate(std::span<const PsdTriple> dataset);

  double z() const { return z_; }

 private:
  double z_;
};

// 1 - delta / z, clamped to 0 (with a warning) when delta exceeds z.
AspectScore psd_score(const EmbeddingVector& aspect, const EmbeddingVector& doc1,
                      const EmbeddingVector& doc2, const PsdNormalizer& norm);

}  // namespace aspectsim

#endif  // ASPECTSIM_METRIC_H_
