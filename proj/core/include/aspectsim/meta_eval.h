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

// Corpus-level evaluation of similarity scores against graded labels.

#ifndef ASPECTSIM_META_EVAL_H_
#define ASPECTSIM_META_EVAL_H_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aspectsim/corpus.h"
#include "aspectsim/metric.h"

namespace aspectsim {

// Ordinal rank of a gold label for rank correlation: Highly 3, Somewhat 2,
// Marginally 1, Not Found and Not Similar 0.
int label_rank(SimilarityLabel label);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Spearman's rho as the Pearson correlation of average ranks. Throws
// LengthMismatch, and DegenerateInput for fewer than two items or a constant
// side.
double spearman(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> pred,
                std::span<const SimilarityLabel> gold);

// (p_o - p_e) / (1 - p_e) over the labels that occur in either sequence.
// Returns 1 when both sequences are the same single label. Throws
// LengthMismatch (including empty input).
double cohen_kappa(std::span<const SimilarityLabel> labels_1,
                   std::span<const SimilarityLabel> labels_2);

// Percentage of Not Found rows on which the scorer abstained. Throws
// LengthMismatch and NoNegativeInstances.
double robustness_rate(std::span<const AspectScore> scores,
                       std::span<const SimilarityLabel> gold);

enum class RetrievalOutcome { kBM, kFMM, kSMM, kBMM, kFE, kSE, kBE };

inline constexpr std::array<RetrievalOutcome, 7> kAllOutcomes = {
    RetrievalOutcome::kBM,  RetrievalOutcome::kFMM, RetrievalOutcome::kSMM,
    RetrievalOutcome::kBMM, RetrievalOutcome::kFE,  RetrievalOutcome::kSE,
    RetrievalOutcome::kBE};

// "BM", "F-MM", "S-MM", "B-MM", "F-E", "S-E", "B-E".
std::string_view to_string(RetrievalOutcome outcome);

// Empty extractions take precedence (F-E, S-E, B-E); otherwise each side
// matches when its indices hit the gold set: the single index must be a gold
// index for SentenceLevel, any overlap suffices for SpanLevel.
RetrievalOutcome retrieval_outcome(const Evidence& extracted_a,
                                   const Evidence& extracted_b,
                                   const Evidence& gold_a,
                                   const Evidence& gold_b, ExtractionMode mode);

int position_drift(int extracted_index, int gold_index);
// Minimum distance over all (extracted, gold) index pairs. Both non-empty.
int position_drift(std::span<const int> extracted, std::span<const int> gold);

// One scored instance with the metadata the groupings need.
struct EvalRow {
  std::string instance_id;
  Method method = Method::kAspectSim;
  std::optional<ExtractionMode> mode;
  std::string llm;
  double score = 0.0;
  bool abstained = false;
  SimilarityLabel gold = SimilarityLabel::kHighlySimilar;
  Evidence extracted_a;
  Evidence extracted_b;
  Evidence gold_a;
  Evidence gold_b;
  SourceDataset source = SourceDataset::kOther;
  std::size_t aspect_tokens = 0;
  std::size_t doc_a_sentences = 0;
  std::size_t doc_b_sentences = 0;
  // Second annotation of the same instance, for agreement.
  std::optional<SimilarityLabel> annotation;
};

struct EvalReport {
  std::size_t rows = 0;
  std::size_t graded = 0;
  std::size_t not_found = 0;
  std::optional<double> spearman_with_not_found;
  std::optional<double> spearman_graded_only;
  std::optional<double> kappa;
  std::optional<double> robustness_pct;
  std::map<RetrievalOutcome, std::size_t> outcome_histogram;
  std::optional<double> mean_drift;
  std::vector<std::string> warnings;
};

// Outcomes and drift are tracked for AspectSim rows in the sentence and span
// modes; robustness for AspectSim rows only. Undefined statistics are left
// empty and explained in `warnings`.
EvalReport evaluate_rows(std::span<const EvalRow> rows);

enum class Grouping {
  kDataset,
  kAspectLength,
  kDocLengthPair,
  kSentencePosition,
  kModelSizeBand,
};

std::string_view to_string(Grouping grouping);
std::optional<Grouping> grouping_from_string(std::string_view text);

// "S" (<= 25 sentences), "M" (26-50), "L" (51-100), "VL" (> 100).
std::string_view doc_length_bin(std::size_t sentences);
// Early/Mid/Late: index in the first, middle or last third.
std::string_view position_bin(int index, std::size_t sentences);
// Whitespace tokens: "1-3", "4-6", "7-9", "10-12", "13+".
std::string_view aspect_length_bin(std::size_t tokens);
// Parameter count parsed from a model name ("qwen-2.5-32b"): "<=3B",
// "4-10B", "11-26B", ">=27B". nullopt when no size is present.
std::optional<std::string> model_size_band(std::string_view model_name);

// Throws MissingMetadata when the row cannot be placed.
std::string bin_label(const EvalRow& row, Grouping grouping);

std::map<std::string, EvalReport> group_report(std::span<const EvalRow> rows,
                                               Grouping grouping);

}  // namespace aspectsim

#endif  // ASPECTSIM_META_EVAL_H_
