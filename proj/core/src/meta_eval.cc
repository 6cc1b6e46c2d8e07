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

#include "aspectsim/meta_eval.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <regex>

#include <fmt/format.h>

#include "aspectsim/errors.h"
#include "aspectsim/text.h"

namespace aspectsim {
namespace {

constexpr std::array<std::pair<RetrievalOutcome, std::string_view>, 7>
    kOutcomeNames = {{{RetrievalOutcome::kBM, "BM"},
                      {RetrievalOutcome::kFMM, "F-MM"},
                      {RetrievalOutcome::kSMM, "S-MM"},
                      {RetrievalOutcome::kBMM, "B-MM"},
                      {RetrievalOutcome::kFE, "F-E"},
                      {RetrievalOutcome::kSE, "S-E"},
                      {RetrievalOutcome::kBE, "B-E"}}};

constexpr std::array<std::pair<Grouping, std::string_view>, 5> kGroupingNames =
    {{{Grouping::kDataset, "dataset"},
      {Grouping::kAspectLength, "aspect_length"},
      {Grouping::kDocLengthPair, "doc_length"},
      {Grouping::kSentencePosition, "position"},
      {Grouping::kModelSizeBand, "model_size"}}};

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateInput("rank correlation of a constant sequence");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Does the extracted side hit its gold set?
bool side_matches(const Evidence& extracted, const Evidence& gold,
                  ExtractionMode mode) {
  const auto& ext = extracted.sentence_indices;
  const auto& ref = gold.sentence_indices;
  auto in_gold = [&](int idx) {
    return std::find(ref.begin(), ref.end(), idx) != ref.end();
  };
  if (mode == ExtractionMode::kSentenceLevel) {
    return ext.size() == 1 && in_gold(ext.front());
  }
  return std::any_of(ext.begin(), ext.end(), in_gold);
}

bool tracks_retrieval(const EvalRow& row) {
  return row.method == Method::kAspectSim && row.mode.has_value() &&
         *row.mode != ExtractionMode::kSummarize;
}

}  // namespace

int label_rank(SimilarityLabel label) {
  switch (label) {
    case SimilarityLabel::kHighlySimilar:
      return 3;
    case SimilarityLabel::kSomewhatSimilar:
      return 2;
    case SimilarityLabel::kMarginallySimilar:
      return 1;
    case SimilarityLabel::kNotFound:
    case SimilarityLabel::kNotSimilar:
      return 0;
  }
  return 0;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share rank mean(i+1 .. j+1).
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw LengthMismatch(fmt::format("spearman: {} predictions vs {} labels",
                                     x.size(), y.size()));
  }
  if (x.size() < 2) throw DegenerateInput("spearman needs at least two items");
  return pearson(average_ranks(x), average_ranks(y));
}

double spearman(std::span<const double> pred,
                std::span<const SimilarityLabel> gold) {
  std::vector<double> ranks;
  ranks.reserve(gold.size());
  for (SimilarityLabel label : gold) ranks.push_back(label_rank(label));
  return spearman(pred, std::span<const double>(ranks));
}

double cohen_kappa(std::span<const SimilarityLabel> labels_1,
                   std::span<const SimilarityLabel> labels_2) {
  if (labels_1.size() != labels_2.size() || labels_1.empty()) {
    throw LengthMismatch(fmt::format("cohen_kappa: {} vs {} labels",
                                     labels_1.size(), labels_2.size()));
  }
  const double n = static_cast<double>(labels_1.size());
  std::map<SimilarityLabel, double> count_1;
  std::map<SimilarityLabel, double> count_2;
  double agree = 0.0;
  for (std::size_t i = 0; i < labels_1.size(); ++i) {
    count_1[labels_1[i]] += 1.0;
    count_2[labels_2[i]] += 1.0;
    if (labels_1[i] == labels_2[i]) agree += 1.0;
  }
  const double p_o = agree / n;
  double p_e = 0.0;
  for (const auto& [label, c1] : count_1) {
    auto it = count_2.find(label);
    if (it != count_2.end()) p_e += (c1 / n) * (it->second / n);
  }
  if (p_e >= 1.0) return 1.0;
  return (p_o - p_e) / (1.0 - p_e);
}

double robustness_rate(std::span<const AspectScore> scores,
                       std::span<const SimilarityLabel> gold) {
  if (scores.size() != gold.size()) {
    throw LengthMismatch(fmt::format("robustness_rate: {} scores vs {} labels",
                                     scores.size(), gold.size()));
  }
  std::size_t negatives = 0;
  std::size_t abstained = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] != SimilarityLabel::kNotFound) continue;
    ++negatives;
    if (scores[i].abstained) ++abstained;
  }
  if (negatives == 0) throw NoNegativeInstances("no Not Found rows to score");
  return 100.0 * static_cast<double>(abstained) / static_cast<double>(negatives);
}

std::string_view to_string(RetrievalOutcome outcome) {
  for (const auto& [value, name] : kOutcomeNames) {
    if (value == outcome) return name;
  }
  return "BM";
}

RetrievalOutcome retrieval_outcome(const Evidence& extracted_a,
                                   const Evidence& extracted_b,
                                   const Evidence& gold_a,
                                   const Evidence& gold_b, ExtractionMode mode) {
  const bool empty_a = extracted_a.is_empty();
  const bool empty_b = extracted_b.is_empty();
  if (empty_a && empty_b) return RetrievalOutcome::kBE;
  if (empty_a) return RetrievalOutcome::kFE;
  if (empty_b) return RetrievalOutcome::kSE;
  const bool match_a = side_matches(extracted_a, gold_a, mode);
  const bool match_b = side_matches(extracted_b, gold_b, mode);
  if (match_a && match_b) return RetrievalOutcome::kBM;
  if (!match_a && !match_b) return RetrievalOutcome::kBMM;
  return match_a ? RetrievalOutcome::kSMM : RetrievalOutcome::kFMM;
}

int position_drift(int extracted_index, int gold_index) {
  return std::abs(extracted_index - gold_index);
}

int position_drift(std::span<const int> extracted, std::span<const int> gold) {
  if (extracted.empty() || gold.empty()) {
    throw PreconditionError("position_drift needs non-empty index sets");
  }
  int best = std::numeric_limits<int>::max();
  for (int e : extracted) {
    for (int g : gold) best = std::min(best, position_drift(e, g));
  }
  return best;
}

EvalReport evaluate_rows(std::span<const EvalRow> rows) {
  EvalReport report;
  report.rows = rows.size();
  for (RetrievalOutcome o : kAllOutcomes) report.outcome_histogram[o] = 0;

  std::vector<double> all_scores;
  std::vector<SimilarityLabel> all_gold;
  std::vector<double> graded_scores;
  std::vector<SimilarityLabel> graded_gold;
  std::vector<AspectScore> abstain_scores;
  std::vector<SimilarityLabel> abstain_gold;
  std::vector<SimilarityLabel> annot_gold;
  std::vector<SimilarityLabel> annot_other;
  double drift_sum = 0.0;
  std::size_t drift_count = 0;

  for (const EvalRow& row : rows) {
    all_scores.push_back(row.score);
    all_gold.push_back(row.gold);
    if (is_graded(row.gold)) {
      ++report.graded;
      graded_scores.push_back(row.score);
      graded_gold.push_back(row.gold);
    } else if (row.gold == SimilarityLabel::kNotFound) {
      ++report.not_found;
    }
    if (row.method == Method::kAspectSim) {
      AspectScore s;
      s.abstained = row.abstained;
      abstain_scores.push_back(s);
      abstain_gold.push_back(row.gold);
    }
    if (row.annotation) {
      annot_gold.push_back(row.gold);
      annot_other.push_back(*row.annotation);
    }
    if (!tracks_retrieval(row)) continue;
    if (is_graded(row.gold)) {
      ++report.outcome_histogram[retrieval_outcome(
          row.extracted_a, row.extracted_b, row.gold_a, row.gold_b, *row.mode)];
    }
    for (const auto& [ext, gold] :
         {std::pair{&row.extracted_a, &row.gold_a},
          std::pair{&row.extracted_b, &row.gold_b}}) {
      if (ext->is_grounded() && gold->is_grounded()) {
        drift_sum += position_drift(ext->sentence_indices, gold->sentence_indices);
        ++drift_count;
      }
    }
  }

  auto try_spearman = [&](const std::vector<double>& pred,
                          const std::vector<SimilarityLabel>& gold,
                          std::string_view what) -> std::optional<double> {
    try {
      return spearman(pred, gold);
    } catch (const DegenerateInput& e) {
      report.warnings.push_back(fmt::format("spearman ({}): {}", what, e.what()));
      return std::nullopt;
    }
  };
  report.spearman_with_not_found = try_spearman(all_scores, all_gold, "with Not Found");
  report.spearman_graded_only = try_spearman(graded_scores, graded_gold, "graded only");

  if (!abstain_scores.empty()) {
    try {
      report.robustness_pct = robustness_rate(abstain_scores, abstain_gold);
    } catch (const NoNegativeInstances&) {
      report.warnings.push_back("robustness: not applicable (no Not Found rows)");
    }
  }
  if (!annot_gold.empty()) report.kappa = cohen_kappa(annot_gold, annot_other);
  if (drift_count > 0) {
    report.mean_drift = drift_sum / static_cast<double>(drift_count);
  }
  return report;
}

std::string_view to_string(Grouping grouping) {
  for (const auto& [value, name] : kGroupingNames) {
    if (value == grouping) return name;
  }
  return "dataset";
}

std::optional<Grouping> grouping_from_string(std::string_view text) {
  const std::string lowered = to_lower(trim(text));
  for (const auto& [value, name] : kGroupingNames) {
    if (name == lowered) return value;
  }
  return std::nullopt;
}

std::string_view doc_length_bin(std::size_t sentences) {
  if (sentences <= 25) return "S";
  if (sentences <= 50) return "M";
  if (sentences <= 100) return "L";
  return "VL";
}

std::string_view position_bin(int index, std::size_t sentences) {
  if (index < 0 || static_cast<std::size_t>(index) >= sentences) {
    throw MissingMetadata(
        fmt::format("sentence index {} outside a {}-sentence document", index,
                    sentences));
  }
  const std::size_t scaled = static_cast<std::size_t>(index) * 3;
  if (scaled < sentences) return "Early";
  if (scaled < 2 * sentences) return "Mid";
  return "Late";
}

std::string_view aspect_length_bin(std::size_t tokens) {
  if (tokens <= 3) return "1-3";
  if (tokens <= 6) return "4-6";
  if (tokens <= 9) return "7-9";
  if (tokens <= 12) return "10-12";
  return "13+";
}

std::optional<std::string> model_size_band(std::string_view model_name) {
  static const std::regex kSize(R"((\d+(?:\.\d+)?)\s*[bB](?![a-zA-Z]))");
  const std::string name(model_name);
  std::smatch m;
  if (!std::regex_search(name, m, kSize)) return std::nullopt;
  const double billions = std::stod(m[1].str());
  if (billions <= 3.5) return "<=3B";
  if (billions <= 10.0) return "4-10B";
  if (billions <= 26.0) return "11-26B";
  return ">=27B";
}

std::string bin_label(const EvalRow& row, Grouping grouping) {
  switch (grouping) {
    case Grouping::kDataset:
      return std::string(to_string(row.source));
    case Grouping::kAspectLength:
      if (row.aspect_tokens == 0) {
        throw MissingMetadata("row " + row.instance_id + " has no aspect length");
      }
      return std::string(aspect_length_bin(row.aspect_tokens));
    case Grouping::kDocLengthPair:
      if (row.doc_a_sentences == 0 || row.doc_b_sentences == 0) {
        throw MissingMetadata("row " + row.instance_id + " has no document lengths");
      }
      return fmt::format("{}-{}", doc_length_bin(row.doc_a_sentences),
                         doc_length_bin(row.doc_b_sentences));
    case Grouping::kSentencePosition: {
      if (row.gold_a.is_grounded()) {
        return std::string(
            position_bin(row.gold_a.sentence_indices.front(), row.doc_a_sentences));
      }
      if (row.gold_b.is_grounded()) {
        return std::string(
            position_bin(row.gold_b.sentence_indices.front(), row.doc_b_sentences));
      }
      throw MissingMetadata("row " + row.instance_id + " has no gold sentence");
    }
    case Grouping::kModelSizeBand: {
      auto band = model_size_band(row.llm);
      if (!band) {
        throw MissingMetadata("row " + row.instance_id +
                              " has no model size in '" + row.llm + "'");
      }
      return *band;
    }
  }
  throw MissingMetadata("unknown grouping");
}

std::map<std::string, EvalReport> group_report(std::span<const EvalRow> rows,
                                               Grouping grouping) {
  std::map<std::string, std::vector<EvalRow>> bins;
  for (const EvalRow& row : rows) bins[bin_label(row, grouping)].push_back(row);
  std::map<std::string, EvalReport> out;
  for (const auto& [label, members] : bins) out[label] = evaluate_rows(members);
  return out;
}

}  // namespace aspectsim
