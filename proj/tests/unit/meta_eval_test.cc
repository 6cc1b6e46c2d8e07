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

#include <random>

#include <gtest/gtest.h>

#include "aspectsim/errors.h"
#include "stat_oracles.h"

namespace aspectsim {
namespace {

using L = SimilarityLabel;
constexpr L H = L::kHighlySimilar;
constexpr L S = L::kSomewhatSimilar;
constexpr L M = L::kMarginallySimilar;
constexpr L NF = L::kNotFound;

TEST(LabelRank, Ordering) {
  EXPECT_EQ(label_rank(H), 3);
  EXPECT_EQ(label_rank(S), 2);
  EXPECT_EQ(label_rank(M), 1);
  EXPECT_EQ(label_rank(NF), 0);
}

TEST(AverageRanks, TiesShareMean) {
  EXPECT_EQ(average_ranks(std::vector<double>{10, 20, 20, 5}),
            (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(Spearman, MonotoneAndReversed) {
  const std::vector<L> gold = {NF, M, S, H};
  EXPECT_DOUBLE_EQ(spearman(std::vector<double>{0.1, 0.2, 0.3, 0.9}, gold), 1.0);
  EXPECT_DOUBLE_EQ(spearman(std::vector<double>{0.9, 0.3, 0.2, 0.1}, gold), -1.0);
}

TEST(Spearman, SixElementTiedExample) {
  // Rank-then-Pearson by hand: ranks (5.5,5.5,3.5,2,3.5,1) vs
  // (6,4.5,4.5,2.5,1,2.5); covariance sum 11, both variance sums 33/2,
  // so rho = 11 / 16.5 = 2/3.
  const std::vector<double> pred = {0.9, 0.9, 0.5, 0.2, 0.5, 0.1};
  const std::vector<L> gold = {H, S, S, M, NF, M};
  EXPECT_NEAR(spearman(pred, gold), 2.0 / 3.0, 1e-12);
}

TEST(Spearman, Errors) {
  EXPECT_THROW(spearman(std::vector<double>{1, 2}, std::vector<double>{1}), LengthMismatch);
  EXPECT_THROW(spearman(std::vector<double>{1}, std::vector<double>{1}), DegenerateInput);
  EXPECT_THROW(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DegenerateInput);
}

TEST(SpearmanProperty, MonotoneTransformsAndNegation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 3 + trial % 10;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = std::round(u(rng) * 4) / 4;
    for (auto& v : y) v = std::round(u(rng) * 2) / 2;
    double rho;
    try {
      rho = spearman(x, y);
    } catch (const DegenerateInput&) {
      continue;
    }
    std::vector<double> cube = x, affine = x, neg = x;
    for (auto& v : cube) v = v * v * v;
    for (auto& v : affine) v = 2 * v + 7;
    for (auto& v : neg) v = -v;
    EXPECT_NEAR(spearman(cube, y), rho, 1e-12);
    EXPECT_NEAR(spearman(affine, y), rho, 1e-12);
    EXPECT_NEAR(spearman(neg, y), -rho, 1e-12);
  }
}

TEST(CohenKappa, Examples) {
  const std::vector<L> a = {H, S, M, NF, H};
  EXPECT_DOUBLE_EQ(cohen_kappa(a, a), 1.0);
  // Confusion-matrix oracle: p_o = 1/5 (one S/S agreement), p_e = 1/5
  // (only the S column is populated), kappa = 0.
  const std::vector<L> varying = {H, S, M, S, NF};
  const std::vector<L> constant(5, S);
  EXPECT_NEAR(cohen_kappa(varying, constant), 0.0, 1e-12);
  // {(H,H),(H,S),(S,S),(M,M)}: p_o = 3/4, p_e = 5/16, kappa = 7/11.
  EXPECT_NEAR(cohen_kappa(std::vector<L>{H, H, S, M}, std::vector<L>{H, S, S, M}), 7.0 / 11.0,
              1e-12);
  EXPECT_DOUBLE_EQ(cohen_kappa(constant, constant), 1.0);
  EXPECT_THROW(cohen_kappa(std::vector<L>{}, std::vector<L>{}), LengthMismatch);
  EXPECT_THROW(cohen_kappa(std::vector<L>{H}, std::vector<L>{H, S}), LengthMismatch);
}

TEST(CohenKappaProperty, SymmetricAndMatchesOracle) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 12;
    std::vector<L> a(n), b(n);
    for (auto& v : a) v = kAllLabels[rng() % 4];
    for (auto& v : b) v = kAllLabels[rng() % 4];
    EXPECT_NEAR(cohen_kappa(a, b), cohen_kappa(b, a), 1e-12);
    EXPECT_NEAR(cohen_kappa(a, b), testing::oracle_kappa(a, b), 1e-12);
  }
}

AspectScore score(bool abstained) {
  AspectScore s;
  s.abstained = abstained;
  return s;
}

TEST(RobustnessRate, Ratios) {
  EXPECT_DOUBLE_EQ(robustness_rate(std::vector<AspectScore>{score(true), score(true)},
                                   std::vector<L>{NF, NF}),
                   100.0);
  EXPECT_DOUBLE_EQ(robustness_rate(std::vector<AspectScore>{score(true), score(false), score(true),
                                                            score(true), score(false)},
                                   std::vector<L>{NF, NF, NF, NF, H}),
                   75.0);
  EXPECT_THROW(robustness_rate(std::vector<AspectScore>{score(true)}, std::vector<L>{H}),
               NoNegativeInstances);
}

Evidence ev(std::vector<int> idx) { return {std::move(idx), "x"}; }

TEST(RetrievalOutcome, Categories) {
  const auto sent = ExtractionMode::kSentenceLevel;
  const auto span = ExtractionMode::kSpanLevel;
  EXPECT_EQ(retrieval_outcome(ev({1}), ev({2}), ev({1}), ev({2, 3}), sent), RetrievalOutcome::kBM);
  EXPECT_EQ(retrieval_outcome(Evidence::none(), ev({2}), ev({1}), ev({2}), sent), RetrievalOutcome::kFE);
  EXPECT_EQ(retrieval_outcome(ev({1}), Evidence::none(), ev({1}), ev({2}), sent), RetrievalOutcome::kSE);
  EXPECT_EQ(retrieval_outcome(Evidence::none(), Evidence::none(), ev({1}), ev({2}), sent),
            RetrievalOutcome::kBE);
  EXPECT_EQ(retrieval_outcome(ev({0}), ev({0}), ev({1}), ev({2}), sent), RetrievalOutcome::kBMM);
  EXPECT_EQ(retrieval_outcome(ev({0}), ev({2}), ev({1}), ev({2}), sent), RetrievalOutcome::kFMM);
  EXPECT_EQ(retrieval_outcome(ev({1}), ev({0}), ev({1}), ev({2}), sent), RetrievalOutcome::kSMM);
  EXPECT_EQ(retrieval_outcome(ev({0, 1}), ev({2, 5}), ev({1}), ev({2}), span), RetrievalOutcome::kBM);
  EXPECT_EQ(retrieval_outcome(ev({0, 3}), ev({2, 5}), ev({1}), ev({2}), span), RetrievalOutcome::kFMM);
}

TEST(PositionDrift, Distances) {
  EXPECT_EQ(position_drift(4, 4), 0);
  EXPECT_EQ(position_drift(10, 3), 7);
  EXPECT_EQ(position_drift(std::vector<int>{1, 9}, std::vector<int>{6, 7}), 2);
}

TEST(Bins, Boundaries) {
  EXPECT_EQ(doc_length_bin(25), "S");
  EXPECT_EQ(doc_length_bin(26), "M");
  EXPECT_EQ(doc_length_bin(30), "M");
  EXPECT_EQ(doc_length_bin(50), "M");
  EXPECT_EQ(doc_length_bin(51), "L");
  EXPECT_EQ(doc_length_bin(100), "L");
  EXPECT_EQ(doc_length_bin(101), "VL");
  EXPECT_EQ(position_bin(0, 9), "Early");
  EXPECT_EQ(position_bin(3, 9), "Mid");
  EXPECT_EQ(position_bin(8, 9), "Late");
  EXPECT_THROW(position_bin(9, 9), MissingMetadata);
  EXPECT_EQ(aspect_length_bin(1), "1-3");
  EXPECT_EQ(aspect_length_bin(4), "4-6");
  EXPECT_EQ(aspect_length_bin(13), "13+");
  EXPECT_EQ(model_size_band("qwen-2.5-32b").value(), ">=27B");
  EXPECT_EQ(model_size_band("Llama-3.2-1B-Instruct").value(), "<=3B");
  EXPECT_EQ(model_size_band("mistral-7b").value(), "4-10B");
  EXPECT_EQ(model_size_band("gemma-2-12b-it").value(), "11-26B");
  EXPECT_FALSE(model_size_band("gpt-4o").has_value());
}

EvalRow row(const std::string& id, double score, L gold, bool abstained = false) {
  EvalRow r;
  r.instance_id = id;
  r.method = Method::kAspectSim;
  r.mode = ExtractionMode::kSentenceLevel;
  r.llm = "m-8b";
  r.score = score;
  r.abstained = abstained;
  r.gold = gold;
  r.doc_a_sentences = 10;
  r.doc_b_sentences = 40;
  r.aspect_tokens = 2;
  if (gold == NF) {
    r.gold_a = ev({1});
  } else {
    r.gold_a = ev({1});
    r.gold_b = ev({2});
    r.extracted_a = ev({1});
    r.extracted_b = ev({3});
  }
  return r;
}

TEST(EvaluateRows, HistogramSumsToGradedCount) {
  const std::vector<EvalRow> rows = {row("a", 0.9, H), row("b", 0.5, S), row("c", 0.2, M),
                                     row("d", 0.0, NF, true), row("e", 0.4, NF, false)};
  const EvalReport r = evaluate_rows(rows);
  EXPECT_EQ(r.graded, 3u);
  EXPECT_EQ(r.not_found, 2u);
  std::size_t total = 0;
  for (const auto& [outcome, n] : r.outcome_histogram) total += n;
  EXPECT_EQ(total, r.graded);
  EXPECT_EQ(r.outcome_histogram.at(RetrievalOutcome::kSMM), 3u);
  EXPECT_DOUBLE_EQ(r.robustness_pct.value(), 50.0);
  EXPECT_DOUBLE_EQ(r.spearman_graded_only.value(), 1.0);
  EXPECT_TRUE(r.spearman_with_not_found.has_value());
  // Per side: a drifts 0, b drifts 1.
  EXPECT_DOUBLE_EQ(r.mean_drift.value(), 0.5);
  EXPECT_FALSE(r.kappa.has_value());
}

TEST(EvaluateRows, NoNotFoundMeansRobustnessNotApplicable) {
  const std::vector<EvalRow> rows = {row("a", 0.9, H), row("b", 0.5, S)};
  const EvalReport r = evaluate_rows(rows);
  EXPECT_FALSE(r.robustness_pct.has_value());
  EXPECT_DOUBLE_EQ(r.spearman_graded_only.value(), 1.0);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(EvaluateRows, DegenerateGroupWarnsInsteadOfThrowing) {
  const std::vector<EvalRow> rows = {row("a", 0.5, H)};
  const EvalReport r = evaluate_rows(rows);
  EXPECT_FALSE(r.spearman_graded_only.has_value());
  EXPECT_FALSE(r.warnings.empty());
}

TEST(GroupReport, BinsPartitionRows) {
  std::vector<EvalRow> rows = {row("a", 0.9, H), row("b", 0.5, S), row("c", 0.2, M)};
  rows[1].source = SourceDataset::kHotel;
  rows[2].gold_a = ev({8});
  const auto by_source = group_report(rows, Grouping::kDataset);
  EXPECT_EQ(by_source.at("Other").rows, 2u);
  EXPECT_EQ(by_source.at("Hotel").rows, 1u);
  const auto by_position = group_report(rows, Grouping::kSentencePosition);
  EXPECT_EQ(by_position.at("Early").rows, 2u);
  EXPECT_EQ(by_position.at("Late").rows, 1u);
  const auto by_length = group_report(rows, Grouping::kDocLengthPair);
  ASSERT_EQ(by_length.size(), 1u);
  const auto by_model = group_report(rows, Grouping::kModelSizeBand);
  EXPECT_EQ(by_model.at("4-10B").rows, 3u);
  rows[0].llm = "gpt-4o";
  EXPECT_THROW(group_report(rows, Grouping::kModelSizeBand), MissingMetadata);
}

}  // namespace
}  // namespace aspectsim
