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

// Data model for aspect-conditioned similarity corpora, the JSONL corpus
// format, pair sampling and dataset statistics.
//
// A corpus file is line-delimited JSON with two record kinds:
//
//   {"kind":"document","id":...,"text":...,"sentences":[...],"source":...}
//   {"kind":"instance","id":...,"doc_a":...,"doc_b":...,"aspect":...,
//    "evidence_a":{"indices":[...],"text":...},"evidence_b":{...},
//    "label":...,"rationale":...}
//
// Documents must appear before the instances that reference them. The
// instance "id" is optional on input (defaults to "i<ordinal>") and always
// written on output. A document record without "sentences" is segmented with
// split_sentences(); one without "text" gets its sentences joined by spaces.

#ifndef ASPECTSIM_CORPUS_H_
#define ASPECTSIM_CORPUS_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aspectsim/embedding.h"

namespace aspectsim {

enum class SourceDataset { kWiki, kMslr, kSide, kPeer, kHotel, kOther };

std::string_view to_string(SourceDataset source);
// Unknown names map to kOther.
SourceDataset source_from_string(std::string_view name);

struct Document {
  std::string id;
  std::string raw_text;
  std::vector<std::string> sentences;
  SourceDataset source = SourceDataset::kOther;

  // Segments `text` with split_sentences().
  static Document from_text(std::string id, std::string text,
                            SourceDataset source = SourceDataset::kOther);

  std::size_t size() const { return sentences.size(); }

  friend bool operator==(const Document&, const Document&) = default;
};

class Aspect {
 public:
  Aspect() = default;
  // Throws PreconditionError if `text` is blank.
  explicit Aspect(std::string text);

  const std::string& text() const { return text_; }
  std::size_t token_count() const;

  friend bool operator==(const Aspect&, const Aspect&) = default;

 private:
  std::string text_;
};

// Aspect-relevant content from one document. Grounded evidence carries the
// sentence indices it was reconstructed from; free-text evidence (summaries)
// has text but no indices; abstention has neither.
struct Evidence {
  std::vector<int> sentence_indices;
  std::string text;

  bool is_empty() const { return text.empty() && sentence_indices.empty(); }
  bool is_grounded() const { return !sentence_indices.empty(); }

  static Evidence none() { return {}; }
  // Indices must be valid for `doc`; text is rebuilt from them.
  static Evidence from_indices(const Document& doc, std::vector<int> indices);
  static Evidence free_text(std::string text);

  friend bool operator==(const Evidence&, const Evidence&) = default;
};

enum class SimilarityLabel {
  kHighlySimilar,
  kSomewhatSimilar,
  kMarginallySimilar,
  kNotFound,
  kNotSimilar,
};

inline constexpr std::array<SimilarityLabel, 5> kAllLabels = {
    SimilarityLabel::kHighlySimilar, SimilarityLabel::kSomewhatSimilar,
    SimilarityLabel::kMarginallySimilar, SimilarityLabel::kNotFound,
    SimilarityLabel::kNotSimilar};

// "Highly Similar", "Somewhat Similar", ...
std::string_view to_string(SimilarityLabel label);
std::optional<SimilarityLabel> label_from_string(std::string_view text);
// Highly, Somewhat or Marginally.
bool is_graded(SimilarityLabel label);

struct AspectInstance {
  std::string id;
  std::string doc_a_id;
  std::string doc_b_id;
  Aspect aspect;
  Evidence gold_evidence_a;
  Evidence gold_evidence_b;
  SimilarityLabel gold_label = SimilarityLabel::kHighlySimilar;
  std::string rationale;

  friend bool operator==(const AspectInstance&,
                         const AspectInstance&) = default;
};

class Corpus {
 public:
  // Throws ParseError on a duplicate id.
  void add_document(Document doc);
  // Validates references against the documents added so far. Throws
  // ReferenceError.
  void add_instance(AspectInstance instance);

  const std::vector<Document>& documents() const { return documents_; }
  const std::vector<AspectInstance>& instances() const { return instances_; }

  const Document* find(std::string_view id) const;
  // Throws ReferenceError when absent.
  const Document& document(std::string_view id) const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.documents_ == b.documents_ && a.instances_ == b.instances_;
  }

 private:
  std::vector<Document> documents_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<AspectInstance> instances_;
};

// Throws ReferenceError if an index is out of range or the evidence text
// does not match its indices, and PreconditionError if the instance breaks
// the NotFound/graded evidence rules.
void validate_instance(const AspectInstance& instance, const Document& doc_a,
                       const Document& doc_b);

// Throws ParseError (with the 1-based line) or ReferenceError.
Corpus parse_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);

void write_corpus(const Corpus& corpus, std::ostream& out);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Finds the contiguous run of sentences whose whitespace-normalized join
// equals the normalized `text`. Surrounding quotes are ignored. Returns
// nullopt when no run matches.
std::optional<Evidence> ground_evidence(const Document& doc,
                                        std::string_view text);

// True if the normalized `text` occurs anywhere in the normalized document.
bool occurs_in(const Document& doc, std::string_view text);

struct DocumentPair {
  std::string doc_a;
  std::string doc_b;
  double cosine = 0.0;

  friend bool operator==(const DocumentPair&, const DocumentPair&) = default;
};

// Every unordered pair whose whole-document cosine lies in [low, high]
// (inclusive). Pairs are keyed by (smaller id, larger id) and returned in
// that order, so the result does not depend on input order. Documents with a
// repeated id are considered once.
std::vector<DocumentPair> sample_pairs(const std::vector<Document>& documents,
                                       const EmbedFn& embed, double low,
                                       double high);

struct SourceStats {
  std::map<SimilarityLabel, std::size_t> label_counts;
  std::size_t single_sentence_aspects = 0;
  std::size_t multi_sentence_aspects = 0;
  std::size_t doc_pairs = 0;
  double avg_doc_a_length = 0.0;
  double avg_doc_b_length = 0.0;
  double avg_aspects_per_pair = 0.0;
  std::size_t min_doc_length = 0;
  std::size_t max_doc_length = 0;

  std::size_t total_aspects() const {
    return single_sentence_aspects + multi_sentence_aspects;
  }
};

struct StatsReport {
  std::map<SourceDataset, SourceStats> per_source;
  SourceStats overall;
  std::size_t instance_count = 0;
};

// An instance belongs to the source of its first document. An aspect counts
// as single-sentence when every non-empty gold evidence spans one sentence.
StatsReport dataset_stats(const Corpus& corpus);

// One row per statistic, one column per source plus "Overall".
std::string stats_to_csv(const StatsReport& report);

}  // namespace aspectsim

#endif  // ASPECTSIM_CORPUS_H_
