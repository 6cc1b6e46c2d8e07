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

#include "aspectsim/corpus.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "aspectsim/errors.h"
#include "aspectsim/text.h"

namespace aspectsim {

using json = nlohmann::json;

namespace {

constexpr std::array<std::pair<SourceDataset, std::string_view>, 6>
    kSourceNames = {{{SourceDataset::kWiki, "Wiki"},
                     {SourceDataset::kMslr, "MSLR"},
                     {SourceDataset::kSide, "Side"},
                     {SourceDataset::kPeer, "Peer"},
                     {SourceDataset::kHotel, "Hotel"},
                     {SourceDataset::kOther, "Other"}}};

constexpr std::array<std::pair<SimilarityLabel, std::string_view>, 5>
    kLabelNames = {{{SimilarityLabel::kHighlySimilar, "Highly Similar"},
                    {SimilarityLabel::kSomewhatSimilar, "Somewhat Similar"},
                    {SimilarityLabel::kMarginallySimilar, "Marginally Similar"},
                    {SimilarityLabel::kNotFound, "Not Found"},
                    {SimilarityLabel::kNotSimilar, "Not Similar"}}};

std::string_view strip_quotes(std::string_view text) {
  text = trim(text);
  while (text.size() >= 2) {
    const char f = text.front();
    const char b = text.back();
    if ((f == '"' && b == '"') || (f == '\'' && b == '\'')) {
      text = trim(text.substr(1, text.size() - 2));
    } else {
      break;
    }
  }
  return text;
}

json evidence_to_json(const Evidence& ev) {
  return json{{"indices", ev.sentence_indices}, {"text", ev.text}};
}

Evidence evidence_from_json(const json& j) {
  Evidence ev;
  if (j.is_null()) return ev;
  if (!j.is_object()) throw Error("evidence must be an object");
  if (j.contains("indices")) {
    ev.sentence_indices = j.at("indices").get<std::vector<int>>();
  }
  if (j.contains("text")) ev.text = j.at("text").get<std::string>();
  return ev;
}

const std::string& required_string(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw Error(fmt::format("missing string field \"{}\"", key));
  }
  return j.at(key).get_ref<const std::string&>();
}

void check_evidence(const Evidence& ev, const Document& doc,
                    const char* side) {
  for (int idx : ev.sentence_indices) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= doc.size()) {
      throw ReferenceError(fmt::format(
          "evidence_{} index {} out of range for document '{}' ({} sentences)",
          side, idx, doc.id, doc.size()));
    }
  }
  if (ev.is_grounded()) {
    std::string rebuilt;
    for (int idx : ev.sentence_indices) {
      if (!rebuilt.empty()) rebuilt.push_back(' ');
      rebuilt += doc.sentences[static_cast<std::size_t>(idx)];
    }
    if (normalize_whitespace(rebuilt) != normalize_whitespace(ev.text)) {
      throw ReferenceError(fmt::format(
          "evidence_{} text does not match its sentence indices in '{}'", side,
          doc.id));
    }
  }
}

}  // namespace

std::string_view to_string(SourceDataset source) {
  for (const auto& [value, name] : kSourceNames) {
    if (value == source) return name;
  }
  return "Other";
}

SourceDataset source_from_string(std::string_view name) {
  const std::string lowered = to_lower(name);
  for (const auto& [value, text] : kSourceNames) {
    if (to_lower(text) == lowered) return value;
  }
  return SourceDataset::kOther;
}

Document Document::from_text(std::string id, std::string text,
                             SourceDataset source) {
  Document doc;
  doc.id = std::move(id);
  doc.sentences = split_sentences(text);
  doc.raw_text = std::move(text);
  doc.source = source;
  return doc;
}

Aspect::Aspect(std::string text) : text_(std::move(text)) {
  if (trim(text_).empty()) throw PreconditionError("aspect text is blank");
}

std::size_t Aspect::token_count() const { return count_tokens(text_); }

Evidence Evidence::from_indices(const Document& doc, std::vector<int> indices) {
  Evidence ev;
  for (int idx : indices) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= doc.size()) {
      throw ReferenceError(fmt::format("sentence index {} out of range for '{}'",
                                       idx, doc.id));
    }
    if (!ev.text.empty()) ev.text.push_back(' ');
    ev.text += doc.sentences[static_cast<std::size_t>(idx)];
  }
  ev.sentence_indices = std::move(indices);
  return ev;
}

Evidence Evidence::free_text(std::string text) {
  Evidence ev;
  ev.text = normalize_whitespace(text);
  return ev;
}

std::string_view to_string(SimilarityLabel label) {
  for (const auto& [value, name] : kLabelNames) {
    if (value == label) return name;
  }
  return "Not Found";
}

std::optional<SimilarityLabel> label_from_string(std::string_view text) {
  const std::string wanted = to_lower(normalize_whitespace(text));
  for (const auto& [value, name] : kLabelNames) {
    if (to_lower(name) == wanted) return value;
  }
  return std::nullopt;
}

bool is_graded(SimilarityLabel label) {
  return label == SimilarityLabel::kHighlySimilar ||
         label == SimilarityLabel::kSomewhatSimilar ||
         label == SimilarityLabel::kMarginallySimilar;
}

void Corpus::add_document(Document doc) {
  if (index_.contains(doc.id)) {
    throw ParseError("duplicate document id '" + doc.id + "'", 0);
  }
  index_.emplace(doc.id, documents_.size());
  documents_.push_back(std::move(doc));
}

void Corpus::add_instance(AspectInstance instance) {
  validate_instance(instance, document(instance.doc_a_id),
                    document(instance.doc_b_id));
  instances_.push_back(std::move(instance));
}

const Document* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &documents_[it->second];
}

const Document& Corpus::document(std::string_view id) const {
  const Document* doc = find(id);
  if (doc == nullptr) {
    throw ReferenceError("unknown document id '" + std::string(id) + "'");
  }
  return *doc;
}

void validate_instance(const AspectInstance& instance, const Document& doc_a,
                       const Document& doc_b) {
  check_evidence(instance.gold_evidence_a, doc_a, "a");
  check_evidence(instance.gold_evidence_b, doc_b, "b");
  const bool empty_a = instance.gold_evidence_a.is_empty();
  const bool empty_b = instance.gold_evidence_b.is_empty();
  if (instance.gold_label == SimilarityLabel::kNotFound) {
    if (empty_a == empty_b) {
      throw PreconditionError(
          "Not Found instance '" + instance.id +
          "' must have exactly one empty evidence side");
    }
  } else if (is_graded(instance.gold_label) && (empty_a || empty_b)) {
    throw PreconditionError("graded instance '" + instance.id +
                            "' needs evidence on both sides");
  }
}

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  std::size_t ordinal = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const json record = json::parse(line);
      if (!record.is_object()) throw Error("record is not a JSON object");
      const std::string& kind = required_string(record, "kind");
      if (kind == "document") {
        Document doc;
        doc.id = required_string(record, "id");
        if (record.contains("sentences")) {
          doc.sentences = record.at("sentences").get<std::vector<std::string>>();
          for (const auto& s : doc.sentences) {
            if (trim(s).empty()) throw Error("empty sentence in '" + doc.id + "'");
          }
          doc.raw_text = record.contains("text")
                             ? required_string(record, "text")
                             : join_sentences(doc.sentences, 0, doc.sentences.size());
        } else {
          doc.raw_text = required_string(record, "text");
          doc.sentences = split_sentences(doc.raw_text);
        }
        doc.source = source_from_string(record.value("source", "Other"));
        corpus.add_document(std::move(doc));
      } else if (kind == "instance") {
        AspectInstance inst;
        inst.id = record.contains("id") ? record.at("id").get<std::string>()
                                        : "i" + std::to_string(ordinal);
        inst.doc_a_id = required_string(record, "doc_a");
        inst.doc_b_id = required_string(record, "doc_b");
        inst.aspect = Aspect(required_string(record, "aspect"));
        inst.gold_evidence_a = evidence_from_json(record.value("evidence_a", json()));
        inst.gold_evidence_b = evidence_from_json(record.value("evidence_b", json()));
        const std::string& label = required_string(record, "label");
        auto parsed = label_from_string(label);
        if (!parsed) throw Error("unknown label \"" + label + "\"");
        inst.gold_label = *parsed;
        inst.rationale = record.value("rationale", "");
        corpus.add_instance(std::move(inst));
        ++ordinal;
      } else {
        throw Error("unknown record kind \"" + kind + "\"");
      }
    } catch (const ReferenceError& e) {
      throw ReferenceError(fmt::format("line {}: {}", line_no, e.what()));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    } catch (const json::exception& e) {
      throw ParseError(e.what(), line_no);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file " + path.string(), 0);
  return parse_corpus(in);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const Document& doc : corpus.documents()) {
    json record = {{"kind", "document"},
                   {"id", doc.id},
                   {"text", doc.raw_text},
                   {"sentences", doc.sentences},
                   {"source", std::string(to_string(doc.source))}};
    out << record.dump() << '\n';
  }
  for (const AspectInstance& inst : corpus.instances()) {
    json record = {{"kind", "instance"},
                   {"id", inst.id},
                   {"doc_a", inst.doc_a_id},
                   {"doc_b", inst.doc_b_id},
                   {"aspect", inst.aspect.text()},
                   {"evidence_a", evidence_to_json(inst.gold_evidence_a)},
                   {"evidence_b", evidence_to_json(inst.gold_evidence_b)},
                   {"label", std::string(to_string(inst.gold_label))},
                   {"rationale", inst.rationale}};
    out << record.dump() << '\n';
  }
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write corpus file " + path.string());
  write_corpus(corpus, out);
}

std::optional<Evidence> ground_evidence(const Document& doc,
                                        std::string_view text) {
  const std::string target = normalize_whitespace(strip_quotes(text));
  if (target.empty()) return std::nullopt;
  const std::size_t n = doc.size();
  for (std::size_t begin = 0; begin < n; ++begin) {
    const std::string& first = doc.sentences[begin];
    if (target.compare(0, first.size(), first) != 0) continue;
    std::string joined;
    for (std::size_t end = begin; end < n; ++end) {
      if (!joined.empty()) joined.push_back(' ');
      joined += doc.sentences[end];
      if (joined.size() > target.size()) break;
      if (joined == target) {
        std::vector<int> indices;
        for (std::size_t k = begin; k <= end; ++k) {
          indices.push_back(static_cast<int>(k));
        }
        return Evidence::from_indices(doc, std::move(indices));
      }
    }
  }
  return std::nullopt;
}

bool occurs_in(const Document& doc, std::string_view text) {
  const std::string needle = normalize_whitespace(strip_quotes(text));
  if (needle.empty()) return false;
  return join_sentences(doc.sentences, 0, doc.size()).find(needle) !=
         std::string::npos;
}

std::vector<DocumentPair> sample_pairs(const std::vector<Document>& documents,
                                       const EmbedFn& embed, double low,
                                       double high) {
  if (!(low < high)) throw PreconditionError("sample_pairs requires low < high");
  std::vector<const Document*> unique;
  std::set<std::string> seen;
  for (const Document& doc : documents) {
    if (seen.insert(doc.id).second) unique.push_back(&doc);
  }
  std::sort(unique.begin(), unique.end(),
            [](const Document* a, const Document* b) { return a->id < b->id; });
  if (unique.size() < 2) return {};

  std::vector<std::string> texts;
  texts.reserve(unique.size());
  for (const Document* doc : unique) texts.push_back(doc->raw_text);
  const std::vector<EmbeddingVector> vectors = embed(texts);
  if (vectors.size() != unique.size()) {
    throw EmbeddingError("embedding backend returned a wrong number of vectors");
  }
  for (const auto& v : vectors) {
    if (v.dim() != vectors.front().dim()) {
      throw DimensionMismatch("embedding backend returned ragged vectors");
    }
  }

  std::vector<DocumentPair> pairs;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    for (std::size_t j = i + 1; j < unique.size(); ++j) {
      const double c = cosine(vectors[i], vectors[j]);
      if (c >= low && c <= high) {
        pairs.push_back({unique[i]->id, unique[j]->id, c});
      }
    }
  }
  return pairs;
}

StatsReport dataset_stats(const Corpus& corpus) {
  StatsReport report;
  report.instance_count = corpus.instances().size();

  struct Accumulator {
    std::set<std::pair<std::string, std::string>> pairs;
    double doc_a_total = 0.0;
    double doc_b_total = 0.0;
  };
  std::map<SourceDataset, Accumulator> acc;
  Accumulator overall_acc;

  auto add_pair = [](SourceStats& stats, Accumulator& a, const Document& da,
                     const Document& db) {
    if (!a.pairs.emplace(da.id, db.id).second) return;
    a.doc_a_total += static_cast<double>(da.size());
    a.doc_b_total += static_cast<double>(db.size());
    const std::size_t shortest = std::min(da.size(), db.size());
    stats.min_doc_length = stats.doc_pairs == 0
                               ? shortest
                               : std::min(stats.min_doc_length, shortest);
    stats.max_doc_length =
        std::max({stats.max_doc_length, da.size(), db.size()});
    ++stats.doc_pairs;
  };

  for (const AspectInstance& inst : corpus.instances()) {
    const Document& da = corpus.document(inst.doc_a_id);
    const Document& db = corpus.document(inst.doc_b_id);
    bool single = true;
    for (const Evidence* ev : {&inst.gold_evidence_a, &inst.gold_evidence_b}) {
      if (!ev->is_empty() && ev->sentence_indices.size() > 1) single = false;
    }
    for (auto* target : {&report.per_source[da.source], &report.overall}) {
      ++target->label_counts[inst.gold_label];
      if (single) {
        ++target->single_sentence_aspects;
      } else {
        ++target->multi_sentence_aspects;
      }
    }
    add_pair(report.per_source[da.source], acc[da.source], da, db);
    add_pair(report.overall, overall_acc, da, db);
  }

  auto finish = [](SourceStats& stats, const Accumulator& a) {
    if (stats.doc_pairs == 0) return;
    const double pairs = static_cast<double>(stats.doc_pairs);
    stats.avg_doc_a_length = a.doc_a_total / pairs;
    stats.avg_doc_b_length = a.doc_b_total / pairs;
    stats.avg_aspects_per_pair = static_cast<double>(stats.total_aspects()) / pairs;
  };
  for (auto& [source, stats] : report.per_source) finish(stats, acc[source]);
  finish(report.overall, overall_acc);
  return report;
}

std::string stats_to_csv(const StatsReport& report) {
  std::vector<std::pair<std::string, const SourceStats*>> columns;
  for (const auto& [source, stats] : report.per_source) {
    columns.emplace_back(std::string(to_string(source)), &stats);
  }
  columns.emplace_back("Overall", &report.overall);

  std::ostringstream out;
  out << "statistic";
  for (const auto& [name, _] : columns) out << ',' << name;
  out << '\n';
  auto row = [&](std::string_view name, auto value_of) {
    out << name;
    for (const auto& [_, stats] : columns) out << ',' << value_of(*stats);
    out << '\n';
  };
  for (SimilarityLabel label : kAllLabels) {
    row(to_string(label), [label](const SourceStats& s) {
      auto it = s.label_counts.find(label);
      return it == s.label_counts.end() ? std::size_t{0} : it->second;
    });
  }
  row("Aspects (single sentence)",
      [](const SourceStats& s) { return s.single_sentence_aspects; });
  row("Aspects (multi sentence)",
      [](const SourceStats& s) { return s.multi_sentence_aspects; });
  row("Total aspects", [](const SourceStats& s) { return s.total_aspects(); });
  row("Document pairs", [](const SourceStats& s) { return s.doc_pairs; });
  row("Avg doc 1 length", [](const SourceStats& s) {
    return fmt::format("{:.2f}", s.avg_doc_a_length);
  });
  row("Avg doc 2 length", [](const SourceStats& s) {
    return fmt::format("{:.2f}", s.avg_doc_b_length);
  });
  row("Avg aspects per pair", [](const SourceStats& s) {
    return fmt::format("{:.2f}", s.avg_aspects_per_pair);
  });
  row("Min doc length", [](const SourceStats& s) { return s.min_doc_length; });
  row("Max doc length", [](const SourceStats& s) { return s.max_doc_length; });
  return out.str();
}

}  // namespace aspectsim
