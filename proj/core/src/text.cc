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

#include "aspectsim/text.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <unordered_set>

namespace aspectsim {
namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_closing(char c) {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}';
}

bool is_opening_quote(char c) { return c == '"' || c == '\'' || c == '('; }

// Lower-cased, without the trailing period.
const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> kSet = {
      "mr",   "mrs",  "ms",   "dr",   "prof", "sr",   "jr",   "st",
      "vs",   "etc",  "e.g",  "i.e",  "u.s",  "u.k",  "inc",  "ltd",
      "co",   "corp", "no",   "fig",  "figs", "eq",   "al",   "approx",
      "jan",  "feb",  "mar",  "apr",  "jun",  "jul",  "aug",  "sep",
      "sept", "oct",  "nov",  "dec",  "gen",  "gov",  "sen",  "rep",
      "est",  "dept", "univ", "vol",  "p",    "pp",   "ph.d", "u.n"};
  return kSet;
}

// The word ending at position `end` (exclusive), i.e. the characters before a
// period back to the previous whitespace or opening bracket.
std::string word_before(std::string_view text, std::size_t end) {
  std::size_t begin = end;
  while (begin > 0 && !is_space(text[begin - 1]) && text[begin - 1] != '(' &&
         text[begin - 1] != '"') {
    --begin;
  }
  return std::string(text.substr(begin, end - begin));
}

bool is_abbreviation(std::string_view text, std::size_t period_pos) {
  const std::string word = to_lower(word_before(text, period_pos));
  if (word.empty()) return false;
  // Single-letter initials such as "J. Smith".
  if (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0]))) {
    return true;
  }
  return abbreviations().contains(word);
}

}  // namespace

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::size_t count_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::string sentence = normalize_whitespace(text.substr(start, end - start));
    if (!sentence.empty()) sentences.push_back(std::move(sentence));
    start = end;
  };

  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (c == '\n') {
      // Blank line: newline, optional horizontal space, newline.
      std::size_t j = i + 1;
      while (j < n && (text[j] == ' ' || text[j] == '\t' || text[j] == '\r')) ++j;
      if (j < n && text[j] == '\n') {
        emit(i);
        i = j;
      }
      continue;
    }
    if (c != '.' && c != '!' && c != '?') continue;

    std::size_t end = i + 1;
    while (end < n && (text[end] == '.' || text[end] == '!' || text[end] == '?')) {
      ++end;
    }
    while (end < n && is_closing(text[end])) ++end;
    if (end >= n || !is_space(text[end])) {
      i = end - 1;
      continue;
    }
    std::size_t next = end;
    while (next < n && is_space(text[next])) ++next;
    if (next >= n) break;
    char lead = text[next];
    if (is_opening_quote(lead) && next + 1 < n) lead = text[next + 1];
    const bool starts_sentence =
        std::isupper(static_cast<unsigned char>(lead)) != 0 ||
        std::isdigit(static_cast<unsigned char>(lead)) != 0;
    if (starts_sentence && !(c == '.' && is_abbreviation(text, i))) {
      emit(end);
    }
    i = end - 1;
  }
  emit(n);
  return sentences;
}

std::string join_sentences(const std::vector<std::string>& sentences,
                           std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end && i < sentences.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += sentences[i];
  }
  return out;
}

std::string truncate_utf8(std::string_view text, std::size_t max_bytes) {
  if (max_bytes == 0 || text.size() <= max_bytes) return std::string(text);
  std::size_t cut = max_bytes;
  // Back off continuation bytes (10xxxxxx).
  while (cut > 0 &&
         (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) {
    --cut;
  }
  return std::string(text.substr(0, cut));
}

}  // namespace aspectsim
