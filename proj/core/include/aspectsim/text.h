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

// Text utilities shared by the corpus, the curator and the scorer.

#ifndef ASPECTSIM_TEXT_H_
#define ASPECTSIM_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace aspectsim {

// Collapses every run of whitespace to one space and trims both ends. This is
// the equality used for evidence text throughout the library.
std::string normalize_whitespace(std::string_view text);

std::string_view trim(std::string_view text);

std::string to_lower(std::string_view text);

// Number of whitespace-separated tokens.
std::size_t count_tokens(std::string_view text);

// Deterministic rule-based sentence splitter. A boundary is terminal
// punctuation (. ! ?, optionally followed by closing quotes or brackets),
// then whitespace, then an uppercase letter, a digit or an opening quote.
// Known abbreviations and single-letter initials never end a sentence. Blank
// lines always end one. Returned sentences are whitespace-normalized and
// non-empty.
std::vector<std::string> split_sentences(std::string_view text);

// Joins with single spaces.
std::string join_sentences(const std::vector<std::string>& sentences,
                           std::size_t begin, std::size_t end);

// Truncates to at most `max_bytes` bytes without splitting a UTF-8 sequence.
// max_bytes == 0 means no limit.
std::string truncate_utf8(std::string_view text, std::size_t max_bytes);

}  // namespace aspectsim

#endif  // ASPECTSIM_TEXT_H_
