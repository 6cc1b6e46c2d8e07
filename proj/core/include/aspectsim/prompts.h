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

// Prompt templates. The curation and negative-generation templates are
// immutable assets with {Document 1}/{Document 2} placeholders; the scoring
// templates use {document}, {document1}, {document2} and {aspect}.

#ifndef ASPECTSIM_PROMPTS_H_
#define ASPECTSIM_PROMPTS_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aspectsim::prompts {

std::string_view curation();
std::string_view negatives();
std::string_view presence();
std::string_view extract_sentence();
std::string_view extract_span();
std::string_view summarize();
std::string_view lbs();

// Appended to the user prompt for the single parse retry.
inline constexpr std::string_view kJsonRetrySuffix = "\n\nReturn only valid JSON.";

using Bindings = std::vector<std::pair<std::string_view, std::string_view>>;

// Replaces each "{name}" occurrence in one pass, so placeholder-like text in
// substituted values is never expanded. Unknown placeholders are left as is.
std::string render(std::string_view tmpl, const Bindings& bindings);

}  // namespace aspectsim::prompts

#endif  // ASPECTSIM_PROMPTS_H_
