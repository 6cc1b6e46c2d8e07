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

#ifndef ASPECTSIM_OPENAI_BACKEND_H_
#define ASPECTSIM_OPENAI_BACKEND_H_

#include <chrono>
#include <string>
#include <vector>

#include "aspectsim/gateway.h"

namespace aspectsim {

struct OpenAiEndpoint {
  // Scheme, host and optional port, e.g. "https://api.openai.com" or
  // "http://localhost:8000". Requests go to <base_url>/v1/chat/completions
  // and <base_url>/v1/embeddings.
  std::string chat_base_url;
  std::string embedding_base_url;
  std::string api_key;
  std::chrono::seconds timeout{120};
};

// OpenAI-compatible wire protocol over HTTP(S).
class OpenAiBackend : public Backend {
 public:
  explicit OpenAiBackend(OpenAiEndpoint endpoint);

  std::string chat(const ChatRequest& request) override;
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts,
                                         const std::string& model_name) override;

  // Request body for POST /v1/chat/completions.
  static nlohmann::json chat_body(const ChatRequest& request);
  // choices[0].message.content. Throws TransportError on a malformed body.
  static std::string parse_chat_response(const std::string& body);
  static nlohmann::json embedding_body(const std::vector<std::string>& texts,
                                       const std::string& model_name);
  // data[*].embedding ordered by "index".
  static std::vector<std::vector<double>> parse_embedding_response(
      const std::string& body, std::size_t expected);

 private:
  std::string post(const std::string& base_url, const std::string& path,
                   const nlohmann::json& body);

  OpenAiEndpoint endpoint_;
};

}  // namespace aspectsim

#endif  // ASPECTSIM_OPENAI_BACKEND_H_
