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

#include "aspectsim/openai_backend.h"

#include <algorithm>
#include <utility>

#include <fmt/format.h>
#include <httplib.h>

#include "aspectsim/errors.h"

namespace aspectsim {

using json = nlohmann::json;

namespace {

// Splits "https://host:port/prefix" into ("https://host:port", "/prefix").
std::pair<std::string, std::string> split_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto path_start =
      url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_start), prefix};
}

}  // namespace

OpenAiBackend::OpenAiBackend(OpenAiEndpoint endpoint)
    : endpoint_(std::move(endpoint)) {
  if (endpoint_.chat_base_url.empty() && endpoint_.embedding_base_url.empty()) {
    throw ConfigError("no backend endpoint configured");
  }
}

json OpenAiBackend::chat_body(const ChatRequest& request) {
  json messages = json::array();
  if (!request.system_prompt.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
  }
  messages.push_back({{"role", "user"}, {"content", request.user_prompt}});
  json body = {{"model", request.model_name}, {"messages", messages}};
  if (request.decoding.is_object()) {
    for (const auto& [key, value] : request.decoding.items()) body[key] = value;
  }
  return body;
}

std::string OpenAiBackend::parse_chat_response(const std::string& body) {
  try {
    const json parsed = json::parse(body);
    const json& content = parsed.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed chat completion: ") + e.what(),
                         -1);
  }
}

json OpenAiBackend::embedding_body(const std::vector<std::string>& texts,
                                   const std::string& model_name) {
  return json{{"model", model_name}, {"input", texts}};
}

std::vector<std::vector<double>> OpenAiBackend::parse_embedding_response(
    const std::string& body, std::size_t expected) {
  std::vector<std::pair<std::size_t, std::vector<double>>> rows;
  try {
    const json parsed = json::parse(body);
    for (const json& item : parsed.at("data")) {
      rows.emplace_back(item.value("index", rows.size()),
                        item.at("embedding").get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed embedding response: ") + e.what(),
                         -1);
  }
  if (rows.size() != expected) {
    throw EmbeddingError(fmt::format("expected {} embeddings, got {}", expected,
                                     rows.size()));
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (auto& [_, values] : rows) {
    if (!out.empty() && values.size() != out.front().size()) {
      throw DimensionMismatch("backend returned ragged embeddings");
    }
    out.push_back(std::move(values));
  }
  return out;
}

std::string OpenAiBackend::post(const std::string& base_url,
                                const std::string& path, const json& body) {
  if (base_url.empty()) throw ConfigError("endpoint for " + path + " not set");
  const auto [origin, prefix] = split_base_url(base_url);
  httplib::Client client(origin);
  client.set_connection_timeout(endpoint_.timeout);
  client.set_read_timeout(endpoint_.timeout);
  client.set_write_timeout(endpoint_.timeout);
  httplib::Headers headers;
  if (!endpoint_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
  }
  auto result =
      client.Post(prefix + path, headers, body.dump(), "application/json");
  if (!result) {
    throw TransportError(fmt::format("POST {}{} failed: {}", base_url, path,
                                     httplib::to_string(result.error())),
                         0);
  }
  if (result->status < 200 || result->status >= 300) {
    throw TransportError(fmt::format("POST {}{} returned HTTP {}: {}", base_url,
                                     path, result->status,
                                     result->body.substr(0, 500)),
                         result->status);
  }
  return result->body;
}

std::string OpenAiBackend::chat(const ChatRequest& request) {
  return parse_chat_response(
      post(endpoint_.chat_base_url, "/v1/chat/completions", chat_body(request)));
}

std::vector<std::vector<double>> OpenAiBackend::embed(
    const std::vector<std::string>& texts, const std::string& model_name) {
  return parse_embedding_response(
      post(endpoint_.embedding_base_url, "/v1/embeddings",
           embedding_body(texts, model_name)),
      texts.size());
}

}  // namespace aspectsim
