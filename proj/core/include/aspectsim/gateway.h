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

// Uniform access to chat-completion and embedding backends, with a response
// cache, bounded retries, an in-flight request limit and record/replay
// through a Cassette.

#ifndef ASPECTSIM_GATEWAY_H_
#define ASPECTSIM_GATEWAY_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "aspectsim/cassette.h"
#include "aspectsim/embedding.h"

namespace aspectsim {

struct ChatRequest {
  std::string model_name;
  std::string system_prompt;
  std::string user_prompt;
  // Named decoding parameters (temperature, max_tokens, ...). Empty means
  // backend defaults.
  nlohmann::json decoding = nlohmann::json::object();
};

// SHA-256 (hex) over a canonical JSON rendering of every request field.
// Object keys are sorted, so parameter order never matters.
std::string fingerprint(const ChatRequest& request);
std::string embedding_fingerprint(const std::string& model_name,
                                  const std::string& text);

// Transport to a concrete service. Implementations throw TransportError;
// status 0 means the request never produced an HTTP response.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string chat(const ChatRequest& request) = 0;
  virtual std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts, const std::string& model_name) = 0;
};

enum class GatewayMode { kLive, kRecord, kReplay };

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  // Injected for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

// True for transport failures, 429 and 5xx.
bool is_retryable_status(int status);

struct GatewayOptions {
  GatewayMode mode = GatewayMode::kLive;
  RetryPolicy retry;
  std::size_t max_in_flight = 8;
};

class Gateway {
 public:
  // `backend` may be null in replay mode. `cassette` is required for record
  // and replay.
  Gateway(GatewayOptions options, std::shared_ptr<Backend> backend,
          std::shared_ptr<Cassette> cassette = nullptr);

  // Returns the model text verbatim. Throws ReplayMiss in replay mode when
  // the request was never recorded, TransportError after the retry budget.
  std::string chat(const ChatRequest& request);

  // One vector per input text, in input order. Cached per text, so repeated
  // strings yield identical vectors. Throws PreconditionError on an empty
  // batch or blank text, DimensionMismatch on ragged output.
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts,
                                     const std::string& model_name);

  EmbedFn embedder(std::string model_name);

  GatewayMode mode() const { return options_.mode; }
  // Requests that reached the backend (including retries).
  std::size_t backend_calls() const { return backend_calls_.load(); }

 private:
  class Slot;

  template <typename Fn>
  auto with_retry(Fn&& fn) -> decltype(fn());

  std::optional<std::string> cached(const std::string& fp) const;
  void remember(const std::string& fp, const std::string& response,
                nlohmann::json request);

  GatewayOptions options_;
  std::shared_ptr<Backend> backend_;
  std::shared_ptr<Cassette> cassette_;

  mutable std::mutex cache_mu_;
  std::unordered_map<std::string, std::string> cache_;

  std::mutex slot_mu_;
  std::condition_variable slot_cv_;
  std::size_t in_flight_ = 0;

  std::atomic<std::size_t> backend_calls_{0};
};

}  // namespace aspectsim

#endif  // ASPECTSIM_GATEWAY_H_
