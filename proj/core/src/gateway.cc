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

#include "aspectsim/gateway.h"

#include <array>
#include <thread>
#include <unordered_set>
#include <utility>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "aspectsim/errors.h"
#include "aspectsim/text.h"

namespace aspectsim {

using json = nlohmann::json;

namespace {

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length,
                 EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex += fmt::format("{:02x}", digest[i]);
  }
  return hex;
}

json chat_identity(const ChatRequest& request) {
  return json{{"kind", "chat"},
              {"model", request.model_name},
              {"system", request.system_prompt},
              {"user", request.user_prompt},
              {"decoding", request.decoding.is_null() ? json::object()
                                                      : request.decoding}};
}

json embedding_identity(const std::string& model_name,
                        const std::string& text) {
  return json{{"kind", "embed"}, {"model", model_name}, {"text", text}};
}

}  // namespace

std::string fingerprint(const ChatRequest& request) {
  return sha256_hex(chat_identity(request).dump());
}

std::string embedding_fingerprint(const std::string& model_name,
                                  const std::string& text) {
  return sha256_hex(embedding_identity(model_name, text).dump());
}

bool is_retryable_status(int status) {
  return status == 0 || status == 429 || status >= 500;
}

// Holds one of the bounded in-flight slots for the lifetime of a backend call.
class Gateway::Slot {
 public:
  explicit Slot(Gateway& gw) : gw_(gw) {
    std::unique_lock<std::mutex> lock(gw_.slot_mu_);
    gw_.slot_cv_.wait(lock,
                      [&] { return gw_.in_flight_ < gw_.options_.max_in_flight; });
    ++gw_.in_flight_;
  }
  ~Slot() {
    {
      std::lock_guard<std::mutex> lock(gw_.slot_mu_);
      --gw_.in_flight_;
    }
    gw_.slot_cv_.notify_one();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  Gateway& gw_;
};

Gateway::Gateway(GatewayOptions options, std::shared_ptr<Backend> backend,
                 std::shared_ptr<Cassette> cassette)
    : options_(std::move(options)),
      backend_(std::move(backend)),
      cassette_(std::move(cassette)) {
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
  if (options_.retry.max_attempts < 1) options_.retry.max_attempts = 1;
  if (!options_.retry.sleep) {
    options_.retry.sleep = [](std::chrono::milliseconds d) {
      std::this_thread::sleep_for(d);
    };
  }
  if (options_.mode != GatewayMode::kLive && cassette_ == nullptr) {
    throw ConfigError("record and replay modes require a cassette");
  }
  if (options_.mode != GatewayMode::kReplay && backend_ == nullptr) {
    throw ConfigError("live and record modes require a backend");
  }
}

template <typename Fn>
auto Gateway::with_retry(Fn&& fn) -> decltype(fn()) {
  std::chrono::milliseconds backoff = options_.retry.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      Slot slot(*this);
      ++backend_calls_;
      return fn();
    } catch (const TransportError& e) {
      if (attempt >= options_.retry.max_attempts ||
          !is_retryable_status(e.status())) {
        throw;
      }
      spdlog::warn("transport error (attempt {}/{}): {}; retrying in {} ms",
                   attempt, options_.retry.max_attempts, e.what(),
                   backoff.count());
      options_.retry.sleep(backoff);
      backoff *= 2;
    }
  }
}

std::optional<std::string> Gateway::cached(const std::string& fp) const {
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = cache_.find(fp);
    if (it != cache_.end()) return it->second;
  }
  if (cassette_ != nullptr) return cassette_->lookup(fp);
  return std::nullopt;
}

void Gateway::remember(const std::string& fp, const std::string& response,
                       json request) {
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    cache_.emplace(fp, response);
  }
  if (options_.mode == GatewayMode::kRecord) {
    cassette_->append({fp, response, std::move(request)});
  }
}

std::string Gateway::chat(const ChatRequest& request) {
  if (trim(request.user_prompt).empty()) {
    throw PreconditionError("chat request with an empty user prompt");
  }
  const std::string fp = fingerprint(request);
  if (auto hit = cached(fp)) return *hit;
  if (options_.mode == GatewayMode::kReplay) {
    throw ReplayMiss(fmt::format("no recorded chat response for {} (model {})",
                                 fp, request.model_name));
  }
  std::string response = with_retry([&] { return backend_->chat(request); });
  remember(fp, response, chat_identity(request));
  return response;
}

std::vector<EmbeddingVector> Gateway::embed(
    const std::vector<std::string>& texts, const std::string& model_name) {
  if (texts.empty()) throw PreconditionError("embed called with no texts");
  for (const auto& text : texts) {
    if (trim(text).empty()) throw PreconditionError("embed called with blank text");
  }

  std::vector<std::string> fps;
  fps.reserve(texts.size());
  std::vector<std::string> missing;
  std::vector<std::string> missing_fps;
  std::unordered_set<std::string> queued;
  for (const auto& text : texts) {
    fps.push_back(embedding_fingerprint(model_name, text));
    if (!cached(fps.back()) && queued.insert(fps.back()).second) {
      missing.push_back(text);
      missing_fps.push_back(fps.back());
    }
  }

  if (!missing.empty()) {
    if (options_.mode == GatewayMode::kReplay) {
      throw ReplayMiss(fmt::format(
          "no recorded embedding for {} text(s) (model {}), first {}",
          missing.size(), model_name, missing_fps.front()));
    }
    auto vectors =
        with_retry([&] { return backend_->embed(missing, model_name); });
    if (vectors.size() != missing.size()) {
      throw EmbeddingError(fmt::format("backend returned {} vectors for {} texts",
                                       vectors.size(), missing.size()));
    }
    for (std::size_t i = 0; i < missing.size(); ++i) {
      remember(missing_fps[i], json(vectors[i]).dump(),
               embedding_identity(model_name, missing[i]));
    }
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& fp : fps) {
    const auto payload = cached(fp);
    EmbeddingVector v;
    v.model_name = model_name;
    try {
      v.values = json::parse(*payload).get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw EmbeddingError(std::string("bad embedding payload: ") + e.what());
    }
    if (!out.empty() && v.dim() != out.front().dim()) {
      throw DimensionMismatch(fmt::format("ragged embeddings: {} vs {}",
                                          v.dim(), out.front().dim()));
    }
    if (v.dim() == 0) throw DimensionMismatch("empty embedding vector");
    out.push_back(std::move(v));
  }
  return out;
}

EmbedFn Gateway::embedder(std::string model_name) {
  return [this, model = std::move(model_name)](
             const std::vector<std::string>& texts) {
    return embed(texts, model);
  };
}

}  // namespace aspectsim
