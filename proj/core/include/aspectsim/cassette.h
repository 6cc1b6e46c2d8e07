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

#ifndef ASPECTSIM_CASSETTE_H_
#define ASPECTSIM_CASSETTE_H_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace aspectsim {

struct CassetteEntry {
  std::string fingerprint;
  std::string response;
  // Optional audit copy of the request; not used for lookup.
  nlohmann::json request;
};

// Recorded model responses keyed by request fingerprint. On disk this is
// JSONL of {"fingerprint", "response"[, "request"]} records. Lookup is by
// fingerprint only, so replay does not depend on call order. Safe for
// concurrent readers and writers.
class Cassette {
 public:
  Cassette() = default;

  // Reads every entry. Throws ParseError on malformed lines or a repeated
  // fingerprint.
  static Cassette load(const std::filesystem::path& path);

  // Appends each new entry to `path` as it is recorded. Existing file
  // content is loaded first, so recording can resume.
  static Cassette open_for_append(const std::filesystem::path& path);

  std::optional<std::string> lookup(const std::string& fingerprint) const;

  // Returns false (and records nothing) if the fingerprint is already present.
  bool append(CassetteEntry entry);

  std::size_t size() const;
  std::vector<CassetteEntry> entries() const;

  void save(const std::filesystem::path& path) const;

  Cassette(Cassette&& other) noexcept;
  Cassette& operator=(Cassette&&) = delete;

 private:
  void insert_loaded(CassetteEntry entry, std::size_t line);

  mutable std::mutex mu_;
  std::vector<CassetteEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::ofstream sink_;
};

}  // namespace aspectsim

#endif  // ASPECTSIM_CASSETTE_H_
