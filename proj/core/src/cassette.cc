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

#include "aspectsim/cassette.h"

#include <utility>

#include "aspectsim/errors.h"
#include "aspectsim/text.h"

namespace aspectsim {

using json = nlohmann::json;

namespace {

json entry_to_json(const CassetteEntry& entry) {
  json record = {{"fingerprint", entry.fingerprint},
                 {"response", entry.response}};
  if (!entry.request.is_null()) record["request"] = entry.request;
  return record;
}

}  // namespace

Cassette::Cassette(Cassette&& other) noexcept {
  std::lock_guard<std::mutex> lock(other.mu_);
  entries_ = std::move(other.entries_);
  index_ = std::move(other.index_);
  sink_ = std::move(other.sink_);
}

void Cassette::insert_loaded(CassetteEntry entry, std::size_t line) {
  if (index_.contains(entry.fingerprint)) {
    throw ParseError("duplicate fingerprint " + entry.fingerprint, line);
  }
  index_.emplace(entry.fingerprint, entries_.size());
  entries_.push_back(std::move(entry));
}

Cassette Cassette::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open cassette " + path.string(), 0);
  Cassette cassette;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    CassetteEntry entry;
    try {
      const json record = json::parse(line);
      entry.fingerprint = record.at("fingerprint").get<std::string>();
      entry.response = record.at("response").get<std::string>();
      if (record.contains("request")) entry.request = record.at("request");
    } catch (const json::exception& e) {
      throw ParseError(std::string("cassette: ") + e.what(), line_no);
    }
    cassette.insert_loaded(std::move(entry), line_no);
  }
  return cassette;
}

Cassette Cassette::open_for_append(const std::filesystem::path& path) {
  Cassette cassette =
      std::filesystem::exists(path) ? load(path) : Cassette();
  cassette.sink_.open(path, std::ios::binary | std::ios::app);
  if (!cassette.sink_) {
    throw Error("cannot open cassette for writing: " + path.string());
  }
  return cassette;
}

std::optional<std::string> Cassette::lookup(
    const std::string& fingerprint) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = index_.find(fingerprint);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].response;
}

bool Cassette::append(CassetteEntry entry) {
  std::lock_guard<std::mutex> lock(mu_);
  if (index_.contains(entry.fingerprint)) return false;
  if (sink_.is_open()) {
    sink_ << entry_to_json(entry).dump() << '\n';
    sink_.flush();
  }
  index_.emplace(entry.fingerprint, entries_.size());
  entries_.push_back(std::move(entry));
  return true;
}

std::size_t Cassette::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::vector<CassetteEntry> Cassette::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

void Cassette::save(const std::filesystem::path& path) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write cassette " + path.string());
  for (const CassetteEntry& entry : entries_) {
    out << entry_to_json(entry).dump() << '\n';
  }
}

}  // namespace aspectsim
