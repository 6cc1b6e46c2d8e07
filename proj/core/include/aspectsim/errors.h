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

#ifndef ASPECTSIM_ERRORS_H_
#define ASPECTSIM_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace aspectsim {

// Root of every error raised by the library. Each module throws the most
// specific subclass below; the CLI maps them onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated caller precondition (empty input, bad range, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration (missing credentials, unreadable config).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed corpus/cassette/score record. Line numbers are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what
                        : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Dangling document id or out-of-range sentence index.
class ReferenceError : public Error {
 public:
  using Error::Error;
};

// Network/HTTP failure that survived the retry budget.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int status = 0)
      : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// Replay mode could not find a recorded response for a request.
class ReplayMiss : public Error {
 public:
  using Error::Error;
};

class EmbeddingError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public EmbeddingError {
 public:
  using EmbeddingError::EmbeddingError;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class ZeroAspectVector : public ZeroVector {
 public:
  using ZeroVector::ZeroVector;
};

class EmptyCalibration : public Error {
 public:
  using Error::Error;
};

// Model output that could not be turned into the expected structure. The raw
// text is kept for diagnostics.
class UnparseableResponse : public Error {
 public:
  UnparseableResponse(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

class UnparseableScore : public UnparseableResponse {
 public:
  using UnparseableResponse::UnparseableResponse;
};

// Statistic undefined for the input (e.g. constant vector for Spearman).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class NoNegativeInstances : public Error {
 public:
  using Error::Error;
};

class MissingMetadata : public Error {
 public:
  using Error::Error;
};

}  // namespace aspectsim

#endif  // ASPECTSIM_ERRORS_H_
