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

#ifndef ASPECTSIM_EMBEDDING_H_
#define ASPECTSIM_EMBEDDING_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace aspectsim {

// A dense vector produced by an embedding backend.
struct EmbeddingVector {
  std::vector<double> values;
  std::string model_name;

  std::size_t dim() const { return values.size(); }
  bool is_zero() const;

  friend bool operator==(const EmbeddingVector&,
                         const EmbeddingVector&) = default;
};

// Maps a batch of texts to one vector per text, in order.
using EmbedFn =
    std::function<std::vector<EmbeddingVector>(const std::vector<std::string>&)>;

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

// Cosine similarity, clamped to [-1, 1] against rounding.
// Throws DimensionMismatch on unequal dims and ZeroVector on a zero-norm
// argument.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace aspectsim

#endif  // ASPECTSIM_EMBEDDING_H_
