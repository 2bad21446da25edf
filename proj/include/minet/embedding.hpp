/*
 * Copyright 2026 The MiNet Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "minet/features.hpp"
#include "minet/random.hpp"
#include "minet/tensor.hpp"

namespace minet {

// Per-group field counts and the derived representation widths.
struct ReprSpec {
  std::size_t embedding_dim = 10;
  std::size_t user_fields = 1;
  std::size_t source_fields = 1;
  std::size_t target_fields = 1;

  static ReprSpec from_schema(const Schema& schema, std::size_t embedding_dim);

  std::size_t user_dim() const { return embedding_dim * user_fields; }
  std::size_t source_dim() const { return embedding_dim * source_fields; }
  std::size_t target_dim() const { return embedding_dim * target_fields; }

  void validate() const;
  bool operator==(const ReprSpec&) const = default;
};

// Embedding matrix E of shape [D, N]; column i embeds feature i.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(Tensor matrix);

  // Entries uniform in [-1/sqrt(D), 1/sqrt(D)].
  static EmbeddingTable uniform(std::size_t dim, std::size_t size, Rng& rng);

  std::size_t dim() const { return matrix_.shape()[0]; }
  std::size_t size() const { return matrix_.shape()[1]; }
  const Tensor& matrix() const { return matrix_; }
  Tensor& matrix() { return matrix_; }

  std::vector<double> column(FeatureId id) const;

 private:
  Tensor matrix_;
};

// Concatenation of the columns of `ids`, one D-block per id.
Tensor lookup_concat(Tape& tape, const EmbeddingTable& table,
                     std::span<const FeatureId> ids);

// Same, one D-block per field; a multi-valued field is the mean of its
// members' columns.
Tensor lookup_fields(Tape& tape, const EmbeddingTable& table,
                     std::span<const FieldValue> fields);

struct Representations {
  Domain domain = Domain::target;
  Tensor user;  // p_u
  Tensor item;  // q_t for target instances, q_s for source instances
  std::vector<Tensor> clicked_source;  // r_si
  std::vector<Tensor> clicked_target;  // r_tj
};

// `with_sequences` = false skips the behavior sequences (source tower,
// baselines).
Representations build_reprs(Tape& tape, const Instance& instance,
                            const EmbeddingTable& table, const ReprSpec& spec,
                            bool with_sequences = true);

}  // namespace minet
