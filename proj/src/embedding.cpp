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

#include "minet/embedding.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "minet/errors.hpp"

namespace minet {

ReprSpec ReprSpec::from_schema(const Schema& schema,
                               std::size_t embedding_dim) {
  ReprSpec spec;
  spec.embedding_dim = embedding_dim;
  spec.user_fields = schema.field_count(FieldGroup::user);
  spec.source_fields = schema.field_count(FieldGroup::source);
  spec.target_fields = schema.field_count(FieldGroup::target);
  spec.validate();
  return spec;
}

void ReprSpec::validate() const {
  if (embedding_dim == 0 || user_fields == 0 || source_fields == 0 ||
      target_fields == 0) {
    throw SchemaError("embedding dim and all field counts must be positive");
  }
}

EmbeddingTable::EmbeddingTable(Tensor matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rank() != 2) {
    throw DimensionError("embedding matrix must be 2-D, got " +
                         shape_to_string(matrix_.shape()));
  }
}

EmbeddingTable EmbeddingTable::uniform(std::size_t dim, std::size_t size,
                                       Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<double> values(dim * size);
  for (double& v : values) v = rng.uniform(-bound, bound);
  return EmbeddingTable(Tensor::from({dim, size}, std::move(values), true));
}

std::vector<double> EmbeddingTable::column(FeatureId id) const {
  if (id >= size()) {
    throw IndexError("feature id " + std::to_string(id) +
                     " outside embedding table of size " +
                     std::to_string(size()));
  }
  const auto v = matrix_.values();
  std::vector<double> col(dim());
  for (std::size_t d = 0; d < dim(); ++d) col[d] = v[d * size() + id];
  return col;
}

namespace {

// Shared implementation: block b is the mean of columns groups[b].
Tensor gather_mean(Tape& tape, const EmbeddingTable& table,
                   std::vector<FieldValue> groups) {
  const std::size_t dim = table.dim();
  const std::size_t n = table.size();
  if (groups.empty()) throw ArgumentError("lookup of zero fields");
  for (const FieldValue& g : groups) {
    if (g.empty()) throw ArgumentError("lookup of an empty field");
    for (FeatureId id : g) {
      if (id >= n) {
        throw IndexError("feature id " + std::to_string(id) +
                         " outside embedding table of size " +
                         std::to_string(n));
      }
    }
  }
  const auto e = table.matrix().values();
  std::vector<double> out(dim * groups.size(), 0.0);
  for (std::size_t b = 0; b < groups.size(); ++b) {
    const double w = 1.0 / static_cast<double>(groups[b].size());
    for (FeatureId id : groups[b]) {
      for (std::size_t d = 0; d < dim; ++d) {
        out[b * dim + d] += w * e[d * n + id];
      }
    }
  }
  Tensor matrix = table.matrix();
  const bool wants = matrix.requires_grad() && tape.recording();
  const std::size_t len = out.size();
  Tensor y = Tensor::from({len}, std::move(out), wants);
  if (wants) {
    tape.record(y, {matrix},
                [matrix, y, groups = std::move(groups), dim, n]() mutable {
                  const auto dy = y.grad();
                  auto de = matrix.grad_buffer();
                  for (std::size_t b = 0; b < groups.size(); ++b) {
                    const double w =
                        1.0 / static_cast<double>(groups[b].size());
                    for (FeatureId id : groups[b]) {
                      for (std::size_t d = 0; d < dim; ++d) {
                        de[d * n + id] += w * dy[b * dim + d];
                      }
                    }
                  }
                });
  }
  return y;
}

}  // namespace

Tensor lookup_concat(Tape& tape, const EmbeddingTable& table,
                     std::span<const FeatureId> ids) {
  std::vector<FieldValue> groups;
  groups.reserve(ids.size());
  for (FeatureId id : ids) groups.push_back({id});
  return gather_mean(tape, table, std::move(groups));
}

Tensor lookup_fields(Tape& tape, const EmbeddingTable& table,
                     std::span<const FieldValue> fields) {
  return gather_mean(tape, table,
                     std::vector<FieldValue>(fields.begin(), fields.end()));
}

Representations build_reprs(Tape& tape, const Instance& instance,
                            const EmbeddingTable& table, const ReprSpec& spec,
                            bool with_sequences) {
  if (table.dim() != spec.embedding_dim) {
    throw SchemaError("embedding table dim " + std::to_string(table.dim()) +
                      " does not match spec dim " +
                      std::to_string(spec.embedding_dim));
  }
  auto check = [](const ItemFeatures& item, std::size_t expected,
                  const char* what) {
    if (item.size() != expected) {
      throw SchemaError(std::string(what) + " has " +
                        std::to_string(item.size()) + " fields, expected " +
                        std::to_string(expected));
    }
  };
  const std::size_t item_fields = instance.domain == Domain::source
                                      ? spec.source_fields
                                      : spec.target_fields;
  check(instance.user, spec.user_fields, "user");
  check(instance.item, item_fields, "item");

  Representations reprs;
  reprs.domain = instance.domain;
  reprs.user = lookup_fields(tape, table, instance.user);
  reprs.item = lookup_fields(tape, table, instance.item);
  if (with_sequences) {
    for (const ItemFeatures& item : instance.clicked_source) {
      check(item, spec.source_fields, "clicked source item");
      reprs.clicked_source.push_back(lookup_fields(tape, table, item));
    }
    for (const ItemFeatures& item : instance.clicked_target) {
      check(item, spec.target_fields, "clicked target item");
      reprs.clicked_target.push_back(lookup_fields(tape, table, item));
    }
  }
  return reprs;
}

}  // namespace minet
