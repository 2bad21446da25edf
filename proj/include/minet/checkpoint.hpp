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

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "minet/features.hpp"
#include "minet/model.hpp"

namespace minet {

// Binary layout, all integers little-endian:
//
//   "MINETCKP"  u32 version  u64 header_bytes  header (JSON)
//   per tensor: u64 name_bytes  name  u32 rank  u64 dims[rank]  f64 values[]
//
// The header carries the schema, the vocabulary, the model configuration,
// the training seed and the tensor directory.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  Schema schema;
  Vocabulary vocabulary;
  std::uint64_t seed = 0;
};

void save_checkpoint(std::ostream& out, const Model& model,
                     const Schema& schema, const Vocabulary& vocabulary,
                     std::uint64_t seed);
void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const Schema& schema, const Vocabulary& vocabulary,
                     std::uint64_t seed);

Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace minet
