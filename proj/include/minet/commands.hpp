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
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "minet/config.hpp"
#include "minet/features.hpp"
#include "minet/model.hpp"

namespace minet {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitMetricUndefined = 3,
};

int exit_code_for(const std::exception& e);

// A data directory holds schema.tsv, train.tsv, validation.tsv and
// optionally test.tsv. The vocabulary is built from train.tsv.
struct Splits {
  Schema schema;
  Vocabulary vocabulary;
  Dataset train;
  Dataset validation;
  std::optional<Dataset> test;
};

Splits load_splits(const std::filesystem::path& dir, const LoadOptions& options,
                   bool require_test);

struct Variant {
  std::string name;
  MiNetConfig config;
};

// full, no_attention, item_only, interest_only(exp), interest_only(sigmoid),
// long_term_only, short_src_only, short_tgt_only, lr, dnn.
std::vector<Variant> ablation_variants(const MiNetConfig& base);

void cmd_generate(const RunConfig& config, const std::filesystem::path& out_dir,
                  std::ostream& out);
void cmd_train(const RunConfig& config, const std::filesystem::path& data_dir,
               const std::filesystem::path& checkpoint, std::ostream& out);
// `data` is an instance file, or a data directory (its test.tsv is used).
void cmd_evaluate(const std::filesystem::path& checkpoint,
                  const std::filesystem::path& data, std::ostream& out);
void cmd_ablate(const RunConfig& config, const std::filesystem::path& data_dir,
                std::ostream& out);
void cmd_inspect_attention(const std::filesystem::path& checkpoint,
                           const std::filesystem::path& data, long long n,
                           std::ostream& out);

}  // namespace minet
