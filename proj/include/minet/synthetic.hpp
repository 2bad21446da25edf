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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "minet/features.hpp"

namespace minet {

// Planted-signal generator for cross-domain CTR experiments.
//
// Every user draws a latent affinity g_u over source (news) categories. Each
// target (ad) category k is linked to one source category link[k]. Clicked
// news and clicked ads are sampled mostly from softmax(sharpness * g_u).
// Labels are Bernoulli with log-odds
//
//   target: offset_t + ad_bias[k] + kappa * signal_scale * g_u[link[k]]
//           + short_term_bonus * [some clicked ad has category k]
//   source: offset_s + signal_scale * g_u[c]
//
// where the offsets are solved numerically so that the mean click
// probability over the generated impressions equals the configured base
// rate. With kappa = 0 target labels carry no information about source
// behavior.
struct SynthConfig {
  std::size_t users = 2000;
  std::size_t user_segments = 16;
  std::size_t source_categories = 8;
  std::size_t target_categories = 8;
  std::size_t news_per_category = 30;
  std::size_t tags_per_category = 4;
  std::size_t ads_per_category = 20;
  std::size_t ads_per_campaign = 5;
  double kappa = 0.8;
  double signal_scale = 3.0;
  double affinity_sharpness = 1.5;
  // Probability that a clicked item follows the user's affinity rather than
  // being uniform noise.
  double behavior_focus = 0.7;
  double short_term_bonus = 1.0;
  double item_effect = 0.5;
  double target_base_rate = 0.25;
  double source_base_rate = 0.3;
  std::size_t source_per_user = 10;
  std::size_t target_per_user = 8;
  std::size_t validation_per_user = 1;
  std::size_t test_per_user = 2;
  // Sequence lengths are uniform in [0, max], then truncated by LoadOptions.
  std::size_t source_seq_max = 12;
  std::size_t target_seq_max = 4;

  void validate() const;
};

struct SynthGroundTruth {
  std::uint64_t seed = 0;
  double kappa = 0.0;
  double signal_scale = 0.0;
  double short_term_bonus = 0.0;
  double target_offset = 0.0;
  double source_offset = 0.0;
  // affinity[u][c], user u, source category c.
  std::vector<std::vector<double>> affinity;
  // Source category linked to each target category.
  std::vector<std::size_t> category_link;
  std::vector<double> target_category_bias;
};

struct SynthData {
  Schema schema;
  Vocabulary vocabulary;  // built from the training records
  Dataset train;          // both domains
  Dataset validation;     // target domain
  Dataset test;           // target domain
  std::vector<RawRecord> train_records;
  std::vector<RawRecord> validation_records;
  std::vector<RawRecord> test_records;
  SynthGroundTruth truth;
  SynthConfig config;
};

// Feature-string conventions used by the generator.
std::string synth_user_feature(std::size_t user);
std::string synth_target_category_feature(std::size_t category);
std::string synth_source_category_feature(std::size_t category);

SynthData generate_synthetic(const SynthConfig& config, std::uint64_t seed,
                             const LoadOptions& options = {});

// Writes train.tsv, validation.tsv, test.tsv, schema.tsv, metadata.txt and
// affinities.tsv into `dir` (created if missing).
void write_synthetic(const SynthData& data, const std::filesystem::path& dir);

}  // namespace minet
