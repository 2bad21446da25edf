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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "minet/attention.hpp"
#include "minet/embedding.hpp"
#include "minet/features.hpp"
#include "minet/tensor.hpp"

namespace minet {

enum class ModelKind { minet, lr, dnn };

enum class Ablation {
  full,
  no_attention,    // uniform item weights, unit interest gates
  item_only,       // item attention, unit interest gates
  interest_only,   // uniform item weights, learned interest gates
  long_term_only,  // [q_t | p_u]
  short_src_only,  // [q_t | a_s]
  short_tgt_only,  // [q_t | a_t]
};

std::string_view to_string(ModelKind k);
std::string_view to_string(Ablation a);
ModelKind parse_model_kind(std::string_view s);
Ablation parse_ablation(std::string_view s);
Activation parse_interest_activation(std::string_view s);

struct MiNetConfig {
  ModelKind kind = ModelKind::minet;
  std::size_t embedding_dim = 10;
  std::size_t transfer_rank = 10;
  std::size_t attention_dim = 64;
  std::vector<std::size_t> fc_dims = {256, 128};
  Activation interest_activation = Activation::exp;
  Ablation ablation = Ablation::full;
  std::size_t max_source_seq = 25;
  std::size_t max_target_seq = 5;

  void validate() const;
  bool uses_source_attention() const;
  bool uses_target_attention() const;
  bool uses_interest_attention() const;
  // Baselines and gamma = 0 runs train on the target domain only.
  bool has_source_tower() const { return kind == ModelKind::minet; }
  LoadOptions load_options() const { return {max_source_seq, max_target_seq}; }
};

struct DenseLayer {
  Tensor weight;  // [out, in]
  Tensor bias;    // [out]
};

// ReLU hidden layers followed by a sigmoid output unit.
struct Tower {
  std::vector<DenseLayer> hidden;
  DenseLayer output;

  static Tower init(std::size_t input_dim,
                    const std::vector<std::size_t>& fc_dims, Rng& rng);
  std::size_t input_dim() const;
  Tensor forward(Tape& tape, const Tensor& input) const;
};

struct MiNetParams {
  EmbeddingTable embedding;  // MiNet and DNN
  std::optional<SourceItemAttentionParams> source_attention;
  std::optional<TargetItemAttentionParams> target_attention;
  std::optional<InterestAttentionParams> interest;
  std::optional<Tower> target_tower;
  std::optional<Tower> source_tower;
  // LR baseline: one weight per feature plus a bias.
  EmbeddingTable linear;
  Tensor linear_bias;
};

using NamedTensor = std::pair<std::string, Tensor>;

// Width of the target tower input for a configuration.
std::size_t target_tower_width(const MiNetConfig& config, const ReprSpec& spec);

Tensor forward_target(Tape& tape, const Instance& instance,
                      const MiNetParams& params, const MiNetConfig& config,
                      const ReprSpec& spec);
Tensor forward_source(Tape& tape, const Instance& instance,
                      const MiNetParams& params, const MiNetConfig& config,
                      const ReprSpec& spec);
Tensor forward_baseline(Tape& tape, const Instance& instance, ModelKind kind,
                        const MiNetParams& params, const ReprSpec& spec);

struct AttentionTrace {
  std::vector<double> alpha;  // clicked-source weights
  std::vector<double> beta;   // clicked-target weights
  double v_user = 1.0;
  double v_source = 1.0;
  double v_target = 1.0;
};

class Model {
 public:
  Model(MiNetConfig config, ReprSpec spec, std::size_t vocabulary_size,
        std::uint64_t seed);

  const MiNetConfig& config() const { return config_; }
  const ReprSpec& spec() const { return spec_; }
  std::size_t vocabulary_size() const { return vocabulary_size_; }
  MiNetParams& params() { return params_; }
  const MiNetParams& params() const { return params_; }

  // Handles alias the live parameters, in a fixed order.
  std::vector<NamedTensor> named_parameters() const;
  std::size_t parameter_count() const;
  void fill_parameters(double value);

  Tensor forward_target(Tape& tape, const Instance& instance) const;
  Tensor forward_source(Tape& tape, const Instance& instance) const;
  // Dispatches on instance.domain.
  Tensor forward(Tape& tape, const Instance& instance) const;
  double predict(const Instance& instance) const;
  AttentionTrace trace_attention(const Instance& instance) const;

  // Deep copy with independent parameter storage.
  Model clone() const;
  void copy_parameters_from(const Model& other);

 private:
  MiNetConfig config_;
  ReprSpec spec_;
  std::size_t vocabulary_size_;
  MiNetParams params_;
};

}  // namespace minet
