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

#include "minet/embedding.hpp"
#include "minet/random.hpp"
#include "minet/tensor.hpp"

namespace minet {

// Item-level attention over clicked news, with the low-rank transfer
// M = M1 * M2 that maps source-item vectors into the target-item space.
struct SourceItemAttentionParams {
  Tensor W;   // [D_h, D_s + 2 D_t + D_u]
  Tensor h;   // [D_h]
  Tensor M1;  // [D_t, C]
  Tensor M2;  // [C, D_s]

  static SourceItemAttentionParams init(const ReprSpec& spec,
                                        std::size_t attention_dim,
                                        std::size_t transfer_rank, Rng& rng);
  std::size_t transfer_parameter_count() const {
    return M1.numel() + M2.numel();
  }
};

// Item-level attention over clicked ads. No transfer matrix: both sides live
// in the target-item space.
struct TargetItemAttentionParams {
  Tensor W;  // [D_h, 3 D_t + D_u]
  Tensor h;  // [D_h]

  static TargetItemAttentionParams init(const ReprSpec& spec,
                                        std::size_t attention_dim, Rng& rng);
};

struct InterestBranchParams {
  Tensor V;  // [D_h, D_s + 2 D_t + D_u]
  Tensor g;  // [D_h]
  Tensor b;  // [1]
};

// One gate per interest type: long-term (user), source short-term, target
// short-term.
struct InterestAttentionParams {
  InterestBranchParams user;
  InterestBranchParams source;
  InterestBranchParams target;

  static InterestAttentionParams init(const ReprSpec& spec,
                                      std::size_t attention_dim, Rng& rng);
};

// M1 * (M2 * r_si); the D_t x D_s product is never formed.
Tensor transfer(Tape& tape, const Tensor& clicked_source,
                const SourceItemAttentionParams& params);

// h_s^T ReLU(W_s [r_si | q_t | p_u | (M r_si) (.) q_t])
Tensor score_source_item(Tape& tape, const Tensor& clicked_source,
                         const Tensor& target_item, const Tensor& user,
                         const SourceItemAttentionParams& params);

// h_t^T ReLU(W_t [r_tj | q_t | p_u | r_tj (.) q_t])
Tensor score_target_item(Tape& tape, const Tensor& clicked_target,
                         const Tensor& target_item, const Tensor& user,
                         const TargetItemAttentionParams& params);

struct Aggregate {
  Tensor vector;   // weighted sum, or zeros when there are no items
  Tensor weights;  // softmax weights; undefined when there are no items
};

Aggregate aggregate_source(Tape& tape, std::span<const Tensor> clicked,
                           const Tensor& target_item, const Tensor& user,
                           const SourceItemAttentionParams& params);
Aggregate aggregate_target(Tape& tape, std::span<const Tensor> clicked,
                           const Tensor& target_item, const Tensor& user,
                           const TargetItemAttentionParams& params);
// Equal weights 1/n; zeros of length `dim` for an empty list.
Aggregate aggregate_uniform(Tape& tape, std::span<const Tensor> clicked,
                            std::size_t dim);

struct InterestWeights {
  Tensor user;    // v_u
  Tensor source;  // v_s
  Tensor target;  // v_t
};

// v_* = act(g_*^T ReLU(V_* [q_t | p_u | a_s | a_t]) + b_*), act in {exp,
// sigmoid}. Exp gates are unbounded above; sigmoid gates stay below 1.
InterestWeights interest_weights(Tape& tape, const Tensor& target_item,
                                 const Tensor& user, const Tensor& source_agg,
                                 const Tensor& target_agg,
                                 const InterestAttentionParams& params,
                                 Activation gate = Activation::exp);

// Unit gates, which make build_m_t the plain concatenation.
InterestWeights unit_interest_weights();

// [q_t | v_u p_u | v_s a_s | v_t a_t]
Tensor build_m_t(Tape& tape, const Tensor& target_item, const Tensor& user,
                 const Tensor& source_agg, const Tensor& target_agg,
                 const InterestWeights& weights);

}  // namespace minet
