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

#include "minet/attention.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "minet/errors.hpp"

namespace minet {

namespace {

Tensor uniform_tensor(Shape shape, double bound, Rng& rng) {
  std::vector<double> values(shape_numel(shape));
  for (double& v : values) v = rng.uniform(-bound, bound);
  return Tensor::from(std::move(shape), std::move(values), true);
}

double init_bound(const ReprSpec& spec) {
  return 1.0 / std::sqrt(static_cast<double>(spec.embedding_dim));
}

std::size_t joint_width(const ReprSpec& spec) {
  return spec.source_dim() + 2 * spec.target_dim() + spec.user_dim();
}

void require_length(const Tensor& t, std::size_t n, const char* what) {
  if (t.rank() != 1 || t.numel() != n) {
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(n) + ", got shape " +
                         shape_to_string(t.shape()));
  }
}

Aggregate softmax_aggregate(Tape& tape, std::span<const Tensor> clicked,
                            std::vector<Tensor> scores, std::size_t dim) {
  Aggregate agg;
  if (clicked.empty()) {
    agg.vector = Tensor::zeros({dim});
    return agg;
  }
  agg.weights = softmax_weights(tape, concat(tape, scores));
  agg.vector = weighted_sum(tape, agg.weights, clicked);
  return agg;
}

}  // namespace

SourceItemAttentionParams SourceItemAttentionParams::init(
    const ReprSpec& spec, std::size_t attention_dim,
    std::size_t transfer_rank, Rng& rng) {
  const double bound = init_bound(spec);
  SourceItemAttentionParams p;
  p.W = uniform_tensor({attention_dim, joint_width(spec)}, bound, rng);
  p.h = uniform_tensor({attention_dim}, bound, rng);
  p.M1 = uniform_tensor({spec.target_dim(), transfer_rank}, bound, rng);
  p.M2 = uniform_tensor({transfer_rank, spec.source_dim()}, bound, rng);
  return p;
}

TargetItemAttentionParams TargetItemAttentionParams::init(
    const ReprSpec& spec, std::size_t attention_dim, Rng& rng) {
  const double bound = init_bound(spec);
  TargetItemAttentionParams p;
  p.W = uniform_tensor(
      {attention_dim, 3 * spec.target_dim() + spec.user_dim()}, bound, rng);
  p.h = uniform_tensor({attention_dim}, bound, rng);
  return p;
}

InterestAttentionParams InterestAttentionParams::init(
    const ReprSpec& spec, std::size_t attention_dim, Rng& rng) {
  const double bound = init_bound(spec);
  auto branch = [&]() {
    InterestBranchParams b;
    b.V = uniform_tensor({attention_dim, joint_width(spec)}, bound, rng);
    b.g = uniform_tensor({attention_dim}, bound, rng);
    b.b = Tensor::scalar(0.0, true);
    return b;
  };
  InterestAttentionParams p;
  p.user = branch();
  p.source = branch();
  p.target = branch();
  return p;
}

Tensor transfer(Tape& tape, const Tensor& clicked_source,
                const SourceItemAttentionParams& params) {
  return matmul(tape, params.M1, matmul(tape, params.M2, clicked_source));
}

Tensor score_source_item(Tape& tape, const Tensor& clicked_source,
                         const Tensor& target_item, const Tensor& user,
                         const SourceItemAttentionParams& params) {
  const Tensor moved = transfer(tape, clicked_source, params);
  const Tensor interaction = mul(tape, moved, target_item);
  const Tensor joint =
      concat(tape, {clicked_source, target_item, user, interaction});
  return dot(tape, params.h, relu(tape, matmul(tape, params.W, joint)));
}

Tensor score_target_item(Tape& tape, const Tensor& clicked_target,
                         const Tensor& target_item, const Tensor& user,
                         const TargetItemAttentionParams& params) {
  const Tensor interaction = mul(tape, clicked_target, target_item);
  const Tensor joint =
      concat(tape, {clicked_target, target_item, user, interaction});
  return dot(tape, params.h, relu(tape, matmul(tape, params.W, joint)));
}

Aggregate aggregate_source(Tape& tape, std::span<const Tensor> clicked,
                           const Tensor& target_item, const Tensor& user,
                           const SourceItemAttentionParams& params) {
  std::vector<Tensor> scores;
  scores.reserve(clicked.size());
  for (const Tensor& r : clicked) {
    scores.push_back(score_source_item(tape, r, target_item, user, params));
  }
  return softmax_aggregate(tape, clicked, std::move(scores),
                           params.M2.shape()[1]);
}

Aggregate aggregate_target(Tape& tape, std::span<const Tensor> clicked,
                           const Tensor& target_item, const Tensor& user,
                           const TargetItemAttentionParams& params) {
  std::vector<Tensor> scores;
  scores.reserve(clicked.size());
  for (const Tensor& r : clicked) {
    scores.push_back(score_target_item(tape, r, target_item, user, params));
  }
  return softmax_aggregate(tape, clicked, std::move(scores),
                           target_item.numel());
}

Aggregate aggregate_uniform(Tape& tape, std::span<const Tensor> clicked,
                            std::size_t dim) {
  Aggregate agg;
  if (clicked.empty()) {
    agg.vector = Tensor::zeros({dim});
    return agg;
  }
  for (const Tensor& r : clicked) require_length(r, dim, "aggregate_uniform");
  agg.weights = Tensor::vector(std::vector<double>(
      clicked.size(), 1.0 / static_cast<double>(clicked.size())));
  agg.vector = weighted_sum(tape, agg.weights, clicked);
  return agg;
}

InterestWeights interest_weights(Tape& tape, const Tensor& target_item,
                                 const Tensor& user, const Tensor& source_agg,
                                 const Tensor& target_agg,
                                 const InterestAttentionParams& params,
                                 Activation gate) {
  if (gate != Activation::exp && gate != Activation::sigmoid) {
    throw ArgumentError("interest gate must be exp or sigmoid");
  }
  const Tensor joint =
      concat(tape, {target_item, user, source_agg, target_agg});
  auto weight = [&](const InterestBranchParams& b) {
    const Tensor hidden = relu(tape, matmul(tape, b.V, joint));
    return activation(tape, add(tape, dot(tape, b.g, hidden), b.b), gate);
  };
  return {weight(params.user), weight(params.source), weight(params.target)};
}

InterestWeights unit_interest_weights() {
  return {Tensor::scalar(1.0), Tensor::scalar(1.0), Tensor::scalar(1.0)};
}

Tensor build_m_t(Tape& tape, const Tensor& target_item, const Tensor& user,
                 const Tensor& source_agg, const Tensor& target_agg,
                 const InterestWeights& weights) {
  return concat(tape, {target_item, scale(tape, user, weights.user),
                       scale(tape, source_agg, weights.source),
                       scale(tape, target_agg, weights.target)});
}

}  // namespace minet
