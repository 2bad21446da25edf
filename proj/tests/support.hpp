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

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "minet/features.hpp"
#include "minet/model.hpp"
#include "minet/random.hpp"
#include "minet/tensor.hpp"
#include "minet/training.hpp"

namespace minet::testing {

// Two fields per group; the second source field is multi-valued.
inline Schema two_field_schema() {
  return Schema({
      {FieldGroup::user, "u0", FieldKind::single_valued},
      {FieldGroup::user, "u1", FieldKind::single_valued},
      {FieldGroup::source, "s0", FieldKind::single_valued},
      {FieldGroup::source, "s1", FieldKind::multi_valued},
      {FieldGroup::target, "t0", FieldKind::single_valued},
      {FieldGroup::target, "t1", FieldKind::single_valued},
  });
}

inline ItemFeatures random_item(Rng& rng, const Schema& schema,
                                FieldGroup group, std::size_t vocab) {
  ItemFeatures item;
  for (const FieldSchema& f : schema.fields()) {
    if (f.group != group) continue;
    const std::size_t members =
        f.kind == FieldKind::multi_valued ? 1 + rng.below(3) : 1;
    FieldValue v;
    for (std::size_t m = 0; m < members; ++m) {
      v.push_back(static_cast<FeatureId>(rng.below(vocab)));
    }
    item.push_back(std::move(v));
  }
  return item;
}

inline Instance random_instance(Rng& rng, const Schema& schema,
                                std::size_t vocab, Domain domain,
                                std::size_t max_source, std::size_t max_target,
                                bool allow_empty = true) {
  Instance inst;
  inst.domain = domain;
  inst.label = static_cast<int>(rng.below(2));
  inst.user = random_item(rng, schema, FieldGroup::user, vocab);
  inst.item = random_item(rng, schema,
                          domain == Domain::target ? FieldGroup::target
                                                   : FieldGroup::source,
                          vocab);
  const std::size_t lo = allow_empty ? 0 : 1;
  const std::size_t ns = lo + rng.below(max_source - lo + 1);
  const std::size_t nt = lo + rng.below(max_target - lo + 1);
  for (std::size_t i = 0; i < ns; ++i) {
    inst.clicked_source.push_back(
        random_item(rng, schema, FieldGroup::source, vocab));
  }
  for (std::size_t i = 0; i < nt; ++i) {
    inst.clicked_target.push_back(
        random_item(rng, schema, FieldGroup::target, vocab));
  }
  return inst;
}

// loss_t + gamma * loss_s, recorded on `tape`.
inline Tensor combined_loss(Tape& tape, const Model& model,
                            const std::vector<Instance>& target,
                            const std::vector<Instance>& source, double gamma) {
  Tensor lt = batch_loss(tape, target, model, Domain::target);
  if (source.empty() || gamma == 0.0) return lt;
  Tensor ls = batch_loss(tape, source, model, Domain::source);
  return add(tape, lt, scale(tape, ls, gamma));
}

struct GradCheck {
  double max_relative_error = 0.0;
  std::string worst;  // "name[index]"
  std::size_t checked = 0;
};

// Compares analytic gradients of `loss` with central differences for every
// entry of every named parameter. The relative error uses
// max(|analytic|, |numeric|, floor) as denominator.
inline GradCheck check_gradients(
    const std::vector<NamedTensor>& params,
    const std::function<Tensor(Tape&)>& loss, double h, double floor) {
  for (const auto& [name, t] : params) {
    Tensor copy = t;
    copy.clear_grad();
  }
  {
    Tape tape;
    tape.backward(loss(tape));
  }
  GradCheck out;
  for (const auto& [name, t] : params) {
    Tensor p = t;
    const auto g = p.grad_buffer();
    const std::vector<double> analytic(g.begin(), g.end());
    auto values = p.mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      Tape up(false);
      const double f_up = loss(up).item();
      values[i] = saved - h;
      Tape down(false);
      const double f_down = loss(down).item();
      values[i] = saved;
      const double numeric = (f_up - f_down) / (2.0 * h);
      const double denom =
          std::max({std::abs(analytic[i]), std::abs(numeric), floor});
      const double rel = std::abs(analytic[i] - numeric) / denom;
      ++out.checked;
      if (rel > out.max_relative_error) {
        out.max_relative_error = rel;
        out.worst = name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return out;
}

// Mann-Whitney by direct pair enumeration.
inline double pairwise_auc(const std::vector<double>& scores,
                           const std::vector<int>& labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

}  // namespace minet::testing
