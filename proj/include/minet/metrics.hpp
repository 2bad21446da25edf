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

namespace minet {

struct ScoredLabel {
  double score;
  int label;  // 0 or 1
};

struct EvalReport {
  double auc = 0.0;
  double logloss = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

// Mann-Whitney rank statistic: P(score_pos > score_neg) with ties counted
// one half. Throws MetricUndefinedError unless both classes are present.
double auc(std::span<const ScoredLabel> scored);

// Mean cross-entropy with predictions clamped to [1e-12, 1 - 1e-12].
double logloss(std::span<const ScoredLabel> scored);

// ((target - 0.5) / (base - 0.5) - 1) * 100, in percent.
double relaimpr(double target_auc, double base_auc);

EvalReport evaluate_scores(std::span<const ScoredLabel> scored);

}  // namespace minet
