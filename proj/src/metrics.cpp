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

#include "minet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "minet/errors.hpp"
#include "minet/tensor.hpp"

namespace minet {

double auc(std::span<const ScoredLabel> scored) {
  std::size_t n_pos = 0;
  for (const ScoredLabel& s : scored) {
    if (s.label != 0 && s.label != 1) {
      throw ArgumentError("auc: labels must be 0 or 1");
    }
    n_pos += s.label == 1;
  }
  const std::size_t n_neg = scored.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw MetricUndefinedError("AUC is undefined: need at least one positive "
                               "and one negative, got " +
                               std::to_string(n_pos) + " positive and " +
                               std::to_string(n_neg) + " negative");
  }

  std::vector<ScoredLabel> sorted(scored.begin(), scored.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredLabel& a, const ScoredLabel& b) {
              return a.score < b.score;
            });
  // Sum of positive ranks with tied groups sharing their mean rank; ranks
  // are kept doubled so that the arithmetic stays in integers.
  unsigned long long doubled_rank_sum = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      pos_in_group += sorted[j].label == 1;
      ++j;
    }
    // Ranks i+1 .. j; doubled mean rank = i + 1 + j.
    doubled_rank_sum += static_cast<unsigned long long>(pos_in_group) *
                        static_cast<unsigned long long>(i + 1 + j);
    i = j;
  }
  const unsigned long long doubled_min =
      static_cast<unsigned long long>(n_pos) * (n_pos + 1);
  const double u =
      static_cast<double>(doubled_rank_sum - doubled_min) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double logloss(std::span<const ScoredLabel> scored) {
  if (scored.empty()) throw ArgumentError("logloss of an empty set");
  double total = 0.0;
  for (const ScoredLabel& s : scored) {
    const double p = clamp_probability(s.score);
    total += s.label == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  return total / static_cast<double>(scored.size());
}

double relaimpr(double target_auc, double base_auc) {
  if (!(base_auc > 0.5)) {
    throw MetricUndefinedError("RelaImpr is undefined for base AUC <= 0.5");
  }
  return ((target_auc - 0.5) / (base_auc - 0.5) - 1.0) * 100.0;
}

EvalReport evaluate_scores(std::span<const ScoredLabel> scored) {
  EvalReport r;
  for (const ScoredLabel& s : scored) (s.label == 1 ? r.n_pos : r.n_neg)++;
  r.auc = auc(scored);
  r.logloss = logloss(scored);
  return r;
}

}  // namespace minet
