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
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "minet/features.hpp"
#include "minet/metrics.hpp"
#include "minet/model.hpp"
#include "minet/tensor.hpp"

namespace minet {

struct TrainConfig {
  std::size_t batch_source = 64;
  std::size_t batch_target = 32;
  std::size_t epochs = 10;
  double learning_rate = 0.05;
  double epsilon = 1e-8;
  double gamma = 0.5;
  std::uint64_t seed = 1;
  std::size_t early_stop_patience = 0;  // 0 disables
  // With gamma = 0, still evaluate (without optimizing) the source loss for
  // the report; otherwise loss_s is logged as 0.
  bool log_unweighted_source_loss = true;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss_t = 0.0;
  double loss_s = 0.0;
  double combined = 0.0;
  double val_auc = std::numeric_limits<double>::quiet_NaN();
  double val_logloss = std::numeric_limits<double>::quiet_NaN();

  bool operator==(const EpochRecord&) const = default;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double gamma = 0.0;

  // One tab-separated line per epoch:
  // epoch loss_t loss_s combined val_auc val_logloss
  void write(std::ostream& out) const;
};

// Mean clamped cross entropy over a single-domain, non-empty batch.
Tensor batch_loss(Tape& tape, std::span<const Instance* const> batch,
                  const Model& model, Domain domain);
Tensor batch_loss(Tape& tape, std::span<const Instance> batch,
                  const Model& model, Domain domain);

struct TrainResult {
  Model model;  // parameters of the best validation epoch
  TrainReport report;
};

// Joint optimization of loss_t + gamma * loss_s with Adagrad. An epoch is one
// pass over the target training instances; each step pairs a target batch
// with the next source batch from a stream that reshuffles whenever it wraps.
//
// With an empty validation set the last epoch is selected.
TrainResult train(const Dataset& train_set,
                  std::span<const Instance> validation,
                  const MiNetConfig& model_config,
                  const TrainConfig& train_config);

std::vector<double> predict_all(const Model& model,
                                std::span<const Instance> instances);
EvalReport evaluate(const Model& model, std::span<const Instance> instances);

struct RepeatSummary {
  std::vector<double> values;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
};

RepeatSummary summarize(std::vector<double> values);

// Runs `run(seed)` for seeds base_seed, base_seed + 1, ...
RepeatSummary repeat_over_seeds(
    std::size_t repeats, std::uint64_t base_seed,
    const std::function<double(std::uint64_t)>& run);

}  // namespace minet
