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

#include "minet/training.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>

#include "minet/errors.hpp"
#include "minet/random.hpp"

namespace minet {

void TrainConfig::validate() const {
  if (batch_source == 0 || batch_target == 0) {
    throw ConfigError("batch sizes must be positive");
  }
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (!(learning_rate > 0.0) || !(epsilon > 0.0)) {
    throw ConfigError("learning_rate and epsilon must be positive");
  }
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
}

void TrainReport::write(std::ostream& out) const {
  const auto old = out.precision(17);
  for (const EpochRecord& e : epochs) {
    out << e.epoch << '\t' << e.loss_t << '\t' << e.loss_s << '\t'
        << e.combined << '\t' << e.val_auc << '\t' << e.val_logloss << '\n';
  }
  out.precision(old);
}

Tensor batch_loss(Tape& tape, std::span<const Instance* const> batch,
                  const Model& model, Domain domain) {
  if (batch.empty()) throw ArgumentError("batch_loss: empty batch");
  std::vector<Tensor> losses;
  losses.reserve(batch.size());
  for (const Instance* inst : batch) {
    if (inst->domain != domain) {
      throw DomainError("batch_loss: mixed-domain batch");
    }
    losses.push_back(
        binary_cross_entropy(tape, model.forward(tape, *inst), inst->label));
  }
  return scale(tape, sum(tape, concat(tape, losses)),
               1.0 / static_cast<double>(batch.size()));
}

Tensor batch_loss(Tape& tape, std::span<const Instance> batch,
                  const Model& model, Domain domain) {
  std::vector<const Instance*> ptrs;
  ptrs.reserve(batch.size());
  for (const Instance& inst : batch) ptrs.push_back(&inst);
  return batch_loss(tape, ptrs, model, domain);
}

std::vector<double> predict_all(const Model& model,
                                std::span<const Instance> instances) {
  std::vector<double> out;
  out.reserve(instances.size());
  for (const Instance& inst : instances) out.push_back(model.predict(inst));
  return out;
}

EvalReport evaluate(const Model& model, std::span<const Instance> instances) {
  const std::vector<double> preds = predict_all(model, instances);
  std::vector<ScoredLabel> scored;
  scored.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    scored.push_back({preds[i], instances[i].label});
  }
  return evaluate_scores(scored);
}

namespace {

// Endless shuffled stream over [0, n) that reshuffles on every wrap.
class IndexStream {
 public:
  IndexStream(std::size_t n, Rng& rng) : order_(n), rng_(rng) {
    std::iota(order_.begin(), order_.end(), 0);
    rng_.shuffle(std::span<std::size_t>(order_));
  }

  std::size_t next() {
    if (cursor_ == order_.size()) {
      rng_.shuffle(std::span<std::size_t>(order_));
      cursor_ = 0;
    }
    return order_[cursor_++];
  }

 private:
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  Rng& rng_;
};

}  // namespace

TrainResult train(const Dataset& train_set,
                  std::span<const Instance> validation,
                  const MiNetConfig& model_config,
                  const TrainConfig& tc) {
  tc.validate();
  model_config.validate();
  const auto& targets = train_set.target_instances;
  const auto& sources = train_set.source_instances;
  if (targets.empty()) {
    throw ConfigError("training set has no target-domain instances");
  }
  const bool joint = model_config.kind == ModelKind::minet && tc.gamma > 0.0;
  if (joint && sources.empty()) {
    throw ConfigError("gamma > 0 requires source-domain training instances");
  }

  const ReprSpec spec =
      ReprSpec::from_schema(train_set.schema, model_config.embedding_dim);
  Model model(model_config, spec, train_set.vocabulary.size(), tc.seed);
  Rng rng(tc.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<NamedTensor> params = model.named_parameters();
  std::vector<AdagradState> states(params.size());
  for (AdagradState& s : states) {
    s.learning_rate = tc.learning_rate;
    s.epsilon = tc.epsilon;
  }

  const bool log_source = model_config.kind == ModelKind::minet &&
                          !sources.empty() &&
                          (joint || tc.log_unweighted_source_loss);
  std::optional<IndexStream> source_stream;
  if (log_source) source_stream.emplace(sources.size(), rng);

  std::vector<std::size_t> target_order(targets.size());
  std::iota(target_order.begin(), target_order.end(), 0);
  const std::size_t steps =
      (targets.size() + tc.batch_target - 1) / tc.batch_target;

  TrainResult result{model.clone(), {}};
  result.report.gamma = tc.gamma;
  double best_auc = -1.0;
  std::size_t since_best = 0;
  std::vector<const Instance*> tbatch;
  std::vector<const Instance*> sbatch;

  for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(target_order));
    double sum_t = 0.0;
    double sum_s = 0.0;
    double sum_combined = 0.0;
    for (std::size_t step = 0; step < steps; ++step) {
      tbatch.clear();
      const std::size_t begin = step * tc.batch_target;
      const std::size_t end =
          std::min(begin + tc.batch_target, targets.size());
      for (std::size_t i = begin; i < end; ++i) {
        tbatch.push_back(&targets[target_order[i]]);
      }
      sbatch.clear();
      if (source_stream) {
        for (std::size_t i = 0; i < tc.batch_source; ++i) {
          sbatch.push_back(&sources[source_stream->next()]);
        }
      }

      Tape tape;
      const Tensor loss_t = batch_loss(tape, tbatch, model, Domain::target);
      double loss_s_value = 0.0;
      Tensor loss = loss_t;
      if (joint) {
        const Tensor loss_s = batch_loss(tape, sbatch, model, Domain::source);
        loss_s_value = loss_s.item();
        loss = add(tape, loss_t, scale(tape, loss_s, tc.gamma));
      } else if (log_source) {
        Tape eval(/*recording=*/false);
        loss_s_value = batch_loss(eval, sbatch, model, Domain::source).item();
      }
      tape.backward(loss);
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].second.has_grad()) {
          adagrad_step(params[i].second, states[i]);
        }
      }
      sum_t += loss_t.item();
      sum_s += loss_s_value;
      sum_combined += loss_t.item() + tc.gamma * loss_s_value;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss_t = sum_t / static_cast<double>(steps);
    rec.loss_s = sum_s / static_cast<double>(steps);
    rec.combined = sum_combined / static_cast<double>(steps);
    bool improved = validation.empty();
    if (!validation.empty()) {
      const EvalReport val = evaluate(model, validation);
      rec.val_auc = val.auc;
      rec.val_logloss = val.logloss;
      improved = val.auc > best_auc;
    }
    result.report.epochs.push_back(rec);
    if (improved) {
      if (!validation.empty()) best_auc = rec.val_auc;
      result.report.best_epoch = epoch;
      result.model.copy_parameters_from(model);
      since_best = 0;
    } else if (tc.early_stop_patience > 0 &&
               ++since_best >= tc.early_stop_patience) {
      break;
    }
  }
  return result;
}

RepeatSummary summarize(std::vector<double> values) {
  RepeatSummary s;
  s.values = std::move(values);
  if (s.values.empty()) return s;
  s.mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) /
           static_cast<double>(s.values.size());
  if (s.values.size() > 1) {
    double ss = 0.0;
    for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.values.size() - 1));
  }
  return s;
}

RepeatSummary repeat_over_seeds(
    std::size_t repeats, std::uint64_t base_seed,
    const std::function<double(std::uint64_t)>& run) {
  std::vector<double> values;
  values.reserve(repeats);
  for (std::size_t i = 0; i < repeats; ++i) values.push_back(run(base_seed + i));
  return summarize(std::move(values));
}

}  // namespace minet
