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

#include "minet/model.hpp"

#include <cmath>
#include <string>

#include "minet/errors.hpp"

namespace minet {

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::minet:
      return "minet";
    case ModelKind::lr:
      return "lr";
    case ModelKind::dnn:
      return "dnn";
  }
  return "?";
}

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::full:
      return "full";
    case Ablation::no_attention:
      return "no_attention";
    case Ablation::item_only:
      return "item_only";
    case Ablation::interest_only:
      return "interest_only";
    case Ablation::long_term_only:
      return "long_term_only";
    case Ablation::short_src_only:
      return "short_src_only";
    case Ablation::short_tgt_only:
      return "short_tgt_only";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view s) {
  if (s == "minet") return ModelKind::minet;
  if (s == "lr") return ModelKind::lr;
  if (s == "dnn") return ModelKind::dnn;
  throw ArgumentError("unknown model kind '" + std::string(s) + "'");
}

Ablation parse_ablation(std::string_view s) {
  for (Ablation a :
       {Ablation::full, Ablation::no_attention, Ablation::item_only,
        Ablation::interest_only, Ablation::long_term_only,
        Ablation::short_src_only, Ablation::short_tgt_only}) {
    if (s == to_string(a)) return a;
  }
  throw ArgumentError("unknown ablation '" + std::string(s) + "'");
}

Activation parse_interest_activation(std::string_view s) {
  if (s == "exp") return Activation::exp;
  if (s == "sigmoid") return Activation::sigmoid;
  throw ArgumentError("interest activation must be exp or sigmoid, got '" +
                      std::string(s) + "'");
}

void MiNetConfig::validate() const {
  if (embedding_dim == 0 || transfer_rank == 0 || attention_dim == 0) {
    throw ConfigError("embedding_dim, transfer_rank and attention_dim must be "
                      "positive");
  }
  if (fc_dims.empty()) throw ConfigError("fc_dims must be non-empty");
  for (std::size_t d : fc_dims) {
    if (d == 0) throw ConfigError("fc_dims entries must be positive");
  }
  if (interest_activation != Activation::exp &&
      interest_activation != Activation::sigmoid) {
    throw ConfigError("interest_activation must be exp or sigmoid");
  }
  if (max_source_seq == 0 || max_target_seq == 0) {
    throw ConfigError("sequence maxima must be positive");
  }
}

bool MiNetConfig::uses_source_attention() const {
  return kind == ModelKind::minet &&
         (ablation == Ablation::full || ablation == Ablation::item_only ||
          ablation == Ablation::short_src_only);
}

bool MiNetConfig::uses_target_attention() const {
  return kind == ModelKind::minet &&
         (ablation == Ablation::full || ablation == Ablation::item_only ||
          ablation == Ablation::short_tgt_only);
}

bool MiNetConfig::uses_interest_attention() const {
  return kind == ModelKind::minet &&
         (ablation == Ablation::full || ablation == Ablation::interest_only);
}

// ---------------------------------------------------------------------------
// Tower

Tower Tower::init(std::size_t input_dim,
                  const std::vector<std::size_t>& fc_dims, Rng& rng) {
  auto layer = [&](std::size_t in, std::size_t out) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::vector<double> w(out * in);
    for (double& v : w) v = rng.uniform(-bound, bound);
    return DenseLayer{Tensor::from({out, in}, std::move(w), true),
                      Tensor::zeros({out}, true)};
  };
  Tower t;
  std::size_t in = input_dim;
  for (std::size_t out : fc_dims) {
    t.hidden.push_back(layer(in, out));
    in = out;
  }
  t.output = layer(in, 1);
  return t;
}

std::size_t Tower::input_dim() const {
  const DenseLayer& first = hidden.empty() ? output : hidden.front();
  return first.weight.shape()[1];
}

Tensor Tower::forward(Tape& tape, const Tensor& input) const {
  Tensor z = input;
  for (const DenseLayer& l : hidden) {
    z = relu(tape, add(tape, matmul(tape, l.weight, z), l.bias));
  }
  return sigmoid(tape,
                 add(tape, matmul(tape, output.weight, z), output.bias));
}

// ---------------------------------------------------------------------------
// Forward passes

std::size_t target_tower_width(const MiNetConfig& config,
                               const ReprSpec& spec) {
  const std::size_t dt = spec.target_dim();
  if (config.kind == ModelKind::dnn) return dt + spec.user_dim();
  switch (config.ablation) {
    case Ablation::long_term_only:
      return dt + spec.user_dim();
    case Ablation::short_src_only:
      return dt + spec.source_dim();
    case Ablation::short_tgt_only:
      return 2 * dt;
    default:
      return 2 * dt + spec.user_dim() + spec.source_dim();
  }
}

namespace {

void require_domain(const Instance& inst, Domain expected, const char* who) {
  if (inst.domain != expected) {
    throw DomainError(std::string(who) + " needs a " +
                      std::string(to_string(expected)) +
                      "-domain instance, got " +
                      std::string(to_string(inst.domain)));
  }
}

std::vector<double> copy_values(const Tensor& t) {
  if (!t.defined()) return {};
  return {t.values().begin(), t.values().end()};
}

Tensor minet_target(Tape& tape, const Instance& inst, const MiNetParams& p,
                    const MiNetConfig& cfg, const ReprSpec& spec,
                    AttentionTrace* trace) {
  const Ablation ab = cfg.ablation;
  const bool needs_sequences = ab != Ablation::long_term_only;
  Representations r =
      build_reprs(tape, inst, p.embedding, spec, needs_sequences);
  const Tensor& q = r.item;
  const Tensor& pu = r.user;

  Aggregate src;
  Aggregate tgt;
  const bool want_src = ab != Ablation::long_term_only &&
                        ab != Ablation::short_tgt_only;
  const bool want_tgt = ab != Ablation::long_term_only &&
                        ab != Ablation::short_src_only;
  if (want_src) {
    src = cfg.uses_source_attention()
              ? aggregate_source(tape, r.clicked_source, q, pu,
                                 *p.source_attention)
              : aggregate_uniform(tape, r.clicked_source, spec.source_dim());
  }
  if (want_tgt) {
    tgt = cfg.uses_target_attention()
              ? aggregate_target(tape, r.clicked_target, q, pu,
                                 *p.target_attention)
              : aggregate_uniform(tape, r.clicked_target, spec.target_dim());
  }

  Tensor m;
  InterestWeights gates = unit_interest_weights();
  switch (ab) {
    case Ablation::long_term_only:
      m = concat(tape, {q, pu});
      break;
    case Ablation::short_src_only:
      m = concat(tape, {q, src.vector});
      break;
    case Ablation::short_tgt_only:
      m = concat(tape, {q, tgt.vector});
      break;
    default:
      if (cfg.uses_interest_attention()) {
        gates = interest_weights(tape, q, pu, src.vector, tgt.vector,
                                 *p.interest, cfg.interest_activation);
      }
      m = build_m_t(tape, q, pu, src.vector, tgt.vector, gates);
      break;
  }
  if (trace) {
    trace->alpha = copy_values(src.weights);
    trace->beta = copy_values(tgt.weights);
    trace->v_user = gates.user.item();
    trace->v_source = gates.source.item();
    trace->v_target = gates.target.item();
  }
  return p.target_tower->forward(tape, m);
}

}  // namespace

Tensor forward_baseline(Tape& tape, const Instance& inst, ModelKind kind,
                        const MiNetParams& p, const ReprSpec& spec) {
  require_domain(inst, Domain::target, "forward_baseline");
  switch (kind) {
    case ModelKind::lr: {
      if (!p.linear_bias.defined()) {
        throw StateError("LR baseline parameters are not allocated");
      }
      const Tensor user = lookup_fields(tape, p.linear, inst.user);
      const Tensor item = lookup_fields(tape, p.linear, inst.item);
      const Tensor logit =
          add(tape, add(tape, sum(tape, user), sum(tape, item)),
              p.linear_bias);
      return sigmoid(tape, logit);
    }
    case ModelKind::dnn: {
      if (!p.target_tower) {
        throw StateError("DNN baseline parameters are not allocated");
      }
      Representations r = build_reprs(tape, inst, p.embedding, spec, false);
      return p.target_tower->forward(tape, concat(tape, {r.item, r.user}));
    }
    case ModelKind::minet:
      break;
  }
  throw ArgumentError("forward_baseline: kind must be lr or dnn");
}

Tensor forward_target(Tape& tape, const Instance& inst, const MiNetParams& p,
                      const MiNetConfig& cfg, const ReprSpec& spec) {
  require_domain(inst, Domain::target, "forward_target");
  if (cfg.kind != ModelKind::minet) {
    return forward_baseline(tape, inst, cfg.kind, p, spec);
  }
  return minet_target(tape, inst, p, cfg, spec, nullptr);
}

Tensor forward_source(Tape& tape, const Instance& inst, const MiNetParams& p,
                      const MiNetConfig& cfg, const ReprSpec& spec) {
  require_domain(inst, Domain::source, "forward_source");
  if (!cfg.has_source_tower() || !p.source_tower) {
    throw StateError("model has no source tower");
  }
  Representations r = build_reprs(tape, inst, p.embedding, spec, false);
  return p.source_tower->forward(tape, concat(tape, {r.item, r.user}));
}

// ---------------------------------------------------------------------------
// Model

Model::Model(MiNetConfig config, ReprSpec spec, std::size_t vocabulary_size,
             std::uint64_t seed)
    : config_(std::move(config)),
      spec_(spec),
      vocabulary_size_(vocabulary_size) {
  config_.validate();
  spec_.validate();
  if (spec_.embedding_dim != config_.embedding_dim) {
    throw ConfigError("ReprSpec embedding dim does not match config");
  }
  if (vocabulary_size_ == 0) throw ConfigError("empty vocabulary");
  Rng rng(seed);
  if (config_.kind == ModelKind::lr) {
    params_.linear = EmbeddingTable(
        Tensor::zeros({1, vocabulary_size_}, /*requires_grad=*/true));
    params_.linear_bias = Tensor::scalar(0.0, true);
    return;
  }
  params_.embedding =
      EmbeddingTable::uniform(spec_.embedding_dim, vocabulary_size_, rng);
  if (config_.uses_source_attention()) {
    params_.source_attention = SourceItemAttentionParams::init(
        spec_, config_.attention_dim, config_.transfer_rank, rng);
  }
  if (config_.uses_target_attention()) {
    params_.target_attention =
        TargetItemAttentionParams::init(spec_, config_.attention_dim, rng);
  }
  if (config_.uses_interest_attention()) {
    params_.interest =
        InterestAttentionParams::init(spec_, config_.attention_dim, rng);
  }
  params_.target_tower =
      Tower::init(target_tower_width(config_, spec_), config_.fc_dims, rng);
  if (config_.has_source_tower()) {
    params_.source_tower = Tower::init(spec_.source_dim() + spec_.user_dim(),
                                       config_.fc_dims, rng);
  }
}

std::vector<NamedTensor> Model::named_parameters() const {
  std::vector<NamedTensor> out;
  const MiNetParams& p = params_;
  auto tower = [&](const std::string& prefix, const Tower& t) {
    for (std::size_t i = 0; i < t.hidden.size(); ++i) {
      const std::string stem = prefix + ".fc" + std::to_string(i);
      out.emplace_back(stem + ".weight", t.hidden[i].weight);
      out.emplace_back(stem + ".bias", t.hidden[i].bias);
    }
    out.emplace_back(prefix + ".out.weight", t.output.weight);
    out.emplace_back(prefix + ".out.bias", t.output.bias);
  };
  if (p.linear_bias.defined()) {
    out.emplace_back("linear.weight", p.linear.matrix());
    out.emplace_back("linear.bias", p.linear_bias);
    return out;
  }
  out.emplace_back("embedding", p.embedding.matrix());
  if (p.source_attention) {
    out.emplace_back("source_attention.W", p.source_attention->W);
    out.emplace_back("source_attention.h", p.source_attention->h);
    out.emplace_back("source_attention.M1", p.source_attention->M1);
    out.emplace_back("source_attention.M2", p.source_attention->M2);
  }
  if (p.target_attention) {
    out.emplace_back("target_attention.W", p.target_attention->W);
    out.emplace_back("target_attention.h", p.target_attention->h);
  }
  if (p.interest) {
    auto branch = [&](const std::string& name, const InterestBranchParams& b) {
      out.emplace_back("interest." + name + ".V", b.V);
      out.emplace_back("interest." + name + ".g", b.g);
      out.emplace_back("interest." + name + ".b", b.b);
    };
    branch("user", p.interest->user);
    branch("source", p.interest->source);
    branch("target", p.interest->target);
  }
  if (p.target_tower) tower("target_tower", *p.target_tower);
  if (p.source_tower) tower("source_tower", *p.source_tower);
  return out;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : named_parameters()) n += t.numel();
  return n;
}

void Model::fill_parameters(double value) {
  for (auto& [name, t] : named_parameters()) {
    Tensor handle = t;
    for (double& v : handle.mutable_values()) v = value;
  }
}

Tensor Model::forward_target(Tape& tape, const Instance& instance) const {
  return minet::forward_target(tape, instance, params_, config_, spec_);
}

Tensor Model::forward_source(Tape& tape, const Instance& instance) const {
  return minet::forward_source(tape, instance, params_, config_, spec_);
}

Tensor Model::forward(Tape& tape, const Instance& instance) const {
  return instance.domain == Domain::target ? forward_target(tape, instance)
                                           : forward_source(tape, instance);
}

double Model::predict(const Instance& instance) const {
  Tape tape(/*recording=*/false);
  return forward(tape, instance).item();
}

AttentionTrace Model::trace_attention(const Instance& instance) const {
  require_domain(instance, Domain::target, "trace_attention");
  if (config_.kind != ModelKind::minet) {
    throw ArgumentError("attention inspection needs a MiNet model");
  }
  Tape tape(/*recording=*/false);
  AttentionTrace trace;
  minet_target(tape, instance, params_, config_, spec_, &trace);
  return trace;
}

Model Model::clone() const {
  Model copy = *this;
  // The member-wise copy aliases storage; re-point every handle at fresh
  // tensors.
  auto fresh = [](Tensor& t) {
    if (t.defined()) t = t.clone();
  };
  MiNetParams& p = copy.params_;
  if (p.embedding.matrix().defined()) {
    p.embedding = EmbeddingTable(p.embedding.matrix().clone());
  }
  if (p.linear.matrix().defined()) {
    p.linear = EmbeddingTable(p.linear.matrix().clone());
  }
  fresh(p.linear_bias);
  if (p.source_attention) {
    fresh(p.source_attention->W);
    fresh(p.source_attention->h);
    fresh(p.source_attention->M1);
    fresh(p.source_attention->M2);
  }
  if (p.target_attention) {
    fresh(p.target_attention->W);
    fresh(p.target_attention->h);
  }
  if (p.interest) {
    for (InterestBranchParams* b :
         {&p.interest->user, &p.interest->source, &p.interest->target}) {
      fresh(b->V);
      fresh(b->g);
      fresh(b->b);
    }
  }
  for (std::optional<Tower>* t : {&p.target_tower, &p.source_tower}) {
    if (!*t) continue;
    for (DenseLayer& l : (*t)->hidden) {
      fresh(l.weight);
      fresh(l.bias);
    }
    fresh((*t)->output.weight);
    fresh((*t)->output.bias);
  }
  return copy;
}

void Model::copy_parameters_from(const Model& other) {
  auto mine = named_parameters();
  const auto theirs = other.named_parameters();
  if (mine.size() != theirs.size()) {
    throw StateError("copy_parameters_from: parameter layouts differ");
  }
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (mine[i].first != theirs[i].first ||
        mine[i].second.shape() != theirs[i].second.shape()) {
      throw StateError("copy_parameters_from: mismatch at " + mine[i].first);
    }
    const auto src = theirs[i].second.values();
    auto dst = mine[i].second.mutable_values();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

}  // namespace minet
