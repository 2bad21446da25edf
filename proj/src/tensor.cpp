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

#include "minet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "minet/errors.hpp"

namespace minet {

std::string shape_to_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

// ---------------------------------------------------------------------------
// Tensor

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return from(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::from(Shape shape, std::vector<double> values,
                    bool requires_grad) {
  if (shape.empty()) throw DimensionError("tensor shape must be non-empty");
  for (std::size_t d : shape) {
    if (d == 0) {
      throw DimensionError("tensor dimensions must be positive, got " +
                           shape_to_string(shape));
    }
  }
  if (shape_numel(shape) != values.size()) {
    throw DimensionError("shape " + shape_to_string(shape) + " needs " +
                         std::to_string(shape_numel(shape)) +
                         " values, got " + std::to_string(values.size()));
  }
  Tensor t;
  t.impl_ = std::make_shared<Impl>();
  t.impl_->shape = std::move(shape);
  t.impl_->values = std::move(values);
  t.impl_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::vector(std::vector<double> values, bool requires_grad) {
  const std::size_t n = values.size();
  return from({n}, std::move(values), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from({1}, {value}, requires_grad);
}

const Shape& Tensor::shape() const { return impl_->shape; }
std::size_t Tensor::numel() const { return impl_->values.size(); }

std::span<const double> Tensor::values() const { return impl_->values; }
std::span<double> Tensor::mutable_values() { return impl_->values; }

double Tensor::item() const {
  if (numel() != 1) {
    throw DimensionError("item() on tensor of shape " +
                         shape_to_string(shape()));
  }
  return impl_->values[0];
}

bool Tensor::requires_grad() const { return impl_->requires_grad; }
void Tensor::set_requires_grad(bool on) { impl_->requires_grad = on; }

bool Tensor::has_grad() const { return impl_->has_grad; }

std::span<const double> Tensor::grad() const {
  if (!impl_->has_grad) throw StateError("tensor has no gradient");
  return impl_->grad;
}

std::span<double> Tensor::grad_buffer() const {
  if (!impl_->has_grad) {
    impl_->grad.assign(impl_->values.size(), 0.0);
    impl_->has_grad = true;
  }
  return impl_->grad;
}

void Tensor::clear_grad() {
  impl_->grad.clear();
  impl_->has_grad = false;
}

Tensor Tensor::clone() const {
  Tensor t = from(shape(), impl_->values, impl_->requires_grad);
  return t;
}

// ---------------------------------------------------------------------------
// Tape

bool Tape::wants_grad(std::initializer_list<const Tensor*> inputs) {
  for (const Tensor* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

void Tape::record(const Tensor& output, std::vector<Tensor> inputs,
                  std::function<void()> backward) {
  if (!recording_) return;
  nodes_.push_back({output, std::move(inputs), std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ArgumentError("backward() needs a scalar loss, got shape " +
                        (loss.defined() ? shape_to_string(loss.shape())
                                        : std::string("<undefined>")));
  }
  if (!loss.requires_grad()) {
    throw StateError("loss does not depend on any tensor requiring grad");
  }

  std::unordered_set<const void*> produced;
  produced.reserve(nodes_.size() * 2);
  for (Node& node : nodes_) {
    produced.insert(node.output.id());
    node.output.clear_grad();
  }

  // Leaf gradients from earlier sweeps are set aside so that this sweep's
  // contributions are summed on their own and added once at the end.
  std::unordered_map<const void*, std::pair<Tensor, std::vector<double>>>
      stashed;
  auto stash = [&](Tensor& leaf) {
    if (produced.count(leaf.id()) || stashed.count(leaf.id())) return;
    std::vector<double> previous;
    if (leaf.has_grad()) previous = std::move(leaf.impl_->grad);
    leaf.clear_grad();
    stashed.emplace(leaf.id(), std::make_pair(leaf, std::move(previous)));
  };
  for (Node& node : nodes_) {
    for (Tensor& in : node.inputs) {
      if (in.requires_grad()) stash(in);
    }
  }
  Tensor root = loss;
  if (!produced.count(root.id())) stash(root);

  root.grad_buffer()[0] += 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (it->output.has_grad()) it->backward();
  }

  for (auto& [id, entry] : stashed) {
    auto& [leaf, previous] = entry;
    if (previous.empty()) continue;
    if (!leaf.has_grad()) {
      leaf.impl_->grad = std::move(previous);
      leaf.impl_->has_grad = true;
      continue;
    }
    std::span<double> g = leaf.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = previous[i] + g[i];
  }
}

// ---------------------------------------------------------------------------
// Ops

namespace {

Tensor make_result(Tape& tape, Shape shape, std::vector<double> values,
                   bool wants) {
  return Tensor::from(std::move(shape), std::move(values),
                      wants && tape.recording());
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         shape_to_string(a.shape()) + " vs " +
                         shape_to_string(b.shape()));
  }
}

void require_vector(const Tensor& t, const char* op) {
  if (t.rank() != 1) {
    throw DimensionError(std::string(op) + ": expected a vector, got " +
                         shape_to_string(t.shape()));
  }
}

}  // namespace

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || (b.rank() != 1 && b.rank() != 2) ||
      a.shape()[1] != b.shape()[0]) {
    throw DimensionError("matmul: incompatible shapes " +
                         shape_to_string(a.shape()) + " and " +
                         shape_to_string(b.shape()));
  }
  const std::size_t m = a.shape()[0];
  const std::size_t k = a.shape()[1];
  const std::size_t n = b.rank() == 2 ? b.shape()[1] : 1;
  std::vector<double> out(m * n, 0.0);
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = bv.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += aip * brow[j];
    }
  }
  Shape shape = b.rank() == 2 ? Shape{m, n} : Shape{m};
  const bool wants = Tape::wants_grad({&a, &b});
  Tensor c = make_result(tape, std::move(shape), std::move(out), wants);
  if (c.requires_grad()) {
    tape.record(c, {a, b}, [a, b, c, m, k, n]() mutable {
      const auto dc = c.grad();
      if (a.requires_grad()) {
        auto da = a.grad_buffer();
        const auto bv = b.values();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
              acc += dc[i * n + j] * bv[p * n + j];
            }
            da[i * k + p] += acc;
          }
        }
      }
      if (b.requires_grad()) {
        auto db = b.grad_buffer();
        const auto av = a.values();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            const double aip = av[i * k + p];
            for (std::size_t j = 0; j < n; ++j) {
              db[p * n + j] += aip * dc[i * n + j];
            }
          }
        }
      }
    });
  }
  return c;
}

Tensor elementwise(Tape& tape, const Tensor& a, const Tensor& b,
                   ElementwiseOp op) {
  require_same_shape(a, b, op == ElementwiseOp::add ? "add" : "mul");
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> out(av.size());
  if (op == ElementwiseOp::add) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  }
  const bool wants = Tape::wants_grad({&a, &b});
  Tensor c = make_result(tape, a.shape(), std::move(out), wants);
  if (c.requires_grad()) {
    tape.record(c, {a, b}, [a, b, c, op]() mutable {
      const auto dc = c.grad();
      if (a.requires_grad()) {
        auto da = a.grad_buffer();
        if (op == ElementwiseOp::add) {
          for (std::size_t i = 0; i < dc.size(); ++i) da[i] += dc[i];
        } else {
          const auto bv = b.values();
          for (std::size_t i = 0; i < dc.size(); ++i) da[i] += dc[i] * bv[i];
        }
      }
      if (b.requires_grad()) {
        auto db = b.grad_buffer();
        if (op == ElementwiseOp::add) {
          for (std::size_t i = 0; i < dc.size(); ++i) db[i] += dc[i];
        } else {
          const auto av = a.values();
          for (std::size_t i = 0; i < dc.size(); ++i) db[i] += dc[i] * av[i];
        }
      }
    });
  }
  return c;
}

Tensor activation(Tape& tape, const Tensor& x, Activation kind) {
  const auto xv = x.values();
  std::vector<double> out(xv.size());
  switch (kind) {
    case Activation::relu:
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = xv[i] > 0.0 ? xv[i] : 0.0;
      }
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = xv[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-xv[i]))
                              : std::exp(xv[i]) / (1.0 + std::exp(xv[i]));
      }
      break;
    case Activation::exp:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(xv[i]);
      break;
  }
  Tensor y = make_result(tape, x.shape(), std::move(out), x.requires_grad());
  if (y.requires_grad()) {
    tape.record(y, {x}, [x, y, kind]() mutable {
      const auto dy = y.grad();
      const auto yv = y.values();
      auto dx = x.grad_buffer();
      for (std::size_t i = 0; i < dy.size(); ++i) {
        switch (kind) {
          case Activation::relu:
            // Subgradient at exactly 0 is 0.
            if (yv[i] > 0.0) dx[i] += dy[i];
            break;
          case Activation::sigmoid:
            dx[i] += dy[i] * yv[i] * (1.0 - yv[i]);
            break;
          case Activation::exp:
            dx[i] += dy[i] * yv[i];
            break;
        }
      }
    });
  }
  return y;
}

Tensor softmax_weights(Tape& tape, const Tensor& scores) {
  require_vector(scores, "softmax_weights");
  const auto sv = scores.values();
  const double top = *std::max_element(sv.begin(), sv.end());
  std::vector<double> out(sv.size());
  double total = 0.0;
  for (std::size_t i = 0; i < sv.size(); ++i) {
    out[i] = std::exp(sv[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  Tensor y = make_result(tape, scores.shape(), std::move(out),
                         scores.requires_grad());
  if (y.requires_grad()) {
    tape.record(y, {scores}, [scores, y]() mutable {
      const auto dy = y.grad();
      const auto yv = y.values();
      double inner = 0.0;
      for (std::size_t i = 0; i < dy.size(); ++i) inner += dy[i] * yv[i];
      auto dx = scores.grad_buffer();
      for (std::size_t i = 0; i < dy.size(); ++i) {
        dx[i] += yv[i] * (dy[i] - inner);
      }
    });
  }
  return y;
}

Tensor concat(Tape& tape, std::span<const Tensor> parts) {
  if (parts.empty()) throw ArgumentError("concat: empty parts list");
  std::size_t total = 0;
  bool wants = false;
  for (const Tensor& p : parts) {
    require_vector(p, "concat");
    total += p.numel();
    wants = wants || p.requires_grad();
  }
  std::vector<double> out;
  out.reserve(total);
  for (const Tensor& p : parts) {
    const auto v = p.values();
    out.insert(out.end(), v.begin(), v.end());
  }
  Tensor y = make_result(tape, {total}, std::move(out), wants);
  if (y.requires_grad()) {
    std::vector<Tensor> inputs(parts.begin(), parts.end());
    tape.record(y, inputs, [inputs, y]() mutable {
      const auto dy = y.grad();
      std::size_t offset = 0;
      for (Tensor& p : inputs) {
        const std::size_t n = p.numel();
        if (p.requires_grad()) {
          auto dp = p.grad_buffer();
          for (std::size_t i = 0; i < n; ++i) dp[i] += dy[offset + i];
        }
        offset += n;
      }
    });
  }
  return y;
}

Tensor sum(Tape& tape, const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) total += v;
  Tensor y = make_result(tape, {1}, {total}, x.requires_grad());
  if (y.requires_grad()) {
    tape.record(y, {x}, [x, y]() mutable {
      const double g = y.grad()[0];
      for (double& d : x.grad_buffer()) d += g;
    });
  }
  return y;
}

Tensor dot(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a.numel() != b.numel()) {
    throw DimensionError("dot: shape mismatch " + shape_to_string(a.shape()) +
                         " vs " + shape_to_string(b.shape()));
  }
  const auto av = a.values();
  const auto bv = b.values();
  double total = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) total += av[i] * bv[i];
  const bool wants = Tape::wants_grad({&a, &b});
  Tensor y = make_result(tape, {1}, {total}, wants);
  if (y.requires_grad()) {
    tape.record(y, {a, b}, [a, b, y]() mutable {
      const double g = y.grad()[0];
      if (a.requires_grad()) {
        auto da = a.grad_buffer();
        const auto bv = b.values();
        for (std::size_t i = 0; i < da.size(); ++i) da[i] += g * bv[i];
      }
      if (b.requires_grad()) {
        auto db = b.grad_buffer();
        const auto av = a.values();
        for (std::size_t i = 0; i < db.size(); ++i) db[i] += g * av[i];
      }
    });
  }
  return y;
}

Tensor scale(Tape& tape, const Tensor& x, const Tensor& s) {
  if (s.numel() != 1) {
    throw DimensionError("scale: factor must have one element, got " +
                         shape_to_string(s.shape()));
  }
  const double f = s.values()[0];
  const auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * f;
  const bool wants = Tape::wants_grad({&x, &s});
  Tensor y = make_result(tape, x.shape(), std::move(out), wants);
  if (y.requires_grad()) {
    tape.record(y, {x, s}, [x, s, y]() mutable {
      const auto dy = y.grad();
      if (x.requires_grad()) {
        const double f = s.values()[0];
        auto dx = x.grad_buffer();
        for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i] * f;
      }
      if (s.requires_grad()) {
        const auto xv = x.values();
        double acc = 0.0;
        for (std::size_t i = 0; i < dy.size(); ++i) acc += dy[i] * xv[i];
        s.grad_buffer()[0] += acc;
      }
    });
  }
  return y;
}

Tensor scale(Tape& tape, const Tensor& x, double c) {
  const auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * c;
  Tensor y = make_result(tape, x.shape(), std::move(out), x.requires_grad());
  if (y.requires_grad()) {
    tape.record(y, {x}, [x, y, c]() mutable {
      const auto dy = y.grad();
      auto dx = x.grad_buffer();
      for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i] * c;
    });
  }
  return y;
}

Tensor weighted_sum(Tape& tape, const Tensor& weights,
                    std::span<const Tensor> items) {
  require_vector(weights, "weighted_sum");
  if (items.empty() || weights.numel() != items.size()) {
    throw DimensionError("weighted_sum: " + std::to_string(weights.numel()) +
                         " weights for " + std::to_string(items.size()) +
                         " items");
  }
  const Shape& shape = items.front().shape();
  bool wants = weights.requires_grad();
  for (const Tensor& it : items) {
    require_same_shape(items.front(), it, "weighted_sum");
    wants = wants || it.requires_grad();
  }
  const auto wv = weights.values();
  std::vector<double> out(items.front().numel(), 0.0);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto v = items[i].values();
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += wv[i] * v[j];
  }
  Tensor y = make_result(tape, shape, std::move(out), wants);
  if (y.requires_grad()) {
    std::vector<Tensor> inputs;
    inputs.reserve(items.size() + 1);
    inputs.push_back(weights);
    inputs.insert(inputs.end(), items.begin(), items.end());
    tape.record(y, inputs, [inputs, y]() mutable {
      const auto dy = y.grad();
      Tensor& w = inputs.front();
      const auto wv = w.values();
      for (std::size_t i = 1; i < inputs.size(); ++i) {
        Tensor& item = inputs[i];
        if (w.requires_grad()) {
          const auto v = item.values();
          double acc = 0.0;
          for (std::size_t j = 0; j < dy.size(); ++j) acc += dy[j] * v[j];
          w.grad_buffer()[i - 1] += acc;
        }
        if (item.requires_grad()) {
          auto di = item.grad_buffer();
          for (std::size_t j = 0; j < dy.size(); ++j) {
            di[j] += wv[i - 1] * dy[j];
          }
        }
      }
    });
  }
  return y;
}

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

Tensor binary_cross_entropy(Tape& tape, const Tensor& prediction, int label) {
  if (prediction.numel() != 1) {
    throw DimensionError("binary_cross_entropy: prediction must be scalar, "
                         "got " + shape_to_string(prediction.shape()));
  }
  if (label != 0 && label != 1) {
    throw ArgumentError("binary_cross_entropy: label must be 0 or 1");
  }
  const double raw = prediction.values()[0];
  const double p = clamp_probability(raw);
  const double loss = label == 1 ? -std::log(p) : -std::log(1.0 - p);
  Tensor y = make_result(tape, {1}, {loss}, prediction.requires_grad());
  if (y.requires_grad()) {
    tape.record(y, {prediction}, [prediction, y, label, raw, p]() mutable {
      if (raw != p) return;  // flat inside the clamp region
      const double g = y.grad()[0];
      const double d = label == 1 ? -1.0 / p : 1.0 / (1.0 - p);
      prediction.grad_buffer()[0] += g * d;
    });
  }
  return y;
}

// ---------------------------------------------------------------------------
// Adagrad

void adagrad_step(Tensor& param, AdagradState& state) {
  if (!param.has_grad()) {
    throw StateError("adagrad_step: parameter of shape " +
                     shape_to_string(param.shape()) + " has no gradient");
  }
  if (state.accumulator.empty()) {
    state.accumulator.assign(param.numel(), 0.0);
  } else if (state.accumulator.size() != param.numel()) {
    throw StateError("adagrad_step: accumulator size does not match param");
  }
  const auto g = param.grad();
  auto p = param.mutable_values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (g[i] == 0.0) continue;
    state.accumulator[i] += g[i] * g[i];
    p[i] -= state.learning_rate * g[i] /
            (std::sqrt(state.accumulator[i]) + state.epsilon);
  }
  param.clear_grad();
}

}  // namespace minet
