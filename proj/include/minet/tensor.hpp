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
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace minet {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

// Dense row-major array of doubles with an optional gradient buffer.
//
// Tensor is a shared handle: copies alias the same storage, the way a
// parameter handed to several ops must be a single node of the graph. Values
// are treated as immutable once a tensor has been consumed by a recorded op.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor vector(std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const;
  std::size_t numel() const;
  std::size_t rank() const { return shape().size(); }

  std::span<const double> values() const;
  std::span<double> mutable_values();
  double item() const;
  double operator[](std::size_t i) const { return values()[i]; }

  bool requires_grad() const;
  void set_requires_grad(bool on);

  bool has_grad() const;
  std::span<const double> grad() const;
  // Allocates a zero gradient on first use.
  std::span<double> grad_buffer() const;
  void clear_grad();

  // Stable identity of the underlying storage.
  const void* id() const { return impl_.get(); }

  Tensor clone() const;

 private:
  struct Impl {
    Shape shape;
    std::vector<double> values;
    std::vector<double> grad;
    bool has_grad = false;
    bool requires_grad = false;
  };
  std::shared_ptr<Impl> impl_;

  friend class Tape;
};

// Ordered record of differentiable operations for one forward pass.
//
// A tape built with recording disabled is an inference context: ops still
// compute values but no nodes or gradients are kept, so read-only parameters
// can be shared across threads.
class Tape {
 public:
  explicit Tape(bool recording = true) : recording_(recording) {}

  bool recording() const { return recording_; }
  std::size_t size() const { return nodes_.size(); }

  // Records `output` as produced from `inputs`. `backward` reads the output
  // gradient and accumulates into the inputs' gradient buffers.
  void record(const Tensor& output, std::vector<Tensor> inputs,
              std::function<void()> backward);

  // Reverse sweep from a scalar loss. Intermediate gradients are recomputed
  // from scratch on every call; leaf gradients accumulate across calls.
  void backward(const Tensor& loss);

  static bool wants_grad(std::initializer_list<const Tensor*> inputs);

 private:
  struct Node {
    Tensor output;
    std::vector<Tensor> inputs;
    std::function<void()> backward;
  };
  bool recording_;
  std::vector<Node> nodes_;
};

enum class Activation { relu, sigmoid, exp };

// a: [m,k], b: [k,n] -> [m,n]; a: [m,k], b: [k] -> [m].
Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);

enum class ElementwiseOp { add, mul };
Tensor elementwise(Tape& tape, const Tensor& a, const Tensor& b,
                   ElementwiseOp op);
inline Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
  return elementwise(tape, a, b, ElementwiseOp::add);
}
inline Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
  return elementwise(tape, a, b, ElementwiseOp::mul);
}

Tensor activation(Tape& tape, const Tensor& x, Activation kind);
inline Tensor relu(Tape& tape, const Tensor& x) {
  return activation(tape, x, Activation::relu);
}
inline Tensor sigmoid(Tape& tape, const Tensor& x) {
  return activation(tape, x, Activation::sigmoid);
}

// Numerically stable softmax of a score vector.
Tensor softmax_weights(Tape& tape, const Tensor& scores);

Tensor concat(Tape& tape, std::span<const Tensor> parts);
inline Tensor concat(Tape& tape, std::initializer_list<Tensor> parts) {
  return concat(tape, std::span<const Tensor>(parts.begin(), parts.size()));
}

Tensor sum(Tape& tape, const Tensor& x);
Tensor dot(Tape& tape, const Tensor& a, const Tensor& b);

// x * s where s is a one-element tensor.
Tensor scale(Tape& tape, const Tensor& x, const Tensor& s);
Tensor scale(Tape& tape, const Tensor& x, double c);

// sum_i weights[i] * items[i]; weights has one entry per item.
Tensor weighted_sum(Tape& tape, const Tensor& weights,
                    std::span<const Tensor> items);

// Per-instance cross entropy; prediction clamped to [1e-12, 1 - 1e-12].
inline constexpr double kProbabilityClamp = 1e-12;
Tensor binary_cross_entropy(Tape& tape, const Tensor& prediction, int label);

double clamp_probability(double p);

struct AdagradState {
  std::vector<double> accumulator;
  double learning_rate = 0.05;
  double epsilon = 1e-8;
};

// accumulator += g^2; param -= lr * g / (sqrt(accumulator) + eps); clears g.
void adagrad_step(Tensor& param, AdagradState& state);

}  // namespace minet
