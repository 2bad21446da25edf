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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "minet/errors.hpp"
#include "minet/random.hpp"
#include "minet/tensor.hpp"
#include "support.hpp"

namespace minet {
namespace {

std::vector<double> random_values(Rng& rng, std::size_t n, double lo = -1.0,
                                  double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

std::vector<double> to_vector(std::span<const double> s) {
  return {s.begin(), s.end()};
}

double max_op_error(std::vector<NamedTensor> inputs,
                    const std::function<Tensor(Tape&)>& loss) {
  return testing::check_gradients(inputs, loss, 1e-5, 1e-8).max_relative_error;
}

TEST(TensorTest, FromRejectsInconsistentShapes) {
  EXPECT_THROW(Tensor::from({2, 2}, {1, 2, 3}), DimensionError);
  EXPECT_THROW(Tensor::from({}, {}), DimensionError);
  EXPECT_THROW(Tensor::from({0}, {}), DimensionError);
  const Tensor t = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(t.numel(), 6u);
  EXPECT_FALSE(t.has_grad());
  EXPECT_THROW(t.grad(), StateError);
}

TEST(TensorTest, MatmulIdentity) {
  Tape tape;
  const Tensor eye = Tensor::from({2, 2}, {1, 0, 0, 1});
  const Tensor m = Tensor::from({2, 2}, {1, 2, 3, 4});
  const Tensor out = matmul(tape, eye, m);
  EXPECT_EQ(out.shape(), (Shape{2, 2}));
  EXPECT_EQ(to_vector(out.values()), (std::vector<double>{1, 2, 3, 4}));
}

TEST(TensorTest, MatmulRowTimesColumn) {
  Tape tape;
  const Tensor out = matmul(tape, Tensor::from({1, 2}, {1, 2}),
                            Tensor::from({2, 1}, {3, 4}));
  EXPECT_EQ(out.shape(), (Shape{1, 1}));
  EXPECT_DOUBLE_EQ(out[0], 11.0);
}

TEST(TensorTest, MatmulShapeMismatchThrows) {
  Tape tape;
  EXPECT_THROW(matmul(tape, Tensor::zeros({2, 3}), Tensor::zeros({2, 3})),
               DimensionError);
}

TEST(TensorTest, MatmulGradientMatchesFiniteDifferences) {
  Rng rng(1);
  Tensor a = Tensor::from({3, 4}, random_values(rng, 12), true);
  Tensor b = Tensor::from({4, 2}, random_values(rng, 8), true);
  const double err = max_op_error(
      {{"a", a}, {"b", b}},
      [&](Tape& t) { return sum(t, matmul(t, a, b)); });
  EXPECT_LT(err, 1e-6);
}

TEST(TensorTest, MatrixVectorGradient) {
  Rng rng(2);
  Tensor a = Tensor::from({3, 4}, random_values(rng, 12), true);
  Tensor x = Tensor::vector(random_values(rng, 4), true);
  const Tensor w = Tensor::vector(random_values(rng, 3));
  const double err = max_op_error(
      {{"a", a}, {"x", x}}, [&](Tape& t) { return dot(t, matmul(t, a, x), w); });
  EXPECT_LT(err, 1e-6);
}

TEST(TensorTest, ElementwiseBasics) {
  Tape tape;
  EXPECT_EQ(to_vector(mul(tape, Tensor::vector({1, 2, 3}),
                          Tensor::vector({0, 0, 0}))
                          .values()),
            (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(to_vector(
                add(tape, Tensor::vector({1, 2}), Tensor::vector({3, 4}))
                    .values()),
            (std::vector<double>{4, 6}));
  EXPECT_THROW(add(tape, Tensor::vector({1, 2}), Tensor::vector({1})),
               DimensionError);
}

TEST(TensorTest, MulGradientMatchesFiniteDifferences) {
  Rng rng(3);
  Tensor a = Tensor::vector(random_values(rng, 8), true);
  Tensor b = Tensor::vector(random_values(rng, 8), true);
  const Tensor w = Tensor::vector(random_values(rng, 8));
  const double err = max_op_error(
      {{"a", a}, {"b", b}}, [&](Tape& t) { return dot(t, mul(t, a, b), w); });
  EXPECT_LT(err, 1e-6);
}

TEST(TensorTest, ActivationValues) {
  Tape tape;
  EXPECT_EQ(to_vector(relu(tape, Tensor::vector({-1, 0, 2})).values()),
            (std::vector<double>{0, 0, 2}));
  EXPECT_DOUBLE_EQ(sigmoid(tape, Tensor::vector({0})).item(), 0.5);
  EXPECT_DOUBLE_EQ(
      activation(tape, Tensor::vector({1}), Activation::exp).item(),
      std::exp(1.0));
}

TEST(TensorTest, ReluSubgradientAtZeroIsZero) {
  Tape tape;
  Tensor x = Tensor::vector({0.0, 1.0, -1.0}, true);
  tape.backward(sum(tape, relu(tape, x)));
  EXPECT_EQ(to_vector(x.grad()), (std::vector<double>{0, 1, 0}));
}

TEST(TensorTest, ActivationGradientsMatchFiniteDifferences) {
  Rng rng(4);
  for (Activation kind :
       {Activation::exp, Activation::sigmoid, Activation::relu}) {
    // Keep relu inputs away from the kink.
    std::vector<double> v = random_values(rng, 6, -2.0, 2.0);
    if (kind == Activation::relu) {
      for (double& x : v) x += x >= 0 ? 0.1 : -0.1;
    }
    Tensor x = Tensor::vector(v, true);
    const Tensor w = Tensor::vector(random_values(rng, 6));
    const double err = max_op_error(
        {{"x", x}}, [&](Tape& t) { return dot(t, activation(t, x, kind), w); });
    EXPECT_LT(err, 1e-6) << static_cast<int>(kind);
  }
}

TEST(TensorTest, SoftmaxOfConstantIsUniform) {
  Tape tape;
  for (double c : {-3.0, 0.0, 7.5}) {
    const Tensor p = softmax_weights(tape, Tensor::vector({c, c, c}));
    for (double x : p.values()) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
  }
}

TEST(TensorTest, SoftmaxDoesNotOverflow) {
  Tape tape;
  const Tensor p = softmax_weights(tape, Tensor::vector({1000, 0}));
  EXPECT_TRUE(std::isfinite(p[0]));
  EXPECT_NEAR(p[0], 1.0, 1e-12);
  EXPECT_NEAR(p[1], 0.0, 1e-12);
}

TEST(TensorTest, SoftmaxMatchesDirectFormula) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> s = random_values(rng, 5, -3.0, 3.0);
    Tape tape;
    const Tensor p = softmax_weights(tape, Tensor::vector(s));
    double z = 0.0;
    for (double x : s) z += std::exp(x);
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_NEAR(p[i], std::exp(s[i]) / z, 1e-12);
      EXPECT_GT(p[i], 0.0);
      EXPECT_LE(p[i], 1.0);
      total += p[i];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(TensorTest, SoftmaxShiftInvariance) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s = random_values(rng, 1 + rng.below(8), -5.0, 5.0);
    const double shift = rng.uniform(-50.0, 50.0);
    std::vector<double> shifted = s;
    for (double& x : shifted) x += shift;
    Tape tape;
    const Tensor a = softmax_weights(tape, Tensor::vector(s));
    const Tensor b = softmax_weights(tape, Tensor::vector(shifted));
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_NEAR(a[i], b[i], 1e-12);
    }
  }
}

TEST(TensorTest, SoftmaxGradientMatchesFiniteDifferences) {
  Rng rng(7);
  Tensor s = Tensor::vector(random_values(rng, 5, -2.0, 2.0), true);
  const Tensor w = Tensor::vector(random_values(rng, 5));
  const double err = max_op_error(
      {{"s", s}}, [&](Tape& t) { return dot(t, softmax_weights(t, s), w); });
  EXPECT_LT(err, 1e-6);
}

TEST(TensorTest, ConcatValues) {
  Tape tape;
  EXPECT_EQ(to_vector(concat(tape, {Tensor::vector({1, 2}),
                                    Tensor::vector({3})})
                          .values()),
            (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(to_vector(concat(tape, {Tensor::vector({4, 5})}).values()),
            (std::vector<double>{4, 5}));
  EXPECT_THROW(concat(tape, std::span<const Tensor>{}), ArgumentError);
}

TEST(TensorTest, ConcatRoutesGradientToParts) {
  Tape tape;
  Tensor a = Tensor::vector({1, 2}, true);
  Tensor b = Tensor::vector({3}, true);
  tape.backward(sum(tape, concat(tape, {a, b})));
  EXPECT_EQ(to_vector(a.grad()), (std::vector<double>{1, 1}));
  EXPECT_EQ(to_vector(b.grad()), (std::vector<double>{1}));

  Rng rng(8);
  Tensor c = Tensor::vector(random_values(rng, 3), true);
  Tensor d = Tensor::vector(random_values(rng, 4), true);
  const Tensor w = Tensor::vector(random_values(rng, 7));
  EXPECT_LT(max_op_error({{"c", c}, {"d", d}},
                         [&](Tape& t) { return dot(t, concat(t, {c, d}), w); }),
            1e-6);
}

TEST(TensorTest, ScaleAndWeightedSumGradients) {
  Rng rng(9);
  Tensor x = Tensor::vector(random_values(rng, 4), true);
  Tensor s = Tensor::vector({0.7}, true);
  Tensor w = Tensor::vector(random_values(rng, 3), true);
  std::vector<Tensor> items;
  for (int i = 0; i < 3; ++i) {
    items.push_back(Tensor::vector(random_values(rng, 4), true));
  }
  const Tensor probe = Tensor::vector(random_values(rng, 4));
  std::vector<NamedTensor> inputs = {{"x", x}, {"s", s}, {"w", w}};
  for (int i = 0; i < 3; ++i) inputs.emplace_back("item", items[i]);
  const double err = max_op_error(inputs, [&](Tape& t) {
    Tensor a = scale(t, x, s);
    Tensor b = weighted_sum(t, w, items);
    return dot(t, add(t, a, scale(t, b, -1.5)), probe);
  });
  EXPECT_LT(err, 1e-6);
}

TEST(TensorTest, BackwardOfSumIsOnes) {
  Tape tape;
  Tensor x = Tensor::vector({1, 2, 3, 4}, true);
  tape.backward(sum(tape, x));
  EXPECT_EQ(to_vector(x.grad()), (std::vector<double>{1, 1, 1, 1}));
}

TEST(TensorTest, BackwardAccumulatesReuse) {
  Tape tape;
  Tensor x = Tensor::vector({1, 2, 3}, true);
  tape.backward(sum(tape, add(tape, x, x)));
  EXPECT_EQ(to_vector(x.grad()), (std::vector<double>{2, 2, 2}));
}

TEST(TensorTest, ReplayingTapeDoublesGradients) {
  Rng rng(10);
  Tensor a = Tensor::from({2, 3}, random_values(rng, 6), true);
  Tensor x = Tensor::vector(random_values(rng, 3), true);
  Tape tape;
  const Tensor loss = sum(tape, activation(tape, matmul(tape, a, x),
                                           Activation::sigmoid));
  tape.backward(loss);
  const auto ga = to_vector(a.grad());
  const auto gx = to_vector(x.grad());
  tape.backward(loss);
  for (std::size_t i = 0; i < ga.size(); ++i) {
    EXPECT_EQ(a.grad()[i], 2.0 * ga[i]);
  }
  for (std::size_t i = 0; i < gx.size(); ++i) {
    EXPECT_EQ(x.grad()[i], 2.0 * gx[i]);
  }
}

TEST(TensorTest, BackwardRejectsNonScalarAndConstantLoss) {
  Tape tape;
  Tensor x = Tensor::vector({1, 2}, true);
  EXPECT_THROW(tape.backward(add(tape, x, x)), ArgumentError);
  EXPECT_THROW(tape.backward(sum(tape, Tensor::vector({1, 2}))), StateError);
}

TEST(TensorTest, InferenceTapeRecordsNothing) {
  Tape tape(false);
  Tensor x = Tensor::vector({1, 2}, true);
  const Tensor y = sum(tape, x);
  EXPECT_DOUBLE_EQ(y.item(), 3.0);
  EXPECT_FALSE(y.requires_grad());
}

TEST(TensorTest, BinaryCrossEntropyValuesAndClamp) {
  Tape tape;
  EXPECT_NEAR(binary_cross_entropy(tape, Tensor::scalar(0.5), 1).item(),
              std::log(2.0), 1e-15);
  const double top = 1.0 - 1e-12;
  EXPECT_DOUBLE_EQ(binary_cross_entropy(tape, Tensor::scalar(1.0), 1).item(),
                   -std::log(top));
  EXPECT_DOUBLE_EQ(binary_cross_entropy(tape, Tensor::scalar(1.0), 0).item(),
                   -std::log(1.0 - top));
  EXPECT_DOUBLE_EQ(binary_cross_entropy(tape, Tensor::scalar(0.0), 0).item(),
                   -std::log(top));
  Tensor saturated = Tensor::scalar(1.0, true);
  tape.backward(binary_cross_entropy(tape, saturated, 0));
  EXPECT_FALSE(saturated.has_grad());
  EXPECT_THROW(binary_cross_entropy(tape, Tensor::scalar(0.5), 2),
               ArgumentError);
}

TEST(TensorTest, BinaryCrossEntropyGradient) {
  for (int label : {0, 1}) {
    Tensor p = Tensor::scalar(0.3, true);
    const double err = max_op_error(
        {{"p", p}}, [&](Tape& t) { return binary_cross_entropy(t, p, label); });
    EXPECT_LT(err, 1e-6);
  }
}

TEST(AdagradTest, ZeroGradientLeavesEverythingUnchanged) {
  Tensor p = Tensor::vector({1.0, -2.0}, true);
  p.grad_buffer();
  AdagradState state;
  adagrad_step(p, state);
  EXPECT_EQ(to_vector(p.values()), (std::vector<double>{1.0, -2.0}));
  EXPECT_EQ(state.accumulator, (std::vector<double>{0.0, 0.0}));
}

TEST(AdagradTest, HandArithmetic) {
  Tensor p = Tensor::scalar(1.0, true);
  p.grad_buffer()[0] = 2.0;
  AdagradState state;
  state.learning_rate = 0.1;
  state.epsilon = 0.0;
  adagrad_step(p, state);
  EXPECT_DOUBLE_EQ(state.accumulator[0], 4.0);
  EXPECT_DOUBLE_EQ(p.item(), 0.9);
}

TEST(AdagradTest, SecondIdenticalStepIsSmaller) {
  Tensor p = Tensor::scalar(1.0, true);
  AdagradState state;
  p.grad_buffer()[0] = 0.5;
  adagrad_step(p, state);
  const double d1 = 1.0 - p.item();
  const double before = p.item();
  p.grad_buffer()[0] = 0.5;
  adagrad_step(p, state);
  const double d2 = before - p.item();
  EXPECT_LT(std::abs(d2), std::abs(d1));
}

TEST(AdagradTest, AccumulatorIsMonotone) {
  Rng rng(11);
  Tensor p = Tensor::vector(random_values(rng, 5), true);
  AdagradState state;
  std::vector<double> last(5, 0.0);
  for (int step = 0; step < 20; ++step) {
    auto g = p.grad_buffer();
    for (double& x : g) x = rng.below(3) == 0 ? 0.0 : rng.uniform(-1, 1);
    adagrad_step(p, state);
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_GE(state.accumulator[i], last[i]);
      EXPECT_GE(state.accumulator[i], 0.0);
      last[i] = state.accumulator[i];
    }
  }
}

TEST(AdagradTest, MissingGradientThrows) {
  Tensor p = Tensor::scalar(1.0, true);
  AdagradState state;
  EXPECT_THROW(adagrad_step(p, state), StateError);
}

}  // namespace
}  // namespace minet
