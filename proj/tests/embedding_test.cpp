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
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "minet/embedding.hpp"
#include "minet/errors.hpp"
#include "minet/model.hpp"
#include "minet/training.hpp"
#include "support.hpp"

namespace minet {
namespace {

EmbeddingTable arange_table(std::size_t dim, std::size_t size) {
  std::vector<double> v(dim * size);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * static_cast<double>(i);
  return EmbeddingTable(Tensor::from({dim, size}, v, true));
}

std::vector<double> values_of(const Tensor& t) {
  return {t.values().begin(), t.values().end()};
}

TEST(EmbeddingTest, UniformInitStaysInRange) {
  Rng rng(1);
  const EmbeddingTable t = EmbeddingTable::uniform(10, 50, rng);
  EXPECT_EQ(t.dim(), 10u);
  EXPECT_EQ(t.size(), 50u);
  const double bound = 1.0 / std::sqrt(10.0);
  for (double x : t.matrix().values()) {
    EXPECT_LE(std::abs(x), bound);
  }
  EXPECT_TRUE(t.matrix().requires_grad());
}

TEST(EmbeddingTest, ColumnIsFeatureEmbedding) {
  const EmbeddingTable t = arange_table(2, 3);
  EXPECT_EQ(t.column(0), (std::vector<double>{0.0, 1.5}));
  EXPECT_EQ(t.column(2), (std::vector<double>{1.0, 2.5}));
  EXPECT_THROW(t.column(3), IndexError);
}

TEST(EmbeddingTest, LookupSingleId) {
  const EmbeddingTable t = arange_table(2, 3);
  Tape tape;
  const std::vector<FeatureId> ids = {0};
  EXPECT_EQ(values_of(lookup_concat(tape, t, ids)), t.column(0));
}

TEST(EmbeddingTest, RepeatedIdAccumulatesGradient) {
  EmbeddingTable t = arange_table(2, 3);
  Tape tape;
  const std::vector<FeatureId> ids = {1, 1};
  const Tensor out = lookup_concat(tape, t, ids);
  const std::vector<double> c1 = t.column(1);
  EXPECT_EQ(values_of(out), (std::vector<double>{c1[0], c1[1], c1[0], c1[1]}));
  tape.backward(sum(tape, out));
  const auto g = t.matrix().grad();
  for (std::size_t d = 0; d < 2; ++d) {
    EXPECT_EQ(g[d * 3 + 0], 0.0);
    EXPECT_EQ(g[d * 3 + 1], 2.0);
    EXPECT_EQ(g[d * 3 + 2], 0.0);
  }
}

TEST(EmbeddingTest, OutOfRangeIdThrows) {
  const EmbeddingTable t = arange_table(2, 3);
  Tape tape;
  const std::vector<FeatureId> ids = {5};
  EXPECT_THROW(lookup_concat(tape, t, ids), IndexError);
}

TEST(EmbeddingTest, MultiValuedFieldIsMeanPooled) {
  const EmbeddingTable t = arange_table(2, 4);
  Tape tape;
  const std::vector<FieldValue> fields = {{3}, {0, 1, 2}};
  const Tensor out = lookup_fields(tape, t, fields);
  const auto c0 = t.column(0), c1 = t.column(1), c2 = t.column(2),
             c3 = t.column(3);
  ASSERT_EQ(out.numel(), 4u);
  EXPECT_DOUBLE_EQ(out[0], c3[0]);
  EXPECT_DOUBLE_EQ(out[1], c3[1]);
  EXPECT_DOUBLE_EQ(out[2], (c0[0] + c1[0] + c2[0]) / 3.0);
  EXPECT_DOUBLE_EQ(out[3], (c0[1] + c1[1] + c2[1]) / 3.0);
}

TEST(EmbeddingTest, UserReprWidthIsDTimesFields) {
  const Schema schema = Schema::uniform(4, 1, 1);
  const ReprSpec spec = ReprSpec::from_schema(schema, 10);
  EXPECT_EQ(spec.user_dim(), 40u);
  Rng rng(2);
  const EmbeddingTable t = EmbeddingTable::uniform(10, 9, rng);
  const Instance inst =
      testing::random_instance(rng, schema, 9, Domain::target, 2, 2);
  Tape tape;
  EXPECT_EQ(build_reprs(tape, inst, t, spec).user.numel(), 40u);
}

TEST(EmbeddingTest, EmptySequencesStillProduceUserAndItem) {
  const Schema schema = testing::two_field_schema();
  const ReprSpec spec = ReprSpec::from_schema(schema, 3);
  Rng rng(3);
  const EmbeddingTable t = EmbeddingTable::uniform(3, 8, rng);
  Instance inst =
      testing::random_instance(rng, schema, 8, Domain::target, 0, 0);
  Tape tape;
  const Representations r = build_reprs(tape, inst, t, spec);
  EXPECT_TRUE(r.clicked_source.empty());
  EXPECT_TRUE(r.clicked_target.empty());
  EXPECT_EQ(r.user.numel(), spec.user_dim());
  EXPECT_EQ(r.item.numel(), spec.target_dim());
}

TEST(EmbeddingTest, SourceInstanceRoutesToSourceWidth) {
  const Schema schema = Schema::uniform(1, 3, 2);
  const ReprSpec spec = ReprSpec::from_schema(schema, 2);
  Rng rng(4);
  const EmbeddingTable t = EmbeddingTable::uniform(2, 8, rng);
  const Instance inst =
      testing::random_instance(rng, schema, 8, Domain::source, 2, 2);
  Tape tape;
  const Representations r = build_reprs(tape, inst, t, spec);
  EXPECT_EQ(r.domain, Domain::source);
  EXPECT_EQ(r.item.numel(), spec.source_dim());
}

TEST(EmbeddingTest, ReprsMatchHandAssembly) {
  const Schema schema = Schema::uniform(2, 1, 1);
  const ReprSpec spec = ReprSpec::from_schema(schema, 2);
  const EmbeddingTable t = arange_table(2, 6);
  Instance inst;
  inst.user = {{4}, {1}};
  inst.item = {{5}};
  inst.clicked_source = {{{2}}, {{3}}};
  inst.clicked_target = {{{0}}};
  Tape tape;
  const Representations r = build_reprs(tape, inst, t, spec);
  auto cat = [&](std::initializer_list<FeatureId> ids) {
    std::vector<double> out;
    for (FeatureId id : ids) {
      const auto c = t.column(id);
      out.insert(out.end(), c.begin(), c.end());
    }
    return out;
  };
  EXPECT_EQ(values_of(r.user), cat({4, 1}));
  EXPECT_EQ(values_of(r.item), cat({5}));
  ASSERT_EQ(r.clicked_source.size(), 2u);
  EXPECT_EQ(values_of(r.clicked_source[0]), cat({2}));
  EXPECT_EQ(values_of(r.clicked_source[1]), cat({3}));
  EXPECT_EQ(values_of(r.clicked_target[0]), cat({0}));
}

TEST(EmbeddingTest, MismatchedFieldCountsThrow) {
  const Schema schema = Schema::uniform(2, 1, 1);
  const ReprSpec spec = ReprSpec::from_schema(schema, 2);
  const EmbeddingTable t = arange_table(2, 6);
  Instance inst;
  inst.user = {{1}};
  inst.item = {{2}};
  Tape tape;
  EXPECT_THROW(build_reprs(tape, inst, t, spec), SchemaError);
}

TEST(EmbeddingTest, SharedUserSubvectorAcrossDomains) {
  const Schema schema = testing::two_field_schema();
  const ReprSpec spec = ReprSpec::from_schema(schema, 4);
  Rng rng(5);
  const EmbeddingTable t = EmbeddingTable::uniform(4, 20, rng);
  Instance target =
      testing::random_instance(rng, schema, 20, Domain::target, 3, 3);
  Instance source =
      testing::random_instance(rng, schema, 20, Domain::source, 3, 3);
  source.user = target.user;
  Tape tape;
  EXPECT_EQ(values_of(build_reprs(tape, target, t, spec).user),
            values_of(build_reprs(tape, source, t, spec).user));
}

TEST(EmbeddingTest, GradientTouchesOnlyPresentFeatures) {
  const Schema schema = testing::two_field_schema();
  MiNetConfig mc;
  mc.embedding_dim = 3;
  mc.attention_dim = 5;
  mc.transfer_rank = 2;
  mc.fc_dims = {6};
  const std::size_t vocab = 40;
  Model model(mc, ReprSpec::from_schema(schema, 3), vocab, 3);
  Rng rng(6);
  const Instance inst =
      testing::random_instance(rng, schema, vocab, Domain::target, 3, 2, false);
  std::set<FeatureId> present;
  auto collect = [&](const ItemFeatures& item) {
    for (const FieldValue& f : item) present.insert(f.begin(), f.end());
  };
  collect(inst.user);
  collect(inst.item);
  for (const auto& s : inst.clicked_source) collect(s);
  for (const auto& s : inst.clicked_target) collect(s);

  Tape tape;
  tape.backward(
      binary_cross_entropy(tape, model.forward(tape, inst), inst.label));
  const auto g = model.params().embedding.matrix().grad();
  std::size_t nonzero_present = 0;
  for (std::size_t d = 0; d < 3; ++d) {
    for (std::size_t i = 0; i < vocab; ++i) {
      const double x = g[d * vocab + i];
      if (!present.count(static_cast<FeatureId>(i))) {
        EXPECT_EQ(x, 0.0) << "feature " << i;
      } else if (x != 0.0) {
        ++nonzero_present;
      }
    }
  }
  EXPECT_GT(nonzero_present, 0u);
}

}  // namespace
}  // namespace minet
