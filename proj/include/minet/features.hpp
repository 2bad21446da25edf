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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace minet {

enum class Domain { source, target };
enum class FieldGroup { user, source, target };
enum class FieldKind { single_valued, multi_valued };

std::string_view to_string(Domain d);
std::string_view to_string(FieldGroup g);
std::string_view to_string(FieldKind k);
Domain parse_domain(std::string_view s);

struct FieldSchema {
  FieldGroup group;
  std::string name;
  FieldKind kind = FieldKind::single_valued;
};

// Ordered field layout for the user, source-item and target-item groups.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<FieldSchema> fields);

  // Convenience layout with generic names and single-valued fields.
  static Schema uniform(std::size_t user_fields, std::size_t source_fields,
                        std::size_t target_fields);

  const std::vector<FieldSchema>& fields() const { return fields_; }
  std::size_t field_count(FieldGroup group) const;
  std::size_t item_field_count(Domain domain) const {
    return field_count(domain == Domain::source ? FieldGroup::source
                                                : FieldGroup::target);
  }

  // One `group<TAB>name<TAB>kind` line per field.
  void write(std::ostream& out) const;
  static Schema read(std::istream& in);

  bool operator==(const Schema&) const = default;

 private:
  std::vector<FieldSchema> fields_;
};

inline bool operator==(const FieldSchema& a, const FieldSchema& b) {
  return a.group == b.group && a.name == b.name && a.kind == b.kind;
}

using FeatureId = std::uint32_t;
// Members of one field; a single-valued field has exactly one.
using FieldValue = std::vector<FeatureId>;
// One entry per field, in schema order.
using ItemFeatures = std::vector<FieldValue>;

// Dense feature ids shared by every field of both domains. Id 0 is reserved
// for features never seen while building the vocabulary.
class Vocabulary {
 public:
  static constexpr FeatureId kUnknown = 0;
  static constexpr std::string_view kUnknownToken = "<unk>";

  Vocabulary();

  // Returns the id of `feature`, registering it if new.
  FeatureId intern(std::string_view feature);
  // Returns the id of `feature`, or kUnknown.
  FeatureId encode(std::string_view feature) const;
  const std::string& decode(FeatureId id) const;
  bool contains(std::string_view feature) const;

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  static Vocabulary from_tokens(std::vector<std::string> tokens);

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, FeatureId> ids_;
};

struct Instance {
  Domain domain = Domain::target;
  int label = 0;
  ItemFeatures user;
  // The impression being scored: target ad, or target news for the source
  // domain.
  ItemFeatures item;
  // Behavior sequences, oldest first.
  std::vector<ItemFeatures> clicked_source;
  std::vector<ItemFeatures> clicked_target;
};

struct Dataset {
  Schema schema;
  Vocabulary vocabulary;
  std::vector<Instance> source_instances;
  std::vector<Instance> target_instances;
};

// One parsed line of the instance file, before id assignment.
struct RawRecord {
  using RawItem = std::vector<std::vector<std::string>>;
  Domain domain = Domain::target;
  int label = 0;
  RawItem user;
  RawItem item;
  std::vector<RawItem> clicked_source;
  std::vector<RawItem> clicked_target;
};

// Parses one tab-separated instance line. `line_number` is 1-based and is
// quoted in error messages.
RawRecord parse_record(std::string_view line, std::size_t line_number);
std::vector<RawRecord> read_records(std::istream& in);

void write_record(std::ostream& out, const RawRecord& record);

// Registers every feature in first-seen order (user, item, source sequence,
// target sequence, left to right).
Vocabulary build_vocabulary(std::istream& records);
Vocabulary build_vocabulary(const std::vector<RawRecord>& records);

struct LoadOptions {
  std::size_t max_source_seq = 25;
  std::size_t max_target_seq = 5;
};

Instance encode_record(const RawRecord& record, const Schema& schema,
                       const Vocabulary& vocabulary, const LoadOptions& options,
                       std::size_t line_number);
RawRecord decode_instance(const Instance& instance,
                          const Vocabulary& vocabulary);

Dataset read_dataset(std::istream& in, const Schema& schema,
                     const Vocabulary& vocabulary,
                     const LoadOptions& options = {});
Dataset load_dataset(const std::filesystem::path& path, const Schema& schema,
                     const Vocabulary& vocabulary,
                     const LoadOptions& options = {});

Schema load_schema(const std::filesystem::path& path);
void save_schema(const std::filesystem::path& path, const Schema& schema);

// Checks the Dataset invariants; throws SchemaError on the first violation.
void validate_instance(const Instance& instance, const Schema& schema,
                       std::size_t vocabulary_size,
                       const LoadOptions& options);
void validate_dataset(const Dataset& dataset, const LoadOptions& options);

}  // namespace minet
