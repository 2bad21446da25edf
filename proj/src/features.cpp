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

#include "minet/features.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "minet/errors.hpp"

namespace minet {

std::string_view to_string(Domain d) {
  return d == Domain::source ? "source" : "target";
}

std::string_view to_string(FieldGroup g) {
  switch (g) {
    case FieldGroup::user:
      return "user";
    case FieldGroup::source:
      return "source";
    case FieldGroup::target:
      return "target";
  }
  return "?";
}

std::string_view to_string(FieldKind k) {
  return k == FieldKind::single_valued ? "single" : "multi";
}

Domain parse_domain(std::string_view s) {
  if (s == "source") return Domain::source;
  if (s == "target") return Domain::target;
  throw ParseError("unknown domain '" + std::string(s) + "'");
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

FieldGroup parse_group(std::string_view s) {
  if (s == "user") return FieldGroup::user;
  if (s == "source") return FieldGroup::source;
  if (s == "target") return FieldGroup::target;
  throw ParseError("unknown field group '" + std::string(s) + "'");
}

FieldKind parse_kind(std::string_view s) {
  if (s == "single") return FieldKind::single_valued;
  if (s == "multi") return FieldKind::multi_valued;
  throw ParseError("unknown field kind '" + std::string(s) + "'");
}

[[noreturn]] void fail(std::size_t line_number, const std::string& what) {
  throw ParseError("line " + std::to_string(line_number) + ": " + what);
}

RawRecord::RawItem parse_item(std::string_view text) {
  RawRecord::RawItem item;
  for (std::string_view field : split(text, ',')) {
    std::vector<std::string> members;
    if (!field.empty()) {
      for (std::string_view m : split(field, ';')) members.emplace_back(m);
    }
    item.push_back(std::move(members));
  }
  return item;
}

std::vector<RawRecord::RawItem> parse_sequence(std::string_view text,
                                               std::string_view prefix,
                                               std::size_t line_number) {
  if (text.substr(0, prefix.size()) != prefix) {
    fail(line_number, "expected sequence column starting with '" +
                          std::string(prefix) + "'");
  }
  text.remove_prefix(prefix.size());
  std::vector<RawRecord::RawItem> items;
  if (text.empty()) return items;
  for (std::string_view item : split(text, '|')) {
    items.push_back(parse_item(item));
  }
  return items;
}

void write_item(std::ostream& out, const RawRecord::RawItem& item) {
  for (std::size_t f = 0; f < item.size(); ++f) {
    if (f) out << ',';
    for (std::size_t m = 0; m < item[f].size(); ++m) {
      if (m) out << ';';
      out << item[f][m];
    }
  }
}

void write_sequence(std::ostream& out, std::string_view prefix,
                    const std::vector<RawRecord::RawItem>& items) {
  out << prefix;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out << '|';
    write_item(out, items[i]);
  }
}

void intern_item(Vocabulary& vocab, const RawRecord::RawItem& item) {
  for (const auto& field : item) {
    for (const auto& member : field) {
      if (!member.empty()) vocab.intern(member);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Schema

Schema::Schema(std::vector<FieldSchema> fields) : fields_(std::move(fields)) {
  std::set<std::pair<FieldGroup, std::string>> seen;
  for (const FieldSchema& f : fields_) {
    if (f.name.empty()) throw SchemaError("field name must be non-empty");
    if (!seen.emplace(f.group, f.name).second) {
      throw SchemaError("duplicate field '" + f.name + "' in group " +
                        std::string(to_string(f.group)));
    }
  }
}

Schema Schema::uniform(std::size_t user_fields, std::size_t source_fields,
                       std::size_t target_fields) {
  std::vector<FieldSchema> fields;
  auto add = [&](FieldGroup g, std::size_t n, const char* stem) {
    for (std::size_t i = 0; i < n; ++i) {
      fields.push_back({g, std::string(stem) + std::to_string(i),
                        FieldKind::single_valued});
    }
  };
  add(FieldGroup::user, user_fields, "user_f");
  add(FieldGroup::source, source_fields, "source_f");
  add(FieldGroup::target, target_fields, "target_f");
  return Schema(std::move(fields));
}

std::size_t Schema::field_count(FieldGroup group) const {
  std::size_t n = 0;
  for (const FieldSchema& f : fields_) n += f.group == group;
  return n;
}

void Schema::write(std::ostream& out) const {
  for (const FieldSchema& f : fields_) {
    out << to_string(f.group) << '\t' << f.name << '\t' << to_string(f.kind)
        << '\n';
  }
}

Schema Schema::read(std::istream& in) {
  std::vector<FieldSchema> fields;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 3) fail(line_number, "schema line needs 3 columns");
    try {
      fields.push_back(
          {parse_group(cols[0]), std::string(cols[1]), parse_kind(cols[2])});
    } catch (const ParseError& e) {
      fail(line_number, e.what());
    }
  }
  return Schema(std::move(fields));
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file " + path.string());
  return Schema::read(in);
}

void save_schema(const std::filesystem::path& path, const Schema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write schema file " + path.string());
  schema.write(out);
  if (!out) throw IoError("failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() { intern(kUnknownToken); }

FeatureId Vocabulary::intern(std::string_view feature) {
  auto it = ids_.find(std::string(feature));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<FeatureId>(tokens_.size());
  tokens_.emplace_back(feature);
  ids_.emplace(tokens_.back(), id);
  return id;
}

FeatureId Vocabulary::encode(std::string_view feature) const {
  auto it = ids_.find(std::string(feature));
  return it == ids_.end() ? kUnknown : it->second;
}

const std::string& Vocabulary::decode(FeatureId id) const {
  if (id >= tokens_.size()) {
    throw IndexError("feature id " + std::to_string(id) +
                     " outside vocabulary of size " +
                     std::to_string(tokens_.size()));
  }
  return tokens_[id];
}

bool Vocabulary::contains(std::string_view feature) const {
  return ids_.count(std::string(feature)) > 0;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.empty() || tokens.front() != kUnknownToken) {
    throw ArgumentError("vocabulary tokens must start with the unknown token");
  }
  Vocabulary v;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (v.intern(tokens[i]) != i) {
      throw ArgumentError("duplicate vocabulary token '" + tokens[i] + "'");
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Records

RawRecord parse_record(std::string_view line, std::size_t line_number) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto cols = split(line, '\t');
  if (cols.size() != 6) {
    fail(line_number, "expected 6 tab-separated columns, got " +
                          std::to_string(cols.size()));
  }
  RawRecord r;
  try {
    r.domain = parse_domain(cols[0]);
  } catch (const ParseError& e) {
    fail(line_number, e.what());
  }
  if (cols[1] == "0") {
    r.label = 0;
  } else if (cols[1] == "1") {
    r.label = 1;
  } else {
    fail(line_number, "label must be 0 or 1, got '" + std::string(cols[1]) +
                          "'");
  }
  r.user = parse_item(cols[2]);
  r.item = parse_item(cols[3]);
  r.clicked_source = parse_sequence(cols[4], "seq_src:", line_number);
  r.clicked_target = parse_sequence(cols[5], "seq_tgt:", line_number);
  return r;
}

std::vector<RawRecord> read_records(std::istream& in) {
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    records.push_back(parse_record(line, line_number));
  }
  return records;
}

void write_record(std::ostream& out, const RawRecord& r) {
  out << to_string(r.domain) << '\t' << r.label << '\t';
  write_item(out, r.user);
  out << '\t';
  write_item(out, r.item);
  out << '\t';
  write_sequence(out, "seq_src:", r.clicked_source);
  out << '\t';
  write_sequence(out, "seq_tgt:", r.clicked_target);
  out << '\n';
}

Vocabulary build_vocabulary(const std::vector<RawRecord>& records) {
  Vocabulary vocab;
  for (const RawRecord& r : records) {
    intern_item(vocab, r.user);
    intern_item(vocab, r.item);
    for (const auto& item : r.clicked_source) intern_item(vocab, item);
    for (const auto& item : r.clicked_target) intern_item(vocab, item);
  }
  return vocab;
}

Vocabulary build_vocabulary(std::istream& records) {
  return build_vocabulary(read_records(records));
}

namespace {

ItemFeatures encode_item(const RawRecord::RawItem& item,
                         FieldGroup group, const Schema& schema,
                         const Vocabulary& vocab, std::size_t line_number,
                         const char* what) {
  std::vector<const FieldSchema*> layout;
  for (const FieldSchema& f : schema.fields()) {
    if (f.group == group) layout.push_back(&f);
  }
  if (item.size() != layout.size()) {
    fail(line_number, std::string(what) + " has " +
                          std::to_string(item.size()) + " fields, schema has " +
                          std::to_string(layout.size()));
  }
  ItemFeatures out;
  out.reserve(item.size());
  for (std::size_t f = 0; f < item.size(); ++f) {
    if (layout[f]->kind == FieldKind::single_valued && item[f].size() > 1) {
      fail(line_number, "single-valued field '" + layout[f]->name +
                            "' has " + std::to_string(item[f].size()) +
                            " values");
    }
    FieldValue ids;
    for (const auto& member : item[f]) ids.push_back(vocab.encode(member));
    if (ids.empty()) ids.push_back(Vocabulary::kUnknown);
    out.push_back(std::move(ids));
  }
  return out;
}

FieldGroup item_group(Domain d) {
  return d == Domain::source ? FieldGroup::source : FieldGroup::target;
}

}  // namespace

Instance encode_record(const RawRecord& r, const Schema& schema,
                       const Vocabulary& vocab, const LoadOptions& options,
                       std::size_t line_number) {
  Instance inst;
  inst.domain = r.domain;
  inst.label = r.label;
  inst.user = encode_item(r.user, FieldGroup::user, schema, vocab,
                          line_number, "user");
  inst.item = encode_item(r.item, item_group(r.domain), schema, vocab,
                          line_number, "item");
  auto encode_seq = [&](const std::vector<RawRecord::RawItem>& seq,
                        FieldGroup group, std::size_t max_len,
                        const char* what) {
    // Most recent items are at the end.
    const std::size_t skip = seq.size() > max_len ? seq.size() - max_len : 0;
    std::vector<ItemFeatures> out;
    out.reserve(seq.size() - skip);
    for (std::size_t i = skip; i < seq.size(); ++i) {
      out.push_back(
          encode_item(seq[i], group, schema, vocab, line_number, what));
    }
    return out;
  };
  inst.clicked_source = encode_seq(r.clicked_source, FieldGroup::source,
                                   options.max_source_seq, "clicked source item");
  inst.clicked_target = encode_seq(r.clicked_target, FieldGroup::target,
                                   options.max_target_seq, "clicked target item");
  return inst;
}

RawRecord decode_instance(const Instance& inst, const Vocabulary& vocab) {
  auto decode_item = [&](const ItemFeatures& item) {
    RawRecord::RawItem out;
    for (const FieldValue& field : item) {
      std::vector<std::string> members;
      for (FeatureId id : field) members.push_back(vocab.decode(id));
      out.push_back(std::move(members));
    }
    return out;
  };
  RawRecord r;
  r.domain = inst.domain;
  r.label = inst.label;
  r.user = decode_item(inst.user);
  r.item = decode_item(inst.item);
  for (const auto& item : inst.clicked_source) {
    r.clicked_source.push_back(decode_item(item));
  }
  for (const auto& item : inst.clicked_target) {
    r.clicked_target.push_back(decode_item(item));
  }
  return r;
}

Dataset read_dataset(std::istream& in, const Schema& schema,
                     const Vocabulary& vocabulary, const LoadOptions& options) {
  Dataset ds;
  ds.schema = schema;
  ds.vocabulary = vocabulary;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    RawRecord r = parse_record(line, line_number);
    Instance inst = encode_record(r, schema, vocabulary, options, line_number);
    (inst.domain == Domain::source ? ds.source_instances : ds.target_instances)
        .push_back(std::move(inst));
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const Schema& schema,
                     const Vocabulary& vocabulary, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file " + path.string());
  try {
    return read_dataset(in, schema, vocabulary, options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Validation

void validate_instance(const Instance& inst, const Schema& schema,
                       std::size_t vocabulary_size,
                       const LoadOptions& options) {
  auto check_item = [&](const ItemFeatures& item, FieldGroup group,
                        const char* what) {
    if (item.size() != schema.field_count(group)) {
      throw SchemaError(std::string(what) + " has " +
                        std::to_string(item.size()) + " fields, expected " +
                        std::to_string(schema.field_count(group)));
    }
    for (const FieldValue& field : item) {
      if (field.empty()) {
        throw SchemaError(std::string(what) + " has an empty field");
      }
      for (FeatureId id : field) {
        if (id >= vocabulary_size) {
          throw SchemaError(std::string(what) + " references feature id " +
                            std::to_string(id) + " >= vocabulary size " +
                            std::to_string(vocabulary_size));
        }
      }
    }
  };
  if (inst.label != 0 && inst.label != 1) {
    throw SchemaError("label must be 0 or 1");
  }
  check_item(inst.user, FieldGroup::user, "user");
  check_item(inst.item, item_group(inst.domain), "item");
  if (inst.clicked_source.size() > options.max_source_seq) {
    throw SchemaError("clicked source sequence longer than max_source_seq");
  }
  if (inst.clicked_target.size() > options.max_target_seq) {
    throw SchemaError("clicked target sequence longer than max_target_seq");
  }
  for (const auto& item : inst.clicked_source) {
    check_item(item, FieldGroup::source, "clicked source item");
  }
  for (const auto& item : inst.clicked_target) {
    check_item(item, FieldGroup::target, "clicked target item");
  }
}

void validate_dataset(const Dataset& ds, const LoadOptions& options) {
  for (const Instance& inst : ds.source_instances) {
    if (inst.domain != Domain::source) {
      throw SchemaError("target instance stored among source instances");
    }
    validate_instance(inst, ds.schema, ds.vocabulary.size(), options);
  }
  for (const Instance& inst : ds.target_instances) {
    if (inst.domain != Domain::target) {
      throw SchemaError("source instance stored among target instances");
    }
    validate_instance(inst, ds.schema, ds.vocabulary.size(), options);
  }
}

}  // namespace minet
